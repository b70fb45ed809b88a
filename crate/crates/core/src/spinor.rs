//! Even spinors on C^n, their eta-forms, quadric relations and purity.
//!
//! Spinors live in the exterior algebra of C^n. A tangent vector
//! sum a_k d/dz^k + b_k d/dzbar^k acts by a_k e_k^ + b_k i_k (wedge and
//! interior product); the eta-forms are the components of that action.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::multi_index::{self as mi, pass_sign};
use crate::pfaffian::sub_pfaffian;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Default tolerance for purity decisions.
pub const PURITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SpinorEven {
    n: usize,
    comps: Vec<C64>,
}

impl SpinorEven {
    /// Components in canonical even order (xi_0, xi_12, xi_13, ...).
    pub fn new(n: usize, comps: Vec<C64>) -> Result<Self> {
        mi::check_rank(n)?;
        let expected = 1 << (n - 1);
        if comps.len() != expected {
            return Err(Error::ComponentCount { expected, got: comps.len() });
        }
        if comps.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::ZeroSpinor);
        }
        Ok(SpinorEven { n, comps })
    }

    pub fn from_real(n: usize, comps: &[f64]) -> Result<Self> {
        Self::new(n, comps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// The standard structure [1, 0, ..., 0].
    pub fn standard(n: usize) -> Self {
        let mut comps = vec![ZERO; 1 << (n - 1)];
        comps[0] = C64::new(1.0, 0.0);
        SpinorEven { n, comps }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[C64] {
        &self.comps
    }

    pub fn masks(&self) -> Vec<u16> {
        mi::even_masks(self.n)
    }

    pub fn get_mask(&self, mask: u16) -> C64 {
        let pos = mi::even_masks(self.n).iter().position(|&m| m == mask);
        pos.map_or(ZERO, |p| self.comps[p])
    }

    /// Signed lookup; repeated indices give 0.
    pub fn get(&self, idx: &[usize]) -> C64 {
        match mi::canonical(idx) {
            Some((m, s)) if m.count_ones() % 2 == 0 => self.get_mask(m) * s,
            _ => ZERO,
        }
    }

    pub fn xi0(&self) -> C64 {
        self.comps[0]
    }

    /// Dense exterior-algebra vector indexed by mask (odd slots zero).
    pub fn to_full(&self) -> Vec<C64> {
        let mut full = vec![ZERO; 1 << self.n];
        for (m, c) in mi::even_masks(self.n).into_iter().zip(&self.comps) {
            full[m as usize] = *c;
        }
        full
    }

    pub fn from_full(n: usize, full: &[C64]) -> Result<Self> {
        let comps = mi::even_masks(n).into_iter().map(|m| full[m as usize]).collect();
        Self::new(n, comps)
    }

    pub fn scale(&self, k: C64) -> Self {
        SpinorEven { n: self.n, comps: self.comps.iter().map(|c| c * k).collect() }
    }

    pub fn norm(&self) -> f64 {
        linalg::cnorm(&self.comps)
    }

    /// Builds xi_0 exp(beta): xi_I is xi_0 times the Pfaffian of beta on I.
    pub fn from_two_form(n: usize, xi0: C64, beta: &CMat) -> Result<Self> {
        let comps = mi::even_masks(n)
            .into_iter()
            .map(|m| {
                let rows: Vec<usize> = mi::indices(m).iter().map(|i| i - 1).collect();
                xi0 * sub_pfaffian(beta, &rows)
            })
            .collect();
        Self::new(n, comps)
    }

    /// Relabels coordinates: index i becomes perm[i-1].
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut comps = vec![ZERO; self.comps.len()];
        let pos = mi::position_table(&mi::even_masks(self.n), self.n);
        for (m, c) in mi::even_masks(self.n).into_iter().zip(&self.comps) {
            let img: Vec<usize> = mi::indices(m).iter().map(|&i| perm[i - 1]).collect();
            let (m2, s) = mi::canonical(&img).expect("permutation");
            comps[pos[m2 as usize]] = c * s;
        }
        SpinorEven { n: self.n, comps }
    }
}

/// e_k wedge on a dense exterior vector (k is 1-based).
pub fn wedge(k: usize, v: &[C64]) -> Vec<C64> {
    let bit = 1u16 << (k - 1);
    let mut out = vec![ZERO; v.len()];
    for (m, c) in v.iter().enumerate() {
        let m = m as u16;
        if m & bit == 0 && c.norm() != 0.0 {
            out[(m | bit) as usize] += c * pass_sign(m, k);
        }
    }
    out
}

/// Interior product with the dual of e_k.
pub fn interior(k: usize, v: &[C64]) -> Vec<C64> {
    let bit = 1u16 << (k - 1);
    let mut out = vec![ZERO; v.len()];
    for (m, c) in v.iter().enumerate() {
        let m = m as u16;
        if m & bit != 0 && c.norm() != 0.0 {
            out[(m & !bit) as usize] += c * pass_sign(m, k);
        }
    }
    out
}

/// Clifford action of a tangent vector with (d/dz, d/dzbar) coefficients.
pub fn clifford_act(vec: &[C64], v: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; v.len()];
    for k in 1..=n {
        if vec[k - 1].norm() != 0.0 {
            for (o, w) in out.iter_mut().zip(wedge(k, v)) {
                *o += vec[k - 1] * w;
            }
        }
        if vec[n + k - 1].norm() != 0.0 {
            for (o, w) in out.iter_mut().zip(interior(k, v)) {
                *o += vec[n + k - 1] * w;
            }
        }
    }
    out
}

/// Applies the swap operator prod_{k in mask} (e_k^ - i_k). Conjugating by it
/// exchanges d/dz^k and d/dzbar^k for k in the mask.
pub fn swap_full(mask: u16, v: &[C64]) -> Vec<C64> {
    let mut cur = v.to_vec();
    for k in mi::indices(mask).into_iter().rev() {
        let w = wedge(k, &cur);
        let i = interior(k, &cur);
        cur = w.iter().zip(&i).map(|(a, b)| a - b).collect();
    }
    cur
}

/// Spinor of the structure whose T^{0,1} is swapped on the indices of `mask`
/// (|mask| even).
pub fn swap(s: &SpinorEven, mask: u16) -> SpinorEven {
    debug_assert!(mask.count_ones() % 2 == 0);
    SpinorEven::from_full(s.n, &swap_full(mask, &s.to_full())).expect("swap is invertible")
}

/// Inverse of [`swap`] up to scale.
pub fn unswap(s: &SpinorEven, mask: u16) -> SpinorEven {
    let mut cur = s.to_full();
    for k in mi::indices(mask) {
        let w = wedge(k, &cur);
        let i = interior(k, &cur);
        cur = w.iter().zip(&i).map(|(a, b)| b - a).collect();
    }
    SpinorEven::from_full(s.n, &cur).expect("swap is invertible")
}

/// Exchanges the d/dz^k and d/dzbar^k coefficients of a vector for k in mask.
pub fn swap_vector(mask: u16, v: &mut [C64]) {
    let n = v.len() / 2;
    for k in mi::indices(mask) {
        v.swap(k - 1, n + k - 1);
    }
}

/// The 2^{n-1} one-forms eta_J, one per odd multi-index, as coefficient rows
/// in the basis (dz^1..dz^n, dzbar^1..dzbar^n).
#[derive(Clone, Debug, PartialEq)]
pub struct CoFrame {
    pub n: usize,
    pub masks: Vec<u16>,
    pub rows: Vec<Vec<C64>>,
}

impl CoFrame {
    pub fn row(&self, idx: &[usize]) -> Option<&[C64]> {
        let (m, _) = mi::canonical(idx)?;
        self.masks.iter().position(|&x| x == m).map(|p| self.rows[p].as_slice())
    }

    pub fn matrix(&self) -> CMat {
        DMatrix::from_fn(self.rows.len(), 2 * self.n, |i, j| self.rows[i][j])
    }

    /// Evaluates every form on a vector with (dz, dzbar) slots filled.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Projective representative with largest component equal to 1; ties go to
/// the lexicographically first multi-index.
pub fn normalize(s: &SpinorEven) -> Result<SpinorEven> {
    let masks = mi::even_masks(s.n);
    let top = s.comps.iter().fold(0.0f64, |a, c| a.max(c.norm()));
    if top == 0.0 {
        return Err(Error::ZeroSpinor);
    }
    let lex = |m: u16| mi::indices(m);
    let mut best: Option<usize> = None;
    for (p, c) in s.comps.iter().enumerate() {
        if c.norm() >= top * (1.0 - 1e-12) {
            best = match best {
                Some(b) if lex(masks[b]) <= lex(masks[p]) => Some(b),
                _ => Some(p),
            };
        }
    }
    let pivot = s.comps[best.unwrap()];
    Ok(s.scale(pivot.inv()))
}

pub fn eta_forms(s: &SpinorEven) -> CoFrame {
    let n = s.n;
    let full = s.to_full();
    let masks = mi::odd_masks(n);
    let rows = masks
        .iter()
        .map(|&j| {
            let mut row = vec![ZERO; 2 * n];
            for k in 1..=n {
                let bit = 1u16 << (k - 1);
                if j & bit != 0 {
                    let rest = j & !bit;
                    row[k - 1] = full[rest as usize] * pass_sign(rest, k);
                } else {
                    row[n + k - 1] = full[(j | bit) as usize] * pass_sign(j, k);
                }
            }
            row
        })
        .collect();
    CoFrame { n, masks, rows }
}

/// One residual per even multi-index of length at least 4.
pub fn quadric_residuals(s: &SpinorEven) -> Vec<C64> {
    let mut out = Vec::new();
    for m in mi::even_masks(s.n) {
        let idx = mi::indices(m);
        let p = idx.len();
        if p < 4 {
            continue;
        }
        let last = idx[p - 1];
        let mut sum = ZERO;
        for k in 0..p - 1 {
            let rest: Vec<usize> = idx[..p - 1].iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &i)| i).collect();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += s.get(&[idx[k], last]) * s.get(&rest) * sign;
        }
        out.push(s.xi0() * s.get(&idx) - sum);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PurityReport {
    pub pure: bool,
    pub max_isotropy_residual: f64,
    pub rank: usize,
}

/// Bilinear pairing with <dz^i, dzbar^j> = delta_ij and dz, dz (resp.
/// dzbar, dzbar) pairing to zero.
pub fn pairing(a: &[C64], b: &[C64]) -> C64 {
    let n = a.len() / 2;
    (0..n).map(|k| a[k] * b[n + k] + a[n + k] * b[k]).sum()
}

pub fn is_pure(s: &SpinorEven, tol: f64) -> PurityReport {
    let s = normalize(s).expect("spinor invariant");
    let eta = eta_forms(&s);
    let mut resid = 0.0f64;
    for (a, ra) in eta.rows.iter().enumerate() {
        for rb in &eta.rows[a..] {
            resid = resid.max(pairing(ra, rb).norm());
        }
    }
    let rank = linalg::numerical_rank(&eta.matrix(), tol);
    PurityReport { pure: resid <= tol && rank == s.n, max_isotropy_residual: resid, rank }
}

/// Chart used for tangent extraction: the empty index when xi_0 is within a
/// factor two of the largest component, otherwise the largest component.
pub fn chart_of(s: &SpinorEven) -> u16 {
    let masks = mi::even_masks(s.n);
    let top = s.comps.iter().fold(0.0f64, |a, c| a.max(c.norm()));
    if s.comps[0].norm() >= 0.5 * top {
        return 0;
    }
    let mut best = 0;
    for p in 1..masks.len() {
        if s.comps[p].norm() > s.comps[best].norm() {
            best = p;
        }
    }
    masks[best]
}

/// T^{0,1} basis in a given chart: swap by `chart`, take the generic-chart
/// vectors xi_0 d/dzbar_i + sum_k xi_ki d/dz_k, swap the vectors back.
pub fn tangent_basis_in_chart(s: &SpinorEven, chart: u16) -> Vec<Vec<C64>> {
    let n = s.n;
    let t = if chart == 0 { s.clone() } else { swap(s, chart) };
    (1..=n)
        .map(|i| {
            let mut v = vec![ZERO; 2 * n];
            v[n + i - 1] = t.xi0();
            for k in 1..=n {
                v[k - 1] = t.get(&[k, i]);
            }
            swap_vector(chart, &mut v);
            v
        })
        .collect()
}

pub fn isotropic_tangent_basis(s: &SpinorEven) -> Result<Vec<Vec<C64>>> {
    let rep = is_pure(s, PURITY_TOL);
    if !rep.pure {
        return Err(Error::NotPure { residual: rep.max_isotropy_residual, rank: rep.rank });
    }
    Ok(tangent_basis_in_chart(s, chart_of(s)))
}

/// Basis vectors as columns of a 2n x n matrix.
pub fn basis_matrix(vs: &[Vec<C64>]) -> CMat {
    DMatrix::from_fn(vs[0].len(), vs.len(), |i, j| vs[j][i])
}

#[derive(Serialize, Deserialize)]
struct SpinorJson {
    n: usize,
    components: BTreeMap<String, [f64; 2]>,
}

impl Serialize for SpinorEven {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let components = mi::even_masks(self.n)
            .into_iter()
            .zip(&self.comps)
            .map(|(m, c)| (mi::key(m), [c.re, c.im]))
            .collect();
        SpinorJson { n: self.n, components }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SpinorEven {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = SpinorJson::deserialize(de)?;
        mi::check_rank(j.n).map_err(D::Error::custom)?;
        let masks = mi::even_masks(j.n);
        let pos = mi::position_table(&masks, j.n);
        let mut comps = vec![ZERO; masks.len()];
        for (k, v) in &j.components {
            let (m, s) = mi::parse_key(k, j.n).map_err(D::Error::custom)?;
            if m.count_ones() % 2 == 1 {
                return Err(D::Error::custom(format!("odd key {k:?} in even spinor")));
            }
            comps[pos[m as usize]] = C64::new(v[0], v[1]) * s;
        }
        SpinorEven::new(j.n, comps).map_err(D::Error::custom)
    }
}
