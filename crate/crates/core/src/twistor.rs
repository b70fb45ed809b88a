//! The map (spinor, z) -> [xi, W], the twistor projection, and integrability
//! residuals of spinor fields.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::multi_index as mi;
use crate::sample;
use crate::spinor::{self, SpinorEven, PURITY_TOL};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Relative residual above which a projection is rejected.
pub const PROJECT_TOL: f64 = 1e-6;

/// Point of P^{2N-1}: the xi-half (even indices) and the W-half (odd
/// indices), both in canonical order. The xi-half may vanish (fiber at
/// infinity).
#[derive(Clone, Debug, PartialEq)]
pub struct TwistorPoint {
    pub n: usize,
    pub xi: Vec<C64>,
    pub w: Vec<C64>,
}

impl TwistorPoint {
    pub fn new(n: usize, xi: Vec<C64>, w: Vec<C64>) -> Result<Self> {
        mi::check_rank(n)?;
        let half = 1 << (n - 1);
        for v in [&xi, &w] {
            if v.len() != half {
                return Err(Error::ComponentCount { expected: half, got: v.len() });
            }
        }
        if xi.iter().chain(&w).all(|c| c.norm() == 0.0) {
            return Err(Error::ZeroSpinor);
        }
        Ok(TwistorPoint { n, xi, w })
    }

    pub fn xi_spinor(&self) -> Result<SpinorEven> {
        SpinorEven::new(self.n, self.xi.clone())
    }

    pub fn w_get(&self, idx: &[usize]) -> C64 {
        match mi::canonical(idx) {
            Some((m, s)) if m.count_ones() % 2 == 1 => {
                let p = mi::odd_masks(self.n).iter().position(|&x| x == m).unwrap();
                self.w[p] * s
            }
            _ => ZERO,
        }
    }

    /// xi followed by W.
    pub fn to_vec(&self) -> Vec<C64> {
        self.xi.iter().chain(&self.w).copied().collect()
    }

    pub fn norm(&self) -> f64 {
        linalg::cnorm(&self.to_vec())
    }

    /// Scaled to unit Euclidean norm.
    pub fn normalized(&self) -> Self {
        let k = 1.0 / self.norm();
        TwistorPoint {
            n: self.n,
            xi: self.xi.iter().map(|c| c * k).collect(),
            w: self.w.iter().map(|c| c * k).collect(),
        }
    }

    /// The point as an even spinor of rank n+1: xi_I for I in {1..n} and
    /// W_J in the slot J+{n+1}.
    pub fn lifted(&self) -> Result<SpinorEven> {
        let n = self.n;
        let masks = mi::even_masks(n + 1);
        let epos = mi::position_table(&mi::even_masks(n), n);
        let opos = mi::position_table(&mi::odd_masks(n), n);
        let top = 1u16 << n;
        let comps = masks
            .into_iter()
            .map(|m| if m & top == 0 { self.xi[epos[m as usize]] } else { self.w[opos[(m & !top) as usize]] })
            .collect();
        SpinorEven::new(n + 1, comps)
    }

    /// Largest rank-(n+1) purity residual after normalizing to unit norm.
    /// For n = 3 this is the single relation xi_0 W_123 - xi_12 W_3
    /// + xi_13 W_2 - xi_23 W_1.
    pub fn quadric_residual(&self) -> f64 {
        let p = self.normalized();
        let lifted = p.lifted().expect("nonzero point");
        spinor::quadric_residuals(&lifted).iter().fold(0.0f64, |a, r| a.max(r.norm()))
    }
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    n: usize,
    xi: BTreeMap<String, [f64; 2]>,
    w: BTreeMap<String, [f64; 2]>,
}

impl Serialize for TwistorPoint {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let half = |masks: Vec<u16>, v: &[C64]| -> BTreeMap<String, [f64; 2]> {
            masks.into_iter().zip(v).map(|(m, c)| (mi::key(m), [c.re, c.im])).collect()
        };
        PointJson { n: self.n, xi: half(mi::even_masks(self.n), &self.xi), w: half(mi::odd_masks(self.n), &self.w) }
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TwistorPoint {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = PointJson::deserialize(de)?;
        mi::check_rank(j.n).map_err(D::Error::custom)?;
        let fill = |masks: Vec<u16>, src: &BTreeMap<String, [f64; 2]>, odd: bool| -> std::result::Result<Vec<C64>, D::Error> {
            let pos = mi::position_table(&masks, j.n);
            let mut out = vec![ZERO; masks.len()];
            for (k, v) in src {
                let (m, s) = mi::parse_key(k, j.n).map_err(D::Error::custom)?;
                if (m.count_ones() % 2 == 1) != odd {
                    return Err(D::Error::custom(format!("key {k:?} has the wrong parity")));
                }
                out[pos[m as usize]] = C64::new(v[0], v[1]) * s;
            }
            Ok(out)
        };
        let xi = fill(mi::even_masks(j.n), &j.xi, false)?;
        let w = fill(mi::odd_masks(j.n), &j.w, true)?;
        TwistorPoint::new(j.n, xi, w).map_err(D::Error::custom)
    }
}

/// W_J = eta_J evaluated on (z, zbar).
pub fn w_components(s: &SpinorEven, z: &[C64]) -> Vec<C64> {
    let v: Vec<C64> = z.iter().copied().chain(z.iter().map(|c| c.conj())).collect();
    spinor::eta_forms(s).apply(&v)
}

pub fn embed(s: &SpinorEven, z: &[C64]) -> Result<TwistorPoint> {
    let rep = spinor::is_pure(s, PURITY_TOL);
    if !rep.pure {
        return Err(Error::NotPure { residual: rep.max_isotropy_residual, rank: rep.rank });
    }
    Ok(TwistorPoint { n: s.rank(), xi: s.components().to_vec(), w: w_components(s, z) })
}

pub fn is_fiber_at_infinity(p: &TwistorPoint, tol: f64) -> bool {
    let q = p.normalized();
    let w = linalg::cnorm(&q.w);
    w > 0.0 && linalg::cnorm(&q.xi) / w < tol
}

/// Inverts z -> W(s, z) by real least squares on all W components.
pub fn project(p: &TwistorPoint) -> Result<Vec<C64>> {
    let q = p.normalized();
    if linalg::cnorm(&q.xi) < 1e-12 {
        return Err(Error::FiberAtInfinity);
    }
    let s = q.xi_spinor()?;
    let n = q.n;
    let half = q.w.len();
    let mut a = RMat::zeros(2 * half, 2 * n);
    for r in 0..2 * n {
        let mut e = vec![ZERO; n];
        e[r / 2] = if r % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
        for (k, wk) in w_components(&s, &e).into_iter().enumerate() {
            a[(k, r)] = wk.re;
            a[(half + k, r)] = wk.im;
        }
    }
    let b = DMatrix::from_fn(2 * half, 1, |k, _| if k < half { q.w[k].re } else { q.w[k - half].im });
    let x = a.clone().svd(true, true).solve(&b, 1e-14).map_err(|_| Error::Inconsistent(f64::NAN))?;
    let resid = (&a * &x - &b).norm();
    if resid > PROJECT_TOL * b.norm().max(1e-300) && resid > 1e-14 {
        return Err(Error::Inconsistent(resid / b.norm()));
    }
    Ok((0..n).map(|k| C64::new(x[2 * k], x[2 * k + 1])).collect())
}

/// Closed-form projection for n = 3 with the |xi|^{-2} prefactor.
pub fn project_closed_form(p: &TwistorPoint) -> Result<[C64; 3]> {
    assert_eq!(p.n, 3, "closed form is for rank 3");
    let q = p.normalized();
    let n2: f64 = q.xi.iter().map(|c| c.norm_sqr()).sum();
    if n2.sqrt() < 1e-12 {
        return Err(Error::FiberAtInfinity);
    }
    let (x0, x12, x13, x23) = (q.xi[0], q.xi[1], q.xi[2], q.xi[3]);
    let (w1, w2, w3, w123) = (q.w[0], q.w[1], q.w[2], q.w[3]);
    let z1 = x0.conj() * w1 + x23.conj() * w123 + x13 * w3.conj() + x12 * w2.conj();
    let z2 = x0.conj() * w2 - x13.conj() * w123 - x12 * w1.conj() + x23 * w3.conj();
    let z3 = x0.conj() * w3 + x12.conj() * w123 - x23 * w2.conj() - x13 * w1.conj();
    Ok([z1 / n2, z2 / n2, z3 / n2])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Smoothness {
    C1,
    Smooth,
    RealAnalytic,
}

/// Pointwise spinor field z -> s(z) on C^n.
#[derive(Clone)]
pub struct OcsField {
    pub n: usize,
    pub smoothness: Smoothness,
    eval: Arc<dyn Fn(&[C64]) -> SpinorEven + Send + Sync>,
}

impl fmt::Debug for OcsField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OcsField").field("n", &self.n).field("smoothness", &self.smoothness).finish()
    }
}

impl OcsField {
    pub fn new<F>(n: usize, smoothness: Smoothness, eval: F) -> Self
    where
        F: Fn(&[C64]) -> SpinorEven + Send + Sync + 'static,
    {
        OcsField { n, smoothness, eval: Arc::new(eval) }
    }

    pub fn constant(s: SpinorEven) -> Self {
        OcsField::new(s.rank(), Smoothness::RealAnalytic, move |_| s.clone())
    }

    pub fn at(&self, z: &[C64]) -> SpinorEven {
        (self.eval)(z)
    }
}

/// Xi_{ijs}, indices 1-based, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct XiTensor {
    pub n: usize,
    values: Vec<C64>,
}

impl XiTensor {
    pub fn get(&self, i: usize, j: usize, s: usize) -> C64 {
        let n = self.n;
        self.values[((i - 1) * n + (j - 1)) * n + (s - 1)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.norm()))
    }
}

fn affine(field: &OcsField, z: &[C64]) -> Result<Vec<C64>> {
    let s = field.at(z);
    let x0 = s.xi0();
    if x0.norm() <= 1e-12 * s.norm() {
        return Err(Error::NormalizationFailure);
    }
    let n = field.n;
    let mut out = vec![ZERO; n * n];
    for i in 1..=n {
        for j in 1..=n {
            out[(i - 1) * n + j - 1] = s.get(&[i, j]) / x0;
        }
    }
    Ok(out)
}

/// Xi_{ijs} = d xi_ij / d zbar^s + sum_l (d xi_ij / d z^l) xi_sl with
/// xi_0 normalized to 1, by central differences of step h.
pub fn integrability_residual(field: &OcsField, z: &[C64], h: f64) -> Result<XiTensor> {
    let n = field.n;
    let base = affine(field, z)?;
    let mut dz = vec![vec![ZERO; n * n]; n];
    let mut dzb = vec![vec![ZERO; n * n]; n];
    for l in 0..n {
        let mut parts = [vec![], vec![]];
        for (k, step) in [C64::new(h, 0.0), C64::new(0.0, h)].into_iter().enumerate() {
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            zp[l] += step;
            zm[l] -= step;
            let (fp, fm) = (affine(field, &zp)?, affine(field, &zm)?);
            parts[k] = fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        }
        for q in 0..n * n {
            let (dx, dy) = (parts[0][q], parts[1][q]);
            dz[l][q] = (dx - linalg::I * dy) * 0.5;
            dzb[l][q] = (dx + linalg::I * dy) * 0.5;
        }
    }
    let mut values = vec![ZERO; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for s in 0..n {
                let mut v = dzb[s][i * n + j];
                for l in 0..n {
                    v += dz[l][i * n + j] * base[s * n + l];
                }
                values[(i * n + j) * n + s] = v;
            }
        }
    }
    Ok(XiTensor { n, values })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub n: usize,
    pub radius: f64,
    pub samples: usize,
    pub max_xi_norm: f64,
    pub max_long_w_norm: f64,
    pub all_at_infinity: bool,
}

/// Embeds the constant structure at random points of the sphere |z| = R.
pub fn limit_set_constant<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64, m: usize) -> LimitReport {
    let s = SpinorEven::standard(n);
    let long: Vec<usize> =
        mi::odd_masks(n).iter().enumerate().filter(|(_, m)| m.count_ones() >= 3).map(|(p, _)| p).collect();
    let mut rep =
        LimitReport { n, radius, samples: m, max_xi_norm: 0.0, max_long_w_norm: 0.0, all_at_infinity: true };
    for _ in 0..m {
        let d = sample::point(rng, n, 1.0);
        let k = radius / linalg::cnorm(&d);
        let z: Vec<C64> = d.iter().map(|c| c * k).collect();
        let p = embed(&s, &z).expect("standard spinor is pure").normalized();
        rep.max_xi_norm = rep.max_xi_norm.max(linalg::cnorm(&p.xi));
        for &i in &long {
            rep.max_long_w_norm = rep.max_long_w_norm.max(p.w[i].norm());
        }
        rep.all_at_infinity &= is_fiber_at_infinity(&p, 10.0 / radius);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(x: f64) -> C64 {
        c(x, 0.0)
    }

    #[test]
    fn w_standard_and_product() {
        let z = [c(1.0, 1.0), r(2.0), c(0.0, -3.0)];
        let w = w_components(&SpinorEven::standard(3), &z);
        assert_eq!(w, vec![z[0], z[1], z[2], r(0.0)]);
        let s = SpinorEven::from_real(3, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        let w = w_components(&s, &[r(0.0), r(0.0), r(5.0)]);
        assert_eq!(w, vec![r(0.0), r(0.0), r(5.0), r(5.0)]);
    }

    #[test]
    fn w_matches_closed_forms_n3() {
        let (x0, x12, x13, x23) = (c(0.3, 1.0), c(-1.0, 0.2), c(0.5, 0.5), c(2.0, -0.1));
        let z = [c(0.1, -0.4), c(1.5, 0.3), c(-0.7, 0.9)];
        let s = SpinorEven::new(3, vec![x0, x12, x13, x23]).unwrap();
        let w = w_components(&s, &z);
        let zb: Vec<C64> = z.iter().map(|v| v.conj()).collect();
        let want = [
            x0 * z[0] - x12 * zb[1] - x13 * zb[2],
            x0 * z[1] + x12 * zb[0] - x23 * zb[2],
            x0 * z[2] + x13 * zb[0] + x23 * zb[1],
            x23 * z[0] - x13 * z[1] + x12 * z[2],
        ];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn embed_examples() {
        let p = embed(&SpinorEven::standard(3), &[r(1.0), r(2.0), r(3.0)]).unwrap();
        assert_eq!(p.to_vec(), [1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 0.0].map(r).to_vec());
        let t = c(0.5, -2.0);
        let s = SpinorEven::from_real(3, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        let p = embed(&s, &[r(0.0), r(0.0), t]).unwrap();
        assert_eq!(p.to_vec(), vec![r(1.0), r(1.0), r(0.0), r(0.0), r(0.0), r(0.0), t, t]);
        assert!(p.quadric_residual() < 1e-15);
    }

    #[test]
    fn projection_branches_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let s = sample::pure_spinor(&mut rng, 3);
            let z = sample::point(&mut rng, 3, 2.0);
            let p = embed(&s, &z).unwrap();
            let a = project(&p).unwrap();
            let b = project_closed_form(&p).unwrap();
            for k in 0..3 {
                assert!((a[k] - z[k]).norm() < 1e-10);
                assert!((b[k] - z[k]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn projection_rejects() {
        let p = TwistorPoint::new(3, vec![r(1.0), r(0.0), r(0.0), r(0.0)], vec![r(1.0), r(0.0), r(0.0), r(1.0)]).unwrap();
        assert!(matches!(project(&p), Err(Error::Inconsistent(_))));
        let inf = TwistorPoint::new(3, vec![r(0.0); 4], vec![r(1.0), r(2.0), r(3.0), r(0.0)]).unwrap();
        assert_eq!(project(&inf), Err(Error::FiberAtInfinity));
        assert!(is_fiber_at_infinity(&inf, 1e-8));
        let fin = TwistorPoint::new(3, vec![r(1.0), r(0.0), r(0.0), r(0.0)], vec![r(0.0); 4]).unwrap();
        assert!(!is_fiber_at_infinity(&fin, 1e-8));
    }

    #[test]
    fn xi_examples() {
        let z = [c(0.2, 0.1), r(-0.3), c(0.5, 0.4)];
        let cst = OcsField::constant(SpinorEven::from_real(3, &[1.0, 0.3, -0.2, 0.7]).unwrap());
        assert_eq!(integrability_residual(&cst, &z, 1e-3).unwrap().max_abs(), 0.0);
        let conj = OcsField::new(3, Smoothness::Smooth, |z| {
            SpinorEven::new(3, vec![r(1.0), z[2].conj(), r(0.0), r(0.0)]).unwrap()
        });
        let xi = integrability_residual(&conj, &z, 1e-3).unwrap();
        assert!((xi.get(1, 2, 3) - r(1.0)).norm() < 1e-9);
        let hol = OcsField::new(3, Smoothness::RealAnalytic, |z| {
            SpinorEven::new(3, vec![r(1.0), z[2] * z[2] * z[2], r(0.0), r(0.0)]).unwrap()
        });
        let a = integrability_residual(&hol, &z, 1e-2).unwrap().max_abs();
        let b = integrability_residual(&hol, &z, 5e-3).unwrap().max_abs();
        let ratio = a / b;
        assert!(a < 1e-3 && (3.5..4.5).contains(&ratio), "{a} {b}");
        let bad = OcsField::constant(SpinorEven::from_real(3, &[0.0, 1.0, 0.0, 0.0]).unwrap());
        assert_eq!(integrability_residual(&bad, &z, 1e-3), Err(Error::NormalizationFailure));
    }

    #[test]
    fn constant_limit_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rep = limit_set_constant(&mut rng, 3, 1e6, 50);
        assert!(rep.max_xi_norm <= 2e-6);
        assert_eq!(rep.max_long_w_norm, 0.0);
        assert!(rep.all_at_infinity);
        let rep = limit_set_constant(&mut rng, 4, 1e3, 20);
        assert_eq!(rep.max_long_w_norm, 0.0);
    }

    #[test]
    fn json_roundtrip() {
        let p = embed(&SpinorEven::standard(3), &[r(1.0), r(2.0), r(3.0)]).unwrap();
        let txt = serde_json::to_string(&p).unwrap();
        assert!(txt.contains("\"w\":{\"1\":[1.0,0.0],\"123\""));
        assert_eq!(serde_json::from_str::<TwistorPoint>(&txt).unwrap(), p);
    }
}
