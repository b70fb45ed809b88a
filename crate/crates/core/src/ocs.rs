//! Orthogonal complex structures as real matrices, and the bijection with
//! projective pure spinors.
//!
//! Sign convention: J is the structure whose (1,0)-forms are the eta-forms,
//! i.e. T^{0,1} is the Clifford annihilator of the spinor. Real coordinates
//! are ordered (x1, y1, ..., xn, yn).

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::multi_index as mi;
use crate::pfaffian::pfaffian;
use crate::spinor::{self, SpinorEven};

pub const OCS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct OcsMatrix {
    n: usize,
    m: RMat,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OcsResiduals {
    pub skew: f64,
    pub orthogonal: f64,
    pub square: f64,
    pub pfaffian: f64,
}

impl OcsResiduals {
    pub fn max(&self) -> f64 {
        self.skew.max(self.orthogonal).max(self.square).max(self.pfaffian)
    }
}

pub fn residuals(m: &RMat) -> OcsResiduals {
    let size = m.nrows();
    let id = RMat::identity(size, size);
    let skew = linalg::max_abs(&(m + m.transpose()));
    let orthogonal = linalg::max_abs(&(m.transpose() * m - &id));
    let square = linalg::max_abs(&(m * m + &id));
    let pf = pfaffian(&((m - m.transpose()) * 0.5)).unwrap_or(f64::NAN);
    OcsResiduals { skew, orthogonal, square, pfaffian: (pf - 1.0).abs() }
}

impl OcsMatrix {
    pub fn new(m: RMat) -> Result<Self> {
        Self::with_tol(m, OCS_TOL)
    }

    pub fn with_tol(m: RMat, tol: f64) -> Result<Self> {
        if !m.is_square() || m.nrows() % 2 == 1 || m.nrows() < 4 {
            return Err(Error::NotOcs(format!("shape {}x{}", m.nrows(), m.ncols())));
        }
        let r = residuals(&m);
        if r.skew > tol || r.orthogonal > tol || r.pfaffian.is_nan() || r.pfaffian > tol {
            return Err(Error::NotOcs(format!("{r:?}")));
        }
        Ok(OcsMatrix { n: m.nrows() / 2, m })
    }

    pub fn standard(n: usize) -> Self {
        OcsMatrix { n, m: linalg::j0_blocks(n) }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RMat {
        &self.m
    }

    pub fn into_matrix(self) -> RMat {
        self.m
    }
}

#[derive(Serialize, Deserialize)]
struct OcsJson {
    n: usize,
    entries: Vec<f64>,
}

impl Serialize for OcsMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let size = 2 * self.n;
        let entries = (0..size * size).map(|k| self.m[(k / size, k % size)]).collect();
        OcsJson { n: self.n, entries }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for OcsMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = OcsJson::deserialize(de)?;
        let size = 2 * j.n;
        if j.entries.len() != size * size {
            return Err(D::Error::custom("entry count does not match n"));
        }
        OcsMatrix::new(RMat::from_row_slice(size, size, &j.entries)).map_err(D::Error::custom)
    }
}

/// J from an isotropic basis of T^{0,1}: with P the orthogonal projector
/// onto its span in real coordinates, J = 2 Im P.
pub fn ocs_from_basis(vs: &[Vec<C64>]) -> RMat {
    let real: Vec<Vec<C64>> = vs.iter().map(|v| linalg::holo_to_real(v)).collect();
    let q = linalg::orthonormalize(&spinor::basis_matrix(&real));
    let p = &q * q.adjoint();
    p.map(|x| 2.0 * x.im)
}

pub fn ocs_from_spinor(s: &SpinorEven) -> Result<OcsMatrix> {
    let basis = spinor::isotropic_tangent_basis(s)?;
    let m = ocs_from_basis(&basis);
    let n = s.rank();
    Ok(OcsMatrix { n, m })
}

/// T^{0,1} of J (the -i eigenspace) as columns in (d/dz, d/dzbar)
/// coordinates.
pub fn antiholomorphic_space(j: &OcsMatrix) -> CMat {
    let size = 2 * j.n;
    let a = j.m.map(|x| C64::new(x, 0.0)) + CMat::identity(size, size) * linalg::I;
    let ns = linalg::null_space(&a, j.n);
    let mut out = CMat::zeros(size, j.n);
    for c in 0..j.n {
        let col: Vec<C64> = ns.column(c).iter().copied().collect();
        let h = linalg::real_to_holo(&col);
        for (r, v) in h.into_iter().enumerate() {
            out[(r, c)] = v;
        }
    }
    out
}

pub fn spinor_from_ocs(j: &OcsMatrix) -> Result<SpinorEven> {
    let n = j.n;
    let v = antiholomorphic_space(j);
    // chart: the even swap whose dzbar-block is best conditioned
    let mut best: Option<(f64, u16, CMat)> = None;
    for mask in mi::even_masks(n) {
        let mut w = v.clone();
        for k in mi::indices(mask) {
            w.swap_rows(k - 1, n + k - 1);
        }
        let b = w.rows(n, n).into_owned();
        let d = b.determinant().norm();
        if best.as_ref().is_none_or(|(bd, _, _)| d > *bd) {
            best = Some((d, mask, w));
        }
    }
    let (d, mask, w) = best.unwrap();
    if d < 1e-12 {
        return Err(Error::NotOcs("degenerate -i eigenspace".into()));
    }
    let a = w.rows(0, n).into_owned();
    let b = w.rows(n, n).into_owned();
    let c = a * b.try_inverse().ok_or_else(|| Error::NotOcs("singular chart".into()))?;
    let beta = (&c - c.transpose()) * C64::new(0.5, 0.0);
    let t = SpinorEven::from_two_form(n, C64::new(1.0, 0.0), &beta)?;
    let s = if mask == 0 { t } else { spinor::unswap(&t, mask) };
    spinor::normalize(&s)
}

/// Rank n-1 factor when no component involves the last index.
pub fn product_split(s: &SpinorEven, tol: f64) -> Option<SpinorEven> {
    let n = s.rank();
    if n < 3 {
        return None;
    }
    let top = s.components().iter().fold(0.0f64, |a, c| a.max(c.norm()));
    let last = 1u16 << (n - 1);
    let mut comps = Vec::new();
    for (m, c) in s.masks().into_iter().zip(s.components()) {
        if m & last != 0 {
            if c.norm() > tol * top {
                return None;
            }
        } else {
            comps.push((m, *c));
        }
    }
    // masks without index n appear in the same relative order as the
    // canonical order for rank n-1
    let order = mi::even_masks(n - 1);
    let vals = order.iter().map(|m| comps.iter().find(|(k, _)| k == m).unwrap().1).collect();
    SpinorEven::new(n - 1, vals).ok()
}

pub fn direct_sum(a: &RMat, b: &RMat) -> RMat {
    let (p, q) = (a.nrows(), b.nrows());
    let mut m = RMat::zeros(p + q, p + q);
    m.view_mut((0, 0), (p, p)).copy_from(a);
    m.view_mut((p, p), (q, q)).copy_from(b);
    m
}

/// Closed form of the 4x4 block for the rank-2 spinor [x0, x12], written
/// homogeneously so poles of x12/x0 need no special treatment.
pub fn product_block(x0: C64, x12: C64) -> Matrix4<f64> {
    let k = x0.norm().max(x12.norm());
    let (a, b) = (x0 / k, x12 / k);
    let (p, q) = (a.norm_sqr(), b.norm_sqr());
    let w = b * a.conj();
    let (f, g) = (2.0 * w.re, 2.0 * w.im);
    let (d, s) = (q - p, p + q);
    Matrix4::new(
        0.0, d, g, -f, //
        -d, 0.0, -f, -g, //
        -g, f, 0.0, d, //
        f, g, -d, 0.0,
    ) / s
}

/// The change-of-basis matrix A displayed for n=3, xi_0 = 1.
pub fn displayed_a_matrix(x12: C64, x13: C64, x23: C64) -> RMat {
    let (f12, g12, f13, g13, f23, g23) = (x12.re, x12.im, x13.re, x13.im, x23.re, x23.im);
    RMat::from_row_slice(
        6,
        6,
        &[
            -1.0, 0.0, f12, g12, f13, g13, //
            0.0, -1.0, g12, -f12, g13, -f13, //
            -f12, -g12, -1.0, 0.0, f23, g23, //
            -g12, f12, 0.0, -1.0, g23, -f23, //
            -f13, -g13, -f23, -g23, -1.0, 0.0, //
            -g13, f13, -g23, f23, 0.0, -1.0,
        ],
    )
}

/// The displayed product-form matrix for [1, x12, 0, 0], entries as printed.
pub fn displayed_product_matrix(x12: C64) -> RMat {
    let (f, g, s) = (x12.re, x12.im, x12.norm_sqr());
    let mut d = RMat::from_row_slice(
        6,
        6,
        &[
            0.0, s - 1.0, -2.0 * g, 2.0 * f, 0.0, 0.0, //
            1.0 - s, 0.0, 2.0 * f, 2.0 * g, 0.0, 0.0, //
            2.0 * g, -2.0 * f, 0.0, s - 1.0, 0.0, 0.0, //
            -2.0 * f, -2.0 * g, 1.0 - s, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, -(1.0 + s), //
            0.0, 0.0, 0.0, 0.0, 1.0 + s, 0.0,
        ],
    );
    d /= 1.0 + s;
    d
}

pub fn to_dmatrix4(m: &Matrix4<f64>) -> RMat {
    DMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}
