//! The 4x4 matrices M(z), z in C^3, that turn the twistor map into
//! W = M(z) xi on 4-vectors.

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use serde::{Serialize, Serializer};

use crate::linalg;

pub type M4 = Matrix4<C64>;

#[derive(Clone, Debug, PartialEq)]
pub struct CliffordMatrix {
    pub m: M4,
    pub z: Option<[C64; 3]>,
}

impl Serialize for CliffordMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        nested(&self.m).serialize(ser)
    }
}

pub fn nested(m: &M4) -> Vec<Vec<[f64; 2]>> {
    (0..4).map(|i| (0..4).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn m_matrix(z: &[C64; 3]) -> CliffordMatrix {
    let [z1, z2, z3] = *z;
    let zero = C64::new(0.0, 0.0);
    #[rustfmt::skip]
    let m = M4::new(
        zero, -z3, -z2, -z1,
        z3, zero, -z1.conj(), z2.conj(),
        z2, z1.conj(), zero, -z3.conj(),
        z1, -z2.conj(), z3.conj(), zero,
    );
    CliffordMatrix { m, z: Some(*z) }
}

pub fn norm2(z: &[C64; 3]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

/// Textbook Pfaffian m12 m34 - m13 m24 + m14 m23.
pub fn pfaffian4(m: &M4) -> C64 {
    m[(0, 1)] * m[(2, 3)] - m[(0, 2)] * m[(1, 3)] + m[(0, 3)] * m[(1, 2)]
}

pub fn clifford_identity_residual(y: &[C64; 3], z: &[C64; 3]) -> f64 {
    let (my, mz) = (m_matrix(y).m, m_matrix(z).m);
    let re: f64 = y.iter().zip(z).map(|(a, b)| (a * b.conj()).re).sum();
    let r = my.map(|c| c.conj()) * mz + mz.map(|c| c.conj()) * my + M4::identity() * C64::new(2.0 * re, 0.0);
    r.norm()
}

/// Recovers z when M lies in the cone E (positive Pfaffian component).
pub fn extract_z(m: &M4) -> Option<[C64; 3]> {
    let scale = m.iter().fold(1.0f64, |a, c| a.max(c.norm()));
    let tol = 1e-9 * scale;
    if (m + m.transpose()).iter().any(|c| c.norm() > tol) {
        return None;
    }
    let z = [-m[(0, 3)], -m[(0, 2)], -m[(0, 1)]];
    let rebuilt = m_matrix(&z).m;
    if (m - rebuilt).iter().any(|c| c.norm() > tol) {
        return None;
    }
    let pf = pfaffian4(m);
    if (pf - C64::new(norm2(&z), 0.0)).norm() > tol * scale {
        return None;
    }
    Some(z)
}

/// Paper ordering (xi_0, xi_12, xi_13, xi_23) to the 4-vector
/// (xi_0, xi_12, -xi_13, xi_23).
pub fn xi_to_4vec(xi: &[C64]) -> [C64; 4] {
    [xi[0], xi[1], -xi[2], xi[3]]
}

pub fn xi_from_4vec(v: &[C64; 4]) -> Vec<C64> {
    vec![v[0], v[1], -v[2], v[3]]
}

/// (W_1, W_2, W_3, W_123) to the 4-vector (-W_123, W_3, W_2, W_1).
pub fn w_to_4vec(w: &[C64]) -> [C64; 4] {
    [-w[3], w[2], w[1], w[0]]
}

pub fn w_from_4vec(v: &[C64; 4]) -> Vec<C64> {
    vec![v[3], v[2], v[1], -v[0]]
}

pub fn mul(m: &M4, v: &[C64; 4]) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, x) in v.iter().enumerate() {
            *o += m[(i, j)] * x;
        }
    }
    out
}

pub fn point_from_real(x: &[f64]) -> [C64; 3] {
    let p = linalg::real_to_point(x);
    [p[0], p[1], p[2]]
}
