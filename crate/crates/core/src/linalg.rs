//! Small dense helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Singular values, largest first.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn numerical_rank(m: &CMat, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Orthonormal basis (as columns) of the null space of `m`, using the
/// `dim` smallest right singular vectors.
pub fn null_space(m: &CMat, dim: usize) -> CMat {
    let cols = m.ncols();
    // pad so the SVD returns a full set of right singular vectors
    let rows = m.nrows().max(cols);
    let mut p = CMat::zeros(rows, cols);
    p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = p.svd(false, true);
    let vt = svd.v_t.unwrap();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap());
    let mut out = CMat::zeros(cols, dim);
    for (j, &k) in order.iter().take(dim).enumerate() {
        for i in 0..cols {
            out[(i, j)] = vt[(k, i)].conj();
        }
    }
    out
}

/// Orthonormal basis of the column span of `v` (full column rank assumed).
pub fn orthonormalize(v: &CMat) -> CMat {
    let qr = v.clone().qr();
    qr.q()
}

/// Largest principal angle sine between two column spans of equal dimension.
pub fn span_distance(a: &CMat, b: &CMat) -> f64 {
    let qa = orthonormalize(a);
    let qb = orthonormalize(b);
    let proj = &qa * qa.adjoint();
    let resid = &qb - &proj * &qb;
    singular_values(&resid).first().copied().unwrap_or(0.0)
}

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.norm()))
}

/// Operator 2-norm of a real matrix.
pub fn op_norm(m: &RMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().fold(0.0f64, |a, &x| a.max(x))
}

pub fn j0_blocks(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(2 * k, 2 * k + 1)] = -1.0;
        j[(2 * k + 1, 2 * k)] = 1.0;
    }
    j
}

/// Converts a vector with (d/dz, d/dzbar) coefficients to real coordinates
/// ordered (x1, y1, x2, y2, ...).
pub fn holo_to_real(v: &[C64]) -> Vec<C64> {
    let n = v.len() / 2;
    let mut out = vec![C64::new(0.0, 0.0); 2 * n];
    for k in 0..n {
        let (a, b) = (v[k], v[n + k]);
        out[2 * k] = (a + b) * 0.5;
        out[2 * k + 1] = I * (b - a) * 0.5;
    }
    out
}

/// Inverse of [`holo_to_real`].
pub fn real_to_holo(v: &[C64]) -> Vec<C64> {
    let n = v.len() / 2;
    let mut out = vec![C64::new(0.0, 0.0); 2 * n];
    for k in 0..n {
        let (x, y) = (v[2 * k], v[2 * k + 1]);
        out[k] = x + I * y;
        out[n + k] = x - I * y;
    }
    out
}

pub fn point_to_real(z: &[C64]) -> Vec<f64> {
    z.iter().flat_map(|w| [w.re, w.im]).collect()
}

pub fn real_to_point(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

pub fn cnorm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Fubini-Study chordal distance between the lines through `u` and `v`,
/// computed as the norm of the part of u/|u| orthogonal to v.
pub fn chordal(u: &[C64], v: &[C64]) -> f64 {
    let nu = cnorm(u);
    let nv = cnorm(v);
    let ip: C64 = v.iter().zip(u).map(|(a, b)| a.conj() * b).sum::<C64>() / (nv * nv);
    let perp: f64 = u.iter().zip(v).map(|(a, b)| (a - b * ip).norm_sqr()).sum();
    (perp.sqrt() / nu).min(1.0)
}
