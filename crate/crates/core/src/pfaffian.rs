//! Pfaffians of skew-symmetric matrices.
//!
//! Orientation convention: `pfaffian` is normalized so that the standard
//! structure diag(J0, ..., J0) with J0 = [[0,-1],[1,0]] has Pfaffian +1.
//! That is the Pfaffian of the 2-form w(a,b) = <M e_a, e_b>, which differs
//! from the textbook upper-triangle expansion by (-1)^(size/2).

use crate::error::{Error, Result};
use crate::linalg::{CMat, RMat};
use num_complex::Complex64 as C64;

pub fn skew_residual(m: &RMat) -> f64 {
    let s = m + m.transpose();
    s.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Textbook Pfaffian (Pf of [[0,a],[-a,0]] is a) by Householder
/// tridiagonalization.
pub fn pfaffian_upper(m: &RMat) -> Result<f64> {
    let scale = m.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let r = skew_residual(m);
    if r > 1e-10 * scale || !m.is_square() {
        return Err(Error::NotSkew(r));
    }
    let size = m.nrows();
    if size % 2 == 1 {
        return Ok(0.0);
    }
    let mut a = m.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < size {
        // reflect a[k+1.., k] onto its first entry
        let len = size - k - 1;
        let x: Vec<f64> = (0..len).map(|i| a[(k + 1 + i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|v| v * v).sum();
        if tail > 0.0 {
            let norm = (x[0] * x[0] + tail).sqrt();
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            let mut v = x.clone();
            v[0] -= alpha;
            let vv: f64 = v.iter().map(|t| t * t).sum();
            // A <- H A H on the trailing block rows/cols k+1..
            for col in k..size {
                let d: f64 = (0..len).map(|i| v[i] * a[(k + 1 + i, col)]).sum();
                let f = 2.0 * d / vv;
                for i in 0..len {
                    a[(k + 1 + i, col)] -= f * v[i];
                }
            }
            for row in k..size {
                let d: f64 = (0..len).map(|i| a[(row, k + 1 + i)] * v[i]).sum();
                let f = 2.0 * d / vv;
                for i in 0..len {
                    a[(row, k + 1 + i)] -= f * v[i];
                }
            }
            pf = -pf;
        }
        pf *= a[(k, k + 1)];
        if pf == 0.0 {
            return Ok(0.0);
        }
        k += 2;
    }
    Ok(pf)
}

/// Orientation Pfaffian; see the module docs for the sign.
pub fn pfaffian(m: &RMat) -> Result<f64> {
    let p = pfaffian_upper(m)?;
    Ok(if (m.nrows() / 2) % 2 == 1 { -p } else { p })
}

/// Textbook Pfaffian of a complex skew matrix by pivoted Parlett-Reid
/// elimination.
pub fn pfaffian_complex(m: &CMat) -> C64 {
    let size = m.nrows();
    if size == 0 {
        return C64::new(1.0, 0.0);
    }
    if size % 2 == 1 {
        return C64::new(0.0, 0.0);
    }
    let mut a = m.clone();
    let mut pf = C64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < size {
        // pivot the largest entry of column k below the diagonal into row k+1
        let mut p = k + 1;
        for i in k + 2..size {
            if a[(i, k)].norm() > a[(p, k)].norm() {
                p = i;
            }
        }
        if p != k + 1 {
            a.swap_rows(k + 1, p);
            a.swap_columns(k + 1, p);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        if piv.norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        pf *= piv;
        if k + 2 < size {
            let tau: Vec<C64> = (k + 2..size).map(|i| a[(k, i)] / piv).collect();
            // eliminate row/col k beyond k+1 using row/col k+1
            for (ti, i) in (k + 2..size).enumerate() {
                for (tj, j) in (k + 2..size).enumerate() {
                    let upd = tau[tj] * a[(k + 1, i)] - tau[ti] * a[(k + 1, j)];
                    a[(i, j)] += upd;
                }
            }
        }
        k += 2;
    }
    pf
}

/// Pfaffian of the principal submatrix on the given (sorted) rows.
pub fn sub_pfaffian(m: &CMat, rows: &[usize]) -> C64 {
    let k = rows.len();
    let sub = CMat::from_fn(k, k, |i, j| m[(rows[i], rows[j])]);
    pfaffian_complex(&sub)
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn square_is_determinant(entries in proptest::collection::vec(-2.0f64..2.0, 28)) {
            let mut m = RMat::zeros(8, 8);
            let mut k = 0;
            for i in 0..8 {
                for j in i + 1..8 {
                    m[(i, j)] = entries[k];
                    m[(j, i)] = -entries[k];
                    k += 1;
                }
            }
            let pf = pfaffian(&m).unwrap();
            let det = m.determinant();
            prop_assert!((pf * pf - det).abs() <= 1e-10 * det.abs().max(1.0));
            let c = m.map(|x| crate::linalg::c(x, 0.0));
            prop_assert!((pfaffian_complex(&c).re - pfaffian_upper(&m).unwrap()).abs() <= 1e-10 * pf.abs().max(1.0));
        }
    }
}
