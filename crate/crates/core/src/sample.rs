//! Seeded random inputs for property sweeps.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMat;
use crate::spinor::{self, SpinorEven};

pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn point<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> Vec<C64> {
    (0..n).map(|_| complex(rng) * scale).collect()
}

pub fn skew<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let mut b = CMat::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = complex(rng);
            b[(i, j)] = v;
            b[(j, i)] = -v;
        }
    }
    b
}

/// Random pure spinor. Half are generic xi_0 exp(beta); a quarter are moved
/// to another chart by a random even swap; a quarter have xi_0 = 0 exactly.
pub fn pure_spinor<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SpinorEven {
    let kind = rng.random_range(0..4);
    let mut beta = skew(rng, n);
    if kind == 3 {
        beta[(0, 1)] = C64::new(0.0, 0.0);
        beta[(1, 0)] = C64::new(0.0, 0.0);
    }
    let s = SpinorEven::from_two_form(n, complex(rng), &beta).expect("nonzero");
    match kind {
        2 => {
            let masks = crate::multi_index::even_masks(n);
            let m = masks[rng.random_range(1..masks.len())];
            spinor::swap(&s, m)
        }
        3 => spinor::swap(&s, 0b11),
        _ => s,
    }
}

/// Haar-like SU(4) element: QR of a complex Gaussian with phase fixing and
/// determinant normalization.
pub fn su4<R: Rng + ?Sized>(rng: &mut R) -> CMat {
    let g = DMatrix::from_fn(4, 4, |_, _| complex(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..4 {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..4 {
            q[(i, j)] *= ph;
        }
    }
    let det = q.determinant();
    let root = det.powf(0.25);
    q / root
}
