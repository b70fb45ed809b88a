//! Central finite differences for tensor fields given as real matrix
//! valued functions on R^m, and the step-halving order test.

use serde::Serialize;

use crate::linalg::RMat;

/// Residuals below this are treated as rounding noise, where a step
/// halving ratio means nothing.
pub const ZERO_FLOOR: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Convergence {
    pub h: f64,
    pub coarse: f64,
    pub fine: f64,
    pub ratio: Option<f64>,
    /// Second order decay, or already at the rounding floor.
    pub second_order: bool,
}

/// Evaluates `f` at h and h/2.
pub fn convergence(f: impl Fn(f64) -> f64, h: f64) -> Convergence {
    let coarse = f(h);
    let fine = f(h / 2.0);
    let at_floor = coarse < ZERO_FLOOR && fine < ZERO_FLOOR;
    let ratio = if fine > 0.0 { Some(coarse / fine) } else { None };
    let second_order = at_floor || ratio.is_some_and(|r| (3.5..=4.5).contains(&r));
    Convergence { h, coarse, fine, ratio, second_order }
}

fn shifted(x: &[f64], c: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[c] += d;
    y
}

/// dJ/dx_c for every coordinate c.
pub fn partials(j: &dyn Fn(&[f64]) -> RMat, x: &[f64], h: f64) -> Vec<RMat> {
    (0..x.len()).map(|c| (j(&shifted(x, c, h)) - j(&shifted(x, c, -h))) / (2.0 * h)).collect()
}

/// Max over coordinate pairs of |N(e_a, e_b)| with
/// N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y].
pub fn nijenhuis(j: &dyn Fn(&[f64]) -> RMat, x: &[f64], h: f64) -> f64 {
    let m = x.len();
    let jm = j(x);
    let d = partials(j, x, h);
    // derivative of J along a vector v
    let along = |v: &[f64]| -> RMat {
        let mut out = RMat::zeros(m, m);
        for (c, vc) in v.iter().enumerate() {
            out += &d[c] * *vc;
        }
        out
    };
    let mut worst = 0.0f64;
    for a in 0..m {
        let ja: Vec<f64> = jm.column(a).iter().copied().collect();
        let da = along(&ja);
        for b in a + 1..m {
            let jb: Vec<f64> = jm.column(b).iter().copied().collect();
            let db = along(&jb);
            let nv = da.column(b) - db.column(a) + &jm * d[b].column(a) - &jm * d[a].column(b);
            worst = worst.max(nv.amax());
        }
    }
    worst
}

/// omega_ab = <J e_a, e_b>.
pub fn omega(j: &RMat) -> RMat {
    j.transpose()
}

/// (omega^2 / 2)_abcd, the Pfaffian of omega on the four indices.
fn sigma(w: &RMat, a: usize, b: usize, c: usize, d: usize) -> f64 {
    w[(a, b)] * w[(c, d)] - w[(a, c)] * w[(b, d)] + w[(a, d)] * w[(b, c)]
}

/// Max component of d(omega).
pub fn d_omega(j: &dyn Fn(&[f64]) -> RMat, x: &[f64], h: f64) -> f64 {
    let m = x.len();
    let dw: Vec<RMat> = partials(j, x, h).iter().map(omega).collect();
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let v = dw[a][(b, c)] - dw[b][(a, c)] + dw[c][(a, b)];
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

/// Max component of d(omega^2 / 2).
pub fn d_star_omega(j: &dyn Fn(&[f64]) -> RMat, x: &[f64], h: f64) -> f64 {
    let m = x.len();
    let plus: Vec<RMat> = (0..m).map(|c| omega(&j(&shifted(x, c, h)))).collect();
    let minus: Vec<RMat> = (0..m).map(|c| omega(&j(&shifted(x, c, -h)))).collect();
    let ds = |c: usize, i: [usize; 4]| (sigma(&plus[c], i[0], i[1], i[2], i[3]) - sigma(&minus[c], i[0], i[1], i[2], i[3])) / (2.0 * h);
    let mut worst = 0.0f64;
    let mut idx = [0usize; 5];
    let mut rec = |idx: &[usize; 5]| {
        let mut v = 0.0;
        for k in 0..5 {
            let rest: Vec<usize> = idx.iter().enumerate().filter(|(p, _)| *p != k).map(|(_, i)| *i).collect();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            v += sign * ds(idx[k], [rest[0], rest[1], rest[2], rest[3]]);
        }
        worst = worst.max(v.abs());
    };
    fn walk(m: usize, start: usize, depth: usize, idx: &mut [usize; 5], f: &mut dyn FnMut(&[usize; 5])) {
        if depth == 5 {
            f(idx);
            return;
        }
        for a in start..m {
            idx[depth] = a;
            walk(m, a + 1, depth + 1, idx, f);
        }
    }
    walk(m, 0, 0, &mut idx, &mut rec);
    worst
}

/// Five-point-per-axis Laplacian of a scalar field.
pub fn laplacian<T>(f: &dyn Fn(&[f64]) -> T, x: &[f64], h: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let f0 = f(x);
    let mut acc = f0 * 0.0;
    for c in 0..x.len() {
        acc = acc + (f(&shifted(x, c, h)) + f(&shifted(x, c, -h)) - f0 * 2.0) * (1.0 / (h * h));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::j0_blocks;

    #[test]
    fn constant_structure_is_flat() {
        let j = |_: &[f64]| j0_blocks(3);
        let x = [0.3, -0.2, 0.1, 0.5, 0.7, -0.4];
        assert_eq!(nijenhuis(&j, &x, 1e-3), 0.0);
        assert_eq!(d_omega(&j, &x, 1e-3), 0.0);
        assert_eq!(d_star_omega(&j, &x, 1e-3), 0.0);
    }

    #[test]
    fn convergence_verdicts() {
        assert!(convergence(|h| 3.0 * h * h, 1e-2).second_order);
        assert!(!convergence(|h| h, 1e-2).second_order);
        assert!(convergence(|_| 0.0, 1e-2).second_order);
        assert!(!convergence(|_| 0.5, 1e-2).second_order);
    }

    #[test]
    fn laplacian_of_quadratic() {
        let f = |x: &[f64]| x[0] * x[0] + 3.0 * x[1] * x[1];
        assert!((laplacian(&f, &[0.4, 0.1], 1e-3) - 8.0).abs() < 1e-6);
    }
}
