//! Round-metric energy and graph area of warped structures, integrated
//! over Euclidean balls in R^6.
//!
//! The round metric is g = lambda^2 delta with lambda = 2 / (1 + |x|^2).
//! Writing phi = ln lambda, the Christoffel symbols are
//! Gamma^a_{ib} = delta_ai phi_b + delta_ab phi_i - delta_ib phi_a.

use std::f64::consts::PI;

use nalgebra::{Matrix6, SMatrix};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::warped::WarpedStructure;

pub type M6 = Matrix6<f64>;

/// Angular resolution used when none is given; see [`integrate`].
pub const DEFAULT_GRID: usize = 4;

/// Step for the central differences of J.
pub const FD_STEP: f64 = 1e-4;
/// Relative disagreement between grid and grid + 1 that is tolerated.
pub const REFINE_TOL: f64 = 0.10;

pub struct ChartGeometry;

impl ChartGeometry {
    pub fn lambda(x: &[f64; 6]) -> f64 {
        2.0 / (1.0 + x.iter().map(|v| v * v).sum::<f64>())
    }

    /// Gradient of ln lambda.
    pub fn grad_phi(x: &[f64; 6]) -> [f64; 6] {
        let s = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        x.map(|v| -2.0 * v / s)
    }

    /// Matrix (Gamma_i)_{ab} = Gamma^a_{ib}.
    pub fn gamma(x: &[f64; 6], i: usize) -> M6 {
        let p = Self::grad_phi(x);
        let mut g = M6::identity() * p[i];
        for k in 0..6 {
            g[(i, k)] += p[k];
            g[(k, i)] -= p[k];
        }
        g
    }
}

/// nabla_i J = d_i J + [Gamma_i, J]; J only depends on (x5, x6).
pub fn covariant_derivative(ws: &WarpedStructure, x: &[f64; 6]) -> [M6; 6] {
    let t = C64::new(x[4], x[5]);
    let j = ws.j6(t);
    let h = FD_STEP;
    let dx = (ws.j6(t + C64::new(h, 0.0)) - ws.j6(t - C64::new(h, 0.0))) / (2.0 * h);
    let dy = (ws.j6(t + C64::new(0.0, h)) - ws.j6(t - C64::new(0.0, h))) / (2.0 * h);
    std::array::from_fn(|i| {
        let g = ChartGeometry::gamma(x, i);
        let flat = match i {
            4 => dx,
            5 => dy,
            _ => M6::zeros(),
        };
        flat + g * j - j * g
    })
}

/// ||nabla J||_g^6 times the round volume density, which reduces to the
/// cube of the coordinate Frobenius norm squared.
pub fn energy_density(ws: &WarpedStructure, x: &[f64; 6]) -> f64 {
    let s: f64 = covariant_derivative(ws, x).iter().map(|m| m.norm_squared()).sum();
    s * s * s
}

/// sqrt det(I + G^T G) times the round volume density, where column i of G
/// holds the independent entries of nabla_i J measured in g.
pub fn area_density(ws: &WarpedStructure, x: &[f64; 6]) -> f64 {
    let d = covariant_derivative(ws, x);
    let lam = ChartGeometry::lambda(x);
    let mut gram = SMatrix::<f64, 6, 6>::identity();
    for i in 0..6 {
        for k in i..6 {
            let mut v = 0.0;
            for a in 0..6 {
                for b in a + 1..6 {
                    v += d[i][(a, b)] * d[k][(a, b)];
                }
            }
            v /= lam * lam;
            gram[(i, k)] += v;
            if k != i {
                gram[(k, i)] += v;
            }
        }
    }
    gram.determinant().max(0.0).sqrt() * lam.powi(6)
}

/// Midpoint rule on the ball of radius r in toric coordinates
/// z_k = rho mu_k e^{i theta_k} with
/// mu = (sqrt(s (1 - c)), sqrt(s c), sqrt(1 - s)) and s = sqrt(v), so the
/// sphere measure is dv dc dtheta^3 / 8; rho = e^u - 1 is midpoint in u.
pub fn integrate(r: f64, grid: usize, f: &(dyn Fn(&[f64; 6]) -> f64 + Sync)) -> f64 {
    let g = grid.max(1);
    let (nb, nc, nt, nr) = (g, g, 2 * g, 8 * g);
    let umax = (1.0 + r).ln();
    let (du, db, dc, dt) = (umax / nr as f64, 1.0 / nb as f64, 1.0 / nc as f64, 2.0 * PI / nt as f64);
    let shells: Vec<f64> = (0..nr)
        .into_par_iter()
        .map(|ir| {
            let u = (ir as f64 + 0.5) * du;
            let rho = u.exp() - 1.0;
            let jac = rho.powi(5) * u.exp() * du;
            let mut acc = 0.0;
            for ib in 0..nb {
                let s = ((ib as f64 + 0.5) * db).sqrt();
                for ic in 0..nc {
                    let c = (ic as f64 + 0.5) * dc;
                    let mu = [(s * (1.0 - c)).sqrt(), (s * c).sqrt(), (1.0 - s).sqrt()];
                    let w = 0.125 * db * dc * dt * dt * dt;
                    for t1 in 0..nt {
                        let a1 = (t1 as f64 + 0.5) * dt;
                        for t2 in 0..nt {
                            let a2 = (t2 as f64 + 0.5) * dt;
                            for t3 in 0..nt {
                                let a3 = (t3 as f64 + 0.5) * dt;
                                let x = [
                                    rho * mu[0] * a1.cos(),
                                    rho * mu[0] * a1.sin(),
                                    rho * mu[1] * a2.cos(),
                                    rho * mu[1] * a2.sin(),
                                    rho * mu[2] * a3.cos(),
                                    rho * mu[2] * a3.sin(),
                                ];
                                acc += w * f(&x);
                            }
                        }
                    }
                }
            }
            acc * jac
        })
        .collect();
    // fixed summation order keeps the result independent of scheduling
    shells.iter().sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quadrature {
    pub r: f64,
    pub grid: usize,
    pub value: f64,
    pub refined: f64,
    pub refinement_ratio: f64,
}

impl Quadrature {
    pub fn checked(self) -> Result<Self> {
        if self.refinement_ratio > REFINE_TOL {
            Err(Error::ResolutionTooCoarse(self.refinement_ratio))
        } else {
            Ok(self)
        }
    }
}

fn quadrature(r: f64, grid: usize, f: &(dyn Fn(&[f64; 6]) -> f64 + Sync)) -> Result<Quadrature> {
    if !(r > 0.0) || grid == 0 {
        return Err(Error::InvalidScale(r));
    }
    let value = integrate(r, grid, f);
    let refined = integrate(r, grid + 1, f);
    let refinement_ratio = if refined == 0.0 { 0.0 } else { ((refined - value) / refined).abs() };
    Ok(Quadrature { r, grid, value: refined, refined: value, refinement_ratio })
}

/// Energy on B_r with the value from grid + 1 and the grid result kept for
/// the refinement check. Does not fail on disagreement; see
/// [`Quadrature::checked`].
pub fn energy_quadrature(ws: &WarpedStructure, r: f64, grid: usize) -> Result<Quadrature> {
    quadrature(r, grid, &|x| energy_density(ws, x))
}

pub fn area_quadrature(ws: &WarpedStructure, r: f64, grid: usize) -> Result<Quadrature> {
    quadrature(r, grid, &|x| area_density(ws, x))
}

pub fn round_energy(ws: &WarpedStructure, r: f64, grid: usize) -> Result<Quadrature> {
    energy_quadrature(ws, r, grid)?.checked()
}

pub fn graph_area(ws: &WarpedStructure, r: f64, grid: usize) -> Result<Quadrature> {
    area_quadrature(ws, r, grid)?.checked()
}

/// Squared Frobenius norm of the flat derivative of J along z^3.
pub fn flat_gradient_sq(ws: &WarpedStructure, t: C64) -> f64 {
    let h = FD_STEP;
    let dx = (ws.j6(t + C64::new(h, 0.0)) - ws.j6(t - C64::new(h, 0.0))) / (2.0 * h);
    let dy = (ws.j6(t + C64::new(0.0, h)) - ws.j6(t - C64::new(0.0, h))) / (2.0 * h);
    dx.norm_squared() + dy.norm_squared()
}

/// Lower bound for the energy on B_r. The Christoffel part of nabla J is
/// orthogonal to the flat part, so the density is at least
/// |dJ(z^3)|^6, and B_r contains B^4_{r/sqrt 2} x D_{r/sqrt 2}.
pub fn energy_lower_bound(ws: &WarpedStructure, r: f64, grid: usize) -> f64 {
    let a = r / 2f64.sqrt();
    let ball4 = PI * PI / 2.0 * a.powi(4);
    let (nr, nt) = (16 * grid, 16 * grid);
    let umax = (1.0 + a).ln();
    let (du, dt) = (umax / nr as f64, 2.0 * PI / nt as f64);
    let rings: Vec<f64> = (0..nr)
        .into_par_iter()
        .map(|ir| {
            let u = (ir as f64 + 0.5) * du;
            let rho = u.exp() - 1.0;
            let sum: f64 = (0..nt)
                .map(|it| {
                    let th = (it as f64 + 0.5) * dt;
                    flat_gradient_sq(ws, C64::from_polar(rho, th)).powi(3)
                })
                .sum();
            sum * rho * u.exp() * du * dt
        })
        .collect();
    ball4 * rings.iter().sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meromorphic::make_rational;

    fn constant() -> WarpedStructure {
        WarpedStructure::new(make_rational(&[C64::new(1.0, 0.0)], &[]).unwrap())
    }

    #[test]
    fn geometry() {
        let o = [0.0; 6];
        assert_eq!(ChartGeometry::lambda(&o), 2.0);
        // Christoffel symbols against differences of the metric
        let x = [0.3, -0.1, 0.2, 0.5, -0.4, 0.1];
        let h = 1e-6;
        let g = |y: &[f64; 6]| ChartGeometry::lambda(y).powi(2);
        let dg: Vec<f64> = (0..6)
            .map(|k| {
                let (mut p, mut m) = (x, x);
                p[k] += h;
                m[k] -= h;
                (g(&p) - g(&m)) / (2.0 * h)
            })
            .collect();
        for i in 0..6 {
            let gi = ChartGeometry::gamma(&x, i);
            for a in 0..6 {
                for b in 0..6 {
                    // Gamma^a_ib = (1 / 2g)(d_i g delta_ab + d_b g delta_ai - d_a g delta_ib)
                    let d = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
                    let want = (dg[i] * d(a, b) + dg[b] * d(a, i) - dg[a] * d(i, b)) / (2.0 * g(&x));
                    assert!((gi[(a, b)] - want).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn density_depends_on_w_only_through_its_length() {
        let ws = WarpedStructure::new(make_rational(&[C64::new(1.0, 0.0)], &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap());
        let x = [1.0, 0.5, -0.2, 0.3, 0.7, -0.4];
        let y = [0.0, 0.0, (1.25f64 + 0.13).sqrt(), 0.0, 0.7, -0.4];
        let (a, b) = (energy_density(&ws, &x), energy_density(&ws, &y));
        assert!((a - b).abs() < 1e-6 * a);
        // and the cross term vanishes
        let t = C64::new(0.7, -0.4);
        let flat = flat_gradient_sq(&ws, t);
        let rot: f64 = covariant_derivative(&constant(), &x).iter().map(|m| m.norm_squared()).sum();
        assert!(((flat + rot).powi(3) - a).abs() < 1e-6 * a);
    }

    #[test]
    fn quadrature_volumes() {
        // Euclidean ball volume pi^3 r^6 / 6 and round volume of S^6
        let ball = integrate(2.0, 4, &|_| 1.0);
        assert!((ball / (PI.powi(3) * 64.0 / 6.0) - 1.0).abs() < 1e-2);
        let s6 = integrate(400.0, 6, &|x| ChartGeometry::lambda(x).powi(6));
        assert!((s6 / (16.0 * PI.powi(3) / 15.0) - 1.0).abs() < 1e-2, "{s6}");
    }

    #[test]
    fn constant_structure_is_not_parallel_for_the_round_metric() {
        let x = [1.0, 0.5, -0.2, 0.3, 0.7, 0.0];
        assert!(energy_density(&constant(), &x) > 1e-3);
        // radial derivative vanishes
        let d = covariant_derivative(&constant(), &x);
        let rad: M6 = (0..6).fold(M6::zeros(), |acc, i| acc + d[i] * x[i]);
        assert!(rad.amax() < 1e-12);
    }
}
