//! Warped-product structures on R^6: J = J_1(z^3) + J_0 built from the
//! spinor [f0(z^3), f12(z^3), 0, 0], and their checks.

use std::sync::Arc;

use nalgebra::Matrix6;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd::{self, Convergence};
use crate::linalg::{self, RMat};
use crate::meromorphic::{MapKind, MeromorphicMap};
use crate::ocs::{self, OcsMatrix};
use crate::poly;
use crate::spinor::{self, SpinorEven};
use crate::twistor::{self, OcsField, Smoothness, TwistorPoint};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// How the map enters the field. `Conjugated` evaluates f at the complex
/// conjugate of z^3; it is not integrable and serves as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Holomorphic,
    Conjugated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WarpedStructure {
    pub map: MeromorphicMap,
    pub profile: Profile,
}

impl WarpedStructure {
    pub fn new(map: MeromorphicMap) -> Self {
        WarpedStructure { map, profile: Profile::Holomorphic }
    }

    pub fn conjugated(map: MeromorphicMap) -> Self {
        WarpedStructure { map, profile: Profile::Conjugated }
    }

    fn arg(&self, t: C64) -> C64 {
        match self.profile {
            Profile::Holomorphic => t,
            Profile::Conjugated => t.conj(),
        }
    }

    /// Normalized [xi_0 : xi_12] at z^3 = t.
    pub fn pair(&self, t: C64) -> (C64, C64) {
        self.map.pair(self.arg(t))
    }

    /// Unnormalized representative at z^3 = t.
    pub fn raw(&self, t: C64) -> Result<(C64, C64)> {
        self.map.raw(self.arg(t))
    }

    pub fn spinor(&self, z: &[C64]) -> SpinorEven {
        let (a, b) = self.pair(z[2]);
        SpinorEven::new(3, vec![a, b, ZERO, ZERO]).expect("rank 3 spinor")
    }

    pub fn field(&self) -> OcsField {
        let me = Arc::new(self.clone());
        OcsField::new(3, Smoothness::RealAnalytic, move |z| me.spinor(z))
    }

    /// J as a fixed size matrix in real coordinates (x1, y1, x2, y2, x3, y3).
    pub fn j6(&self, t: C64) -> Matrix6<f64> {
        let (a, b) = self.pair(t);
        let block = ocs::product_block(a, b);
        let mut m = Matrix6::zeros();
        m.fixed_view_mut::<4, 4>(0, 0).copy_from(&block);
        m[(4, 5)] = -1.0;
        m[(5, 4)] = 1.0;
        m
    }

    pub fn j_real(&self, x: &[f64]) -> RMat {
        RMat::from_column_slice(6, 6, self.j6(C64::new(x[4], x[5])).as_slice())
    }

    pub fn j_field(&self, z: &[C64]) -> OcsMatrix {
        OcsMatrix::new(self.j_real(&linalg::point_to_real(z))).expect("warped J is an OCS")
    }

    /// |d q / d zbar^3| for the affine coordinate q of the field, from the
    /// analytic derivative of the representative.
    pub fn cr_residual(&self, t: C64) -> Result<f64> {
        let jet = self.map.affine(self.arg(t))?;
        // partials of q along x and y of z^3
        let (dx, dy) = match self.profile {
            Profile::Holomorphic => (jet.dq, linalg::I * jet.dq),
            Profile::Conjugated => (jet.dq, -linalg::I * jet.dq),
        };
        Ok(((dx + linalg::I * dy) * 0.5).norm())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    pub samples: usize,
    pub cr_max: f64,
    pub nijenhuis_max: f64,
    pub nijenhuis: Vec<Convergence>,
    pub all_second_order: bool,
}

pub fn integrability_report(ws: &WarpedStructure, samples: &[[C64; 3]], h: f64) -> Result<IntegrabilityReport> {
    let jf = |x: &[f64]| ws.j_real(x);
    let mut cr_max = 0.0f64;
    let mut nij = Vec::new();
    for z in samples {
        cr_max = cr_max.max(ws.cr_residual(z[2])?);
        let x = linalg::point_to_real(z);
        nij.push(fd::convergence(|hh| fd::nijenhuis(&jf, &x, hh), h));
    }
    Ok(IntegrabilityReport {
        samples: samples.len(),
        cr_max,
        nijenhuis_max: nij.iter().map(|c| c.coarse).fold(0.0, f64::max),
        all_second_order: nij.iter().all(|c| c.second_order),
        nijenhuis: nij,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormReport {
    pub d_omega: f64,
    pub d_omega_fine: f64,
    pub d_star_omega: Convergence,
}

pub fn form_checks(ws: &WarpedStructure, z: &[C64], h: f64) -> FormReport {
    let jf = |x: &[f64]| ws.j_real(x);
    let x = linalg::point_to_real(z);
    FormReport {
        d_omega: fd::d_omega(&jf, &x, h),
        d_omega_fine: fd::d_omega(&jf, &x, h / 2.0),
        d_star_omega: fd::convergence(|hh| fd::d_star_omega(&jf, &x, hh), h),
    }
}

/// (W1, W2, z^3) with W1 = xi_0 z^1 - xi_12 conj(z^2),
/// W2 = xi_0 z^2 + xi_12 conj(z^1), using the unnormalized representative.
pub fn biholo_to_c3(ws: &WarpedStructure, z: &[C64]) -> Result<[C64; 3]> {
    let (a, b) = ws.raw(z[2])?;
    Ok([a * z[0] - b * z[1].conj(), a * z[1] + b * z[0].conj(), z[2]])
}

pub fn inverse_biholo(ws: &WarpedStructure, w: &[C64]) -> Result<[C64; 3]> {
    let (a, b) = ws.raw(w[2])?;
    let n2 = a.norm_sqr() + b.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::NormalizationFailure);
    }
    Ok([(a.conj() * w[0] + b * w[1].conj()) / n2, (a.conj() * w[1] - b * w[0].conj()) / n2, w[2]])
}

/// [xi_0(t), xi_12(t), 0, 0, a, b, t xi_0(t), t xi_12(t)].
pub fn graph_parametrization(ws: &WarpedStructure, a: C64, b: C64, t: C64) -> Result<TwistorPoint> {
    let (x0, x12) = ws.raw(t)?;
    TwistorPoint::new(3, vec![x0, x12, ZERO, ZERO], vec![a, b, t * x0, t * x12])
}

fn rational_parts(ws: &WarpedStructure) -> Result<(&[C64], &[C64])> {
    match (&ws.map.kind, ws.profile) {
        (MapKind::Rational { p0, p12 }, Profile::Holomorphic) => Ok((p0, p12)),
        _ => Err(Error::NotRational),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeReport {
    pub p: usize,
    pub counts: Vec<usize>,
    pub valid: usize,
    pub rejected: usize,
    pub modal: usize,
    pub bidegree: (usize, usize),
}

/// Minimum modulus for the 2x2 elimination minors of a hyperplane triple.
pub const MINOR_TOL: f64 = 1e-8;

fn random_c<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    use rand_distr::{Distribution, StandardNormal};
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Degree of the graph closure in P^7: cut by three random hyperplanes,
/// eliminate (a, b) and count roots in t.
pub fn degree_count<R: Rng + ?Sized>(ws: &WarpedStructure, trials: usize, rng: &mut R) -> Result<DegreeReport> {
    let (p0, p12) = rational_parts(ws)?;
    let t_poly = [ZERO, ONE];
    // the xi and w coordinates as polynomials in t; a and b enter linearly
    let coords: [Vec<C64>; 8] = [
        p0.to_vec(),
        p12.to_vec(),
        vec![],
        vec![],
        vec![],
        vec![],
        poly::mul(&t_poly, p0),
        poly::mul(&t_poly, p12),
    ];
    let mut counts = Vec::new();
    let mut rejected = 0;
    for _ in 0..trials {
        let h: Vec<[C64; 8]> = (0..3).map(|_| std::array::from_fn(|_| random_c(rng))).collect();
        let minor = |r: usize, s: usize| h[r][4] * h[s][5] - h[r][5] * h[s][4];
        let minors = [minor(1, 2), minor(0, 2), minor(0, 1)];
        if minors.iter().any(|m| m.norm() < MINOR_TOL) {
            rejected += 1;
            continue;
        }
        let c: Vec<Vec<C64>> = h
            .iter()
            .map(|hk| coords.iter().zip(hk).fold(vec![], |acc, (poly_k, coef)| poly::add(&acc, &poly::scale(poly_k, *coef))))
            .collect();
        // det [c_k, H_k4, H_k5] by cofactors down the first column
        let det = poly::add(&poly::add(&poly::scale(&c[0], minors[0]), &poly::scale(&c[1], -minors[1])), &poly::scale(&c[2], minors[2]));
        let det = poly::trim(&det);
        let norm = det.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if det.last().is_none_or(|l| l.norm() < MINOR_TOL * norm) {
            rejected += 1;
            continue;
        }
        let mut roots: Vec<C64> = Vec::new();
        for t in poly::roots(&det) {
            // confirm that (a, b) solves all three equations at this root
            let vals: Vec<C64> = c.iter().map(|ck| poly::eval(ck, t)).collect();
            let m00 = h[0][4];
            let m01 = h[0][5];
            let m10 = h[1][4];
            let m11 = h[1][5];
            let d = m00 * m11 - m01 * m10;
            let a = (-vals[0] * m11 + vals[1] * m01) / d;
            let b = (-vals[1] * m00 + vals[0] * m10) / d;
            let res = (vals[2] + h[2][4] * a + h[2][5] * b).norm();
            let scale = vals.iter().map(|v| v.norm()).fold(1.0, f64::max) * (1.0 + a.norm() + b.norm());
            if res <= 1e-6 * scale && !roots.iter().any(|r| (r - t).norm() < 1e-8 * (1.0 + t.norm())) {
                roots.push(t);
            }
        }
        counts.push(roots.len());
    }
    let valid = counts.len();
    if rejected * 2 > trials {
        return Err(Error::DegenerateDraws { bad: rejected, total: trials });
    }
    let mut tally = std::collections::BTreeMap::new();
    for c in &counts {
        *tally.entry(*c).or_insert(0usize) += 1;
    }
    let modal = tally.iter().max_by_key(|(k, v)| (**v, std::cmp::Reverse(**k))).map(|(k, _)| *k).unwrap_or(0);
    Ok(DegreeReport { p: ws.map.degree, counts, valid, rejected, modal, bidegree: (1, ws.map.degree) })
}

/// Number of graph points over the base point z.
pub fn fiber_intersection_count(ws: &WarpedStructure, z: &[C64]) -> Result<usize> {
    let (p0, p12) = rational_parts(ws)?;
    // W3 and W123 of [u, v, 0, 0] at z are linear in (u, v)
    let w_of = |u: C64, v: C64| twistor::w_components(&SpinorEven::new(3, vec![u, v, ZERO, ZERO]).expect("spinor"), z);
    let (e0, e12) = (w_of(ONE, ZERO), w_of(ZERO, ONE));
    let t_poly = [ZERO, ONE];
    let eq = |slot: usize, own: &[C64]| {
        poly::add(&poly::mul(&t_poly, own), &poly::add(&poly::scale(p0, -e0[slot]), &poly::scale(p12, -e12[slot])))
    };
    let (q1, q2) = (poly::trim(&eq(2, p0)), poly::trim(&eq(3, p12)));
    let size = |q: &[C64], t: C64| q.iter().enumerate().map(|(k, c)| c.norm() * t.norm().powi(k as i32)).sum::<f64>();
    let lead = if q1.len() >= q2.len() { &q1 } else { &q2 };
    let mut roots: Vec<C64> = Vec::new();
    for t in poly::roots(lead) {
        let ok = [&q1, &q2].iter().all(|q| poly::eval(q, t).norm() <= 1e-8 * size(q, t).max(1e-300));
        if ok && !roots.iter().any(|r| (r - t).norm() < 1e-8 * (1.0 + t.norm())) {
            roots.push(t);
        }
    }
    Ok(roots.len())
}

/// Max over a grid of ||J(z + w) - J(z)|| for both lattice generators w,
/// with the shift applied to z^3.
pub fn torus_invariance_check(ws: &WarpedStructure, grid: usize) -> Result<f64> {
    let MapKind::Elliptic { lattice, .. } = &ws.map.kind else {
        return Err(Error::NotElliptic);
    };
    let mut worst = 0.0f64;
    for i in 0..grid {
        for j in 0..grid {
            let t = lattice.at((i as f64 + 0.3) / grid as f64, (j as f64 + 0.7) / grid as f64);
            let z = [C64::new(0.4, -0.3), C64::new(-0.2, 0.9), t];
            let base = ws.j_real(&linalg::point_to_real(&z));
            for w in [lattice.w1, lattice.w2] {
                let shifted = [z[0], z[1], t + w];
                let d = ws.j_real(&linalg::point_to_real(&shifted)) - &base;
                worst = worst.max(linalg::op_norm(&d));
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ray {
    pub base: [C64; 3],
    pub dir: [C64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayReport {
    pub ray: Ray,
    /// Operator norm change between consecutive radii.
    pub steps: Vec<(f64, f64)>,
    pub limit: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub rays: Vec<RayReport>,
    pub max_deviation: f64,
}

pub fn asymptotic_probe(ws: &WarpedStructure, rays: &[Ray], radii: &[f64]) -> ProbeReport {
    let mut reports = Vec::new();
    let mut limits = Vec::new();
    for ray in rays {
        let at = |r: f64| {
            let z: Vec<C64> = ray.base.iter().zip(&ray.dir).map(|(b, d)| b + d * r).collect();
            ws.j_real(&linalg::point_to_real(&z))
        };
        let mats: Vec<RMat> = radii.iter().map(|&r| at(r)).collect();
        let steps = radii.iter().zip(&mats).skip(1).zip(&mats).map(|((r, m), prev)| (*r, linalg::op_norm(&(m - prev)))).collect();
        let last = mats.last().cloned().unwrap_or_else(|| at(1.0));
        reports.push(RayReport { ray: ray.clone(), steps, limit: last.transpose().as_slice().to_vec() });
        limits.push(last);
    }
    let mut dev = 0.0f64;
    for a in 0..limits.len() {
        for b in a + 1..limits.len() {
            dev = dev.max(linalg::op_norm(&(&limits[a] - &limits[b])));
        }
    }
    ProbeReport { rays: reports, max_deviation: dev }
}

/// A rank-4 spinor field on C^4 given componentwise in the canonical
/// order ("", 12, 13, 14, 23, 24, 34, 1234).
#[derive(Clone)]
pub struct Warped8 {
    eval: Arc<dyn Fn(&[C64]) -> [C64; 8] + Send + Sync>,
}

impl std::fmt::Debug for Warped8 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Warped8")
    }
}

impl Warped8 {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&[C64]) -> [C64; 8] + Send + Sync + 'static,
    {
        Warped8 { eval: Arc::new(f) }
    }

    /// [xi_0(z3, z4), xi_12(z3, z4), 0, ...].
    pub fn doubly_warped<F>(f: F) -> Self
    where
        F: Fn(C64, C64) -> (C64, C64) + Send + Sync + 'static,
    {
        Warped8::new(move |z| {
            let (a, b) = f(z[2], z[3]);
            [a, b, ZERO, ZERO, ZERO, ZERO, ZERO, ZERO]
        })
    }

    pub fn spinor(&self, z: &[C64]) -> Result<SpinorEven> {
        let s = SpinorEven::new(4, (self.eval)(z).to_vec())?;
        let n2 = s.norm() * s.norm();
        let worst = spinor::quadric_residuals(&s).iter().fold(0.0f64, |a, r| a.max(r.norm()));
        if !(worst <= 1e-10 * n2) {
            return Err(Error::QuadricViolation(worst / n2));
        }
        Ok(s)
    }

    pub fn j_real(&self, x: &[f64]) -> Result<RMat> {
        let s = self.spinor(&linalg::real_to_point(x))?;
        Ok(ocs::ocs_from_spinor(&s)?.into_matrix())
    }
}

pub fn warped8_field(w: &Warped8, z: &[C64]) -> Result<OcsMatrix> {
    ocs::ocs_from_spinor(&w.spinor(z)?)
}

/// Nijenhuis residual of a rank-4 field at h and h/2.
pub fn warped8_nijenhuis(w: &Warped8, z: &[C64], h: f64) -> Result<Convergence> {
    w.spinor(z)?;
    let jf = |x: &[f64]| w.j_real(x).unwrap_or_else(|_| RMat::from_element(8, 8, f64::NAN));
    let x = linalg::point_to_real(z);
    Ok(fd::convergence(|hh| fd::nijenhuis(&jf, &x, hh), h))
}
