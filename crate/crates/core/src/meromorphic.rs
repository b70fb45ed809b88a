//! Maps f: C -> P^1 given by a pair of holomorphic representatives
//! [f0 : f12], either polynomials or polynomials in (wp, wp').

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::elliptic::{EllipticLattice, Recipe};
use crate::error::{Error, Result};
use crate::poly;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Relative resultant below which two polynomials share a root.
pub const COPRIME_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    Rational { p0: Vec<C64>, p12: Vec<C64> },
    Elliptic { lattice: Arc<EllipticLattice>, f0: Recipe, f12: Recipe },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeromorphicMap {
    pub kind: MapKind,
    pub degree: usize,
    /// The map is constant.
    pub degenerate: bool,
}

/// Affine coordinate of f in the better chart and its complex derivative.
/// `swapped` means the chart [-1/q : 1], i.e. q = -f0/f12.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AffineJet {
    pub swapped: bool,
    pub q: C64,
    pub dq: C64,
}

pub fn make_rational(p0: &[C64], p12: &[C64]) -> Result<MeromorphicMap> {
    let (p0, p12) = (poly::trim(p0), poly::trim(p12));
    match (p0.is_empty(), p12.is_empty()) {
        (true, true) => return Err(Error::BothZero),
        (false, false) => {
            let r = poly::relative_resultant(&p0, &p12).expect("nonzero");
            if r < COPRIME_TOL {
                return Err(Error::CommonRoot(r));
            }
        }
        // gcd(p, 0) = p, so the other one must be a nonzero constant
        (true, false) | (false, true) => {
            let other = if p0.is_empty() { &p12 } else { &p0 };
            if other.len() > 1 {
                return Err(Error::CommonRoot(0.0));
            }
        }
    }
    let degree = p0.len().max(p12.len()).saturating_sub(1);
    Ok(MeromorphicMap { kind: MapKind::Rational { p0, p12 }, degree, degenerate: degree == 0 })
}

/// Number of seeds per side in the common-zero scan.
pub const SCAN_GRID: usize = 64;

pub fn elliptic_map(lattice: Arc<EllipticLattice>, f0: Recipe, f12: Recipe) -> Result<MeromorphicMap> {
    if f0.is_zero() && f12.is_zero() {
        return Err(Error::BothZero);
    }
    let degree = f0.pole_order().max(f12.pole_order()) as usize;
    let map = MeromorphicMap { kind: MapKind::Elliptic { lattice, f0, f12 }, degree, degenerate: false };
    let degenerate = map.is_constant();
    if !degenerate {
        map.scan_common_zeros()?;
    }
    Ok(MeromorphicMap { degenerate, ..map })
}

/// Newton iteration for a zero of g, returning the limit if it converged.
fn newton(g: &dyn Fn(C64) -> Option<(C64, C64)>, mut z: C64, scale: f64) -> Option<C64> {
    for _ in 0..200 {
        let (v, dv) = g(z)?;
        if v.norm() == 0.0 {
            return Some(z);
        }
        if dv.norm() == 0.0 {
            return None;
        }
        let step = v / dv;
        z -= step;
        if step.norm() < 1e-15 * scale {
            return Some(z);
        }
    }
    None
}

impl MeromorphicMap {
    /// Unnormalized representative (f0, f12) and its derivative.
    pub fn jet(&self, t: C64) -> Result<[(C64, C64); 2]> {
        match &self.kind {
            MapKind::Rational { p0, p12 } => Ok([
                (poly::eval(p0, t), poly::eval(p12, t)),
                (poly::eval(&poly::derivative(p0), t), poly::eval(&poly::derivative(p12), t)),
            ]),
            MapKind::Elliptic { lattice, f0, f12 } => {
                let (p, dp) = lattice.wp_both(t)?;
                Ok([
                    (f0.eval(p, dp), f12.eval(p, dp)),
                    (f0.derivative(p, dp, lattice.g2), f12.derivative(p, dp, lattice.g2)),
                ])
            }
        }
    }

    /// Unnormalized representative.
    pub fn raw(&self, t: C64) -> Result<(C64, C64)> {
        match &self.kind {
            MapKind::Rational { p0, p12 } => Ok((poly::eval(p0, t), poly::eval(p12, t))),
            MapKind::Elliptic { lattice, f0, f12 } => {
                let (p, dp) = lattice.wp_both(t)?;
                Ok((f0.eval(p, dp), f12.eval(p, dp)))
            }
        }
    }

    /// Representative scaled so the larger entry has modulus 1. Defined
    /// everywhere: at lattice points the Laurent leading terms are used.
    pub fn pair(&self, t: C64) -> (C64, C64) {
        let (a, b) = match self.raw(t) {
            Ok(v) => v,
            Err(_) => match &self.kind {
                MapKind::Elliptic { f0, f12, .. } => {
                    let k = self.degree as u32;
                    let (a, b) = (f0.leading(k), f12.leading(k));
                    if a.norm() + b.norm() > 0.0 {
                        (a, b)
                    } else {
                        // leading terms cancel; step off the pole
                        return self.pair(t + C64::new(2e-6, 0.0));
                    }
                }
                MapKind::Rational { .. } => unreachable!("polynomials have no poles"),
            },
        };
        let k = a.norm().max(b.norm());
        if k == 0.0 || !k.is_finite() {
            return (C64::new(1.0, 0.0), ZERO);
        }
        (a / k, b / k)
    }

    pub fn affine(&self, t: C64) -> Result<AffineJet> {
        let [(x0, x12), (d0, d12)] = self.jet(t)?;
        if x0.norm() >= x12.norm() {
            if x0.norm() == 0.0 {
                return Err(Error::NormalizationFailure);
            }
            Ok(AffineJet { swapped: false, q: x12 / x0, dq: (d12 * x0 - x12 * d0) / (x0 * x0) })
        } else {
            Ok(AffineJet { swapped: true, q: -x0 / x12, dq: -(d0 * x12 - x0 * d12) / (x12 * x12) })
        }
    }

    fn lattice(&self) -> Option<&EllipticLattice> {
        match &self.kind {
            MapKind::Elliptic { lattice, .. } => Some(lattice),
            MapKind::Rational { .. } => None,
        }
    }

    fn sample_points(&self, k: usize) -> Vec<C64> {
        match self.lattice() {
            Some(l) => (0..k * k)
                .map(|i| l.at(((i / k) as f64 + 0.37) / k as f64, ((i % k) as f64 + 0.61) / k as f64))
                .collect(),
            None => (0..k * k).map(|i| C64::new((i / k) as f64 - 0.43 * k as f64, (i % k) as f64 - 0.52 * k as f64) * 0.3).collect(),
        }
    }

    fn is_constant(&self) -> bool {
        let mut big = 0.0f64;
        let mut wronskian = 0.0f64;
        for t in self.sample_points(6) {
            if let Ok([(a, b), (da, db)]) = self.jet(t) {
                let k = a.norm().max(b.norm());
                if k == 0.0 {
                    continue;
                }
                wronskian = wronskian.max(((a * db - b * da) / (k * k)).norm());
                big = big.max((da.norm() + db.norm()) / k);
            }
        }
        wronskian <= 1e-12 * big.max(1.0)
    }

    /// Newton from every local minimum of |f0| + |f12| on the seed grid;
    /// a zero of one component where the other also vanishes is a common
    /// zero.
    fn scan_common_zeros(&self) -> Result<()> {
        let MapKind::Elliptic { lattice, f0, f12 } = &self.kind else {
            return Ok(());
        };
        let k = SCAN_GRID;
        let at = |i: usize, j: usize| lattice.at((i % k) as f64 / k as f64 + 0.5 / k as f64, (j % k) as f64 / k as f64 + 0.5 / k as f64);
        let size = |i: usize, j: usize| match self.raw(at(i, j)) {
            Ok((a, b)) => a.norm() + b.norm(),
            Err(_) => f64::INFINITY,
        };
        let vals: Vec<f64> = (0..k * k).map(|q| size(q / k, q % k)).collect();
        let scale = lattice.w1.norm().max(lattice.w2.norm());
        // typical size of wp on this lattice
        let p_ref = 1.0 + lattice.g2.norm().sqrt() + lattice.g3.norm().cbrt();
        for i in 0..k {
            for j in 0..k {
                let v = vals[i * k + j];
                let is_min = (0..9).filter(|d| *d != 4).all(|d| {
                    let (ni, nj) = ((i + k + d / 3 - 1) % k, (j + k + d % 3 - 1) % k);
                    v <= vals[ni * k + nj]
                });
                if !is_min {
                    continue;
                }
                for (g, other) in [(f0, f12), (f12, f0)] {
                    if g.pole_order() == 0 {
                        continue;
                    }
                    let gf = |z: C64| lattice.wp_both(z).ok().map(|(p, dp)| (g.eval(p, dp), g.derivative(p, dp, lattice.g2)));
                    let Some(z) = newton(&gf, at(i, j), scale) else { continue };
                    let Ok((p, dp)) = lattice.wp_both(z) else { continue };
                    let mag: f64 = other
                        .terms
                        .iter()
                        .map(|(c, a, b)| c.norm() * p.norm().max(p_ref).powi(*a as i32) * dp.norm().max(p_ref.powf(1.5)).powi(*b as i32))
                        .sum();
                    if other.eval(p, dp).norm() <= 1e-7 * mag.max(1e-300) {
                        return Err(Error::CommonZeroDetected(format!("z = {:.6}{:+.6}i", z.re, z.im)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of distinct t in one fundamental domain with f(t) = [a : b].
    pub fn preimage_count(&self, target: (C64, C64)) -> Result<usize> {
        let Some(lattice) = self.lattice() else {
            return Err(Error::NotElliptic);
        };
        let (a, b) = target;
        let g = |z: C64| {
            self.jet(z).ok().map(|[(x0, x12), (d0, d12)]| (b * x0 - a * x12, b * d0 - a * d12))
        };
        let scale = lattice.w1.norm().max(lattice.w2.norm());
        // real coordinates (s, t) with z = s w1 + t w2
        let det = lattice.w1.re * lattice.w2.im - lattice.w1.im * lattice.w2.re;
        let reduce = |z: C64| {
            let s = (z.re * lattice.w2.im - z.im * lattice.w2.re) / det;
            let t = (lattice.w1.re * z.im - lattice.w1.im * z.re) / det;
            (s.rem_euclid(1.0), t.rem_euclid(1.0))
        };
        let mut found: Vec<(f64, f64)> = Vec::new();
        let k = 24;
        for i in 0..k {
            for j in 0..k {
                let seed = lattice.at((i as f64 + 0.5) / k as f64, (j as f64 + 0.5) / k as f64);
                let Some(z) = newton(&g, seed, scale) else { continue };
                let Some((v, _)) = g(z) else { continue };
                if !(v.norm() < 1e-8) {
                    continue;
                }
                let (s, t) = reduce(z);
                let close = |u: f64, w: f64| {
                    let d = (u - w).abs();
                    d.min(1.0 - d) < 1e-6
                };
                if !found.iter().any(|&(u, w)| close(u, s) && close(w, t)) {
                    found.push((s, t));
                }
            }
        }
        Ok(found.len())
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            MapKind::Rational { p0, p12 } => format!("rational [{p0:?} : {p12:?}]"),
            MapKind::Elliptic { f0, f12, .. } => format!("elliptic [{:?} : {:?}]", f0.terms, f12.terms),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn rational_validation() {
        assert_eq!(make_rational(&r(&[1.0]), &r(&[0.0])).unwrap().degree, 0);
        assert_eq!(make_rational(&r(&[1.0]), &r(&[0.0, 1.0])).unwrap().degree, 1);
        assert_eq!(make_rational(&r(&[1.0, 0.0, 1.0]), &r(&[0.0, 1.0])).unwrap().degree, 2);
        assert!(matches!(make_rational(&r(&[-1.0, 0.0, 1.0]), &r(&[-1.0, 1.0])), Err(Error::CommonRoot(_))));
        assert!(matches!(make_rational(&r(&[0.0, 1.0]), &r(&[])), Err(Error::CommonRoot(_))));
        assert!(matches!(make_rational(&r(&[0.0]), &r(&[])), Err(Error::BothZero)));
    }

    #[test]
    fn affine_chart_switches_at_the_unit_circle() {
        let f = make_rational(&r(&[1.0]), &r(&[0.0, 1.0])).unwrap();
        let a = f.affine(C64::new(0.5, 0.0)).unwrap();
        assert!(!a.swapped && (a.q - 0.5).norm() < 1e-15 && (a.dq - 1.0).norm() < 1e-15);
        let b = f.affine(C64::new(2.0, 0.0)).unwrap();
        assert!(b.swapped && (b.q + 0.5).norm() < 1e-15 && (b.dq - 0.25).norm() < 1e-15);
    }

    #[test]
    fn elliptic_maps() {
        let sq = Arc::new(EllipticLattice::square());
        let f = elliptic_map(sq.clone(), Recipe::parse("1").unwrap(), Recipe::parse("wp").unwrap()).unwrap();
        assert_eq!(f.degree, 2);
        assert!(!f.degenerate);
        assert_eq!(f.preimage_count((C64::new(1.0, 0.0), C64::new(0.7, 0.3))).unwrap(), 2);
        // at a lattice point the pair is [0 : 1]
        let (a, b) = f.pair(C64::new(1.0, 1.0));
        assert!(a.norm() < 1e-15 && (b.norm() - 1.0).abs() < 1e-15);

        let c = elliptic_map(sq.clone(), Recipe::parse("1").unwrap(), Recipe::parse("0").unwrap()).unwrap();
        assert!(c.degenerate);

        // on the square lattice wp and wp' share the zero (1+i)/2
        let e = elliptic_map(sq, Recipe::parse("wp").unwrap(), Recipe::parse("wpp").unwrap());
        assert!(matches!(e, Err(Error::CommonZeroDetected(_))));
        let gen = Arc::new(EllipticLattice::new(C64::new(1.0, 0.0), C64::new(0.3, 1.1), 40).unwrap());
        let g = elliptic_map(gen, Recipe::parse("wp").unwrap(), Recipe::parse("wpp").unwrap()).unwrap();
        assert_eq!(g.degree, 3);
        assert_eq!(g.preimage_count((C64::new(1.0, 0.0), C64::new(0.4, -0.9))).unwrap(), 3);
    }
}
