//! Weierstrass functions of a lattice and doubly periodic maps to P^1
//! built as polynomials in (wp, wp').
//!
//! Lattice sums are summed row by row: each row m + n tau is summed in
//! closed form with csc^2, leaving an exponentially convergent sum over
//! rows |n - n0| <= truncation.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Rows whose imaginary offset exceeds this contribute below 1e-19.
const ROW_CUTOFF: f64 = 7.2;

/// Distance below which wp refuses to evaluate.
pub const POLE_RADIUS: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub w1: [f64; 2],
    pub w2: [f64; 2],
    pub truncation: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticLattice {
    pub w1: C64,
    pub w2: C64,
    pub truncation: usize,
    pub g2: C64,
    pub g3: C64,
    /// Bound on the rows left out of the wp sum.
    pub tail_bound: f64,
    tau: C64,
    offset: C64,
}

/// csc^2(pi x) and cot(pi x) through exponentials that stay bounded.
fn csc2_cot(x: C64) -> (C64, C64) {
    if x.im >= 0.0 {
        let p = (2.0 * PI * I * x).exp();
        let d = ONE - p;
        (-4.0 * p / (d * d), I * (p + ONE) / (p - ONE))
    } else {
        let q = (-2.0 * PI * I * x).exp();
        let d = ONE - q;
        (-4.0 * q / (d * d), -I * (q + ONE) / (q - ONE))
    }
}

impl EllipticLattice {
    pub fn new(w1: C64, w2: C64, truncation: usize) -> Result<Self> {
        if w1.norm() == 0.0 || !(w2 / w1).im.is_finite() || (w2 / w1).im <= 0.0 {
            return Err(Error::BadLattice("need Im(w2/w1) > 0".into()));
        }
        if truncation == 0 {
            return Err(Error::BadLattice("truncation must be positive".into()));
        }
        let tau = w2 / w1;
        let k = truncation as i64;
        // sum over n != 0 of csc^2(pi n tau)
        let mut offset = ZERO;
        let (mut s4, mut s6) = (ZERO, ZERO);
        for n in (-k..=k).filter(|&n| n != 0) {
            let (c, _) = csc2_cot(tau * n as f64);
            offset += c;
            s4 += c * (3.0 * c - 2.0) * PI.powi(4) / 3.0;
            s6 += c * (15.0 * c * c - 15.0 * c + 2.0) * PI.powi(6) / 15.0;
        }
        let g4 = (s4 + PI.powi(4) / 45.0) / w1.powi(4);
        let g6 = (s6 + 2.0 * PI.powi(6) / 945.0) / w1.powi(6);
        let q = (-2.0 * PI * tau.im).exp();
        let qh = (-PI * tau.im).exp();
        let tail_bound = (PI / w1.norm()).powi(2) * 16.0 * (-2.0 * PI * (truncation as f64 + 0.5) * tau.im).exp()
            / ((1.0 - q) * (1.0 - qh) * (1.0 - qh))
            + (PI / w1.norm()).powi(2) * 2.0 * 4.1 * (-2.0 * PI * ROW_CUTOFF).exp() / (1.0 - q);
        let lat = EllipticLattice { w1, w2, truncation, g2: 60.0 * g4, g3: 140.0 * g6, tail_bound, tau, offset };
        let worst = lat.validate();
        if !(worst < 1e-8) {
            return Err(Error::BadLattice(format!("differential equation residual {worst:.2e}")));
        }
        Ok(lat)
    }

    pub fn from_spec(s: &LatticeSpec) -> Result<Self> {
        Self::new(C64::new(s.w1[0], s.w1[1]), C64::new(s.w2[0], s.w2[1]), s.truncation)
    }

    pub fn spec(&self) -> LatticeSpec {
        LatticeSpec { w1: [self.w1.re, self.w1.im], w2: [self.w2.re, self.w2.im], truncation: self.truncation }
    }

    /// Square lattice Z + iZ with the default truncation.
    pub fn square() -> Self {
        Self::new(ONE, I, 40).expect("square lattice")
    }

    /// Differential-equation residual on a 5x5 interior grid, scaled by
    /// 1 + |wp|^3.
    fn validate(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 1..=5 {
            for b in 1..=5 {
                let z = self.w1 * (a as f64 / 6.0) + self.w2 * (b as f64 / 6.0 + 0.013);
                if let Ok((p, dp)) = self.wp_both(z) {
                    let r = (dp * dp - (4.0 * p * p * p - self.g2 * p - self.g3)).norm();
                    worst = worst.max(r / (1.0 + p.norm().powi(3)));
                }
            }
        }
        worst
    }

    /// Distance from z to the nearest lattice point.
    pub fn lattice_distance(&self, z: C64) -> f64 {
        let u = z / self.w1;
        let n0 = (u.im / self.tau.im).round() as i64;
        let mut best = f64::INFINITY;
        for n in n0 - 1..=n0 + 1 {
            let v = u - self.tau * n as f64;
            let m0 = v.re.round();
            for m in [m0 - 1.0, m0, m0 + 1.0] {
                best = best.min(((v - m) * self.w1).norm());
            }
        }
        best
    }

    /// (wp(z), wp'(z)).
    pub fn wp_both(&self, z: C64) -> Result<(C64, C64)> {
        let d = self.lattice_distance(z);
        if d < POLE_RADIUS {
            return Err(Error::PoleProximity(d));
        }
        let u = z / self.w1;
        let n0 = (-u.im / self.tau.im).round() as i64;
        let k = self.truncation as i64;
        let (mut s, mut ds) = (ZERO, ZERO);
        for n in n0 - k..=n0 + k {
            let x = u + self.tau * n as f64;
            // |csc^2| <= 4.1 exp(-2 pi |Im x|) here, far below rounding
            if x.im.abs() > ROW_CUTOFF {
                continue;
            }
            let (c, ct) = csc2_cot(x);
            s += c;
            ds += -2.0 * ct * c;
        }
        let f = PI / self.w1;
        Ok((f * f * (s - self.offset - 1.0 / 3.0), f * f * f * ds))
    }

    pub fn wp(&self, z: C64) -> Result<C64> {
        Ok(self.wp_both(z)?.0)
    }

    pub fn wp_prime(&self, z: C64) -> Result<C64> {
        Ok(self.wp_both(z)?.1)
    }

    /// z = s w1 + t w2.
    pub fn at(&self, s: f64, t: f64) -> C64 {
        self.w1 * s + self.w2 * t
    }
}

/// Sum of c * wp^a * wp'^b.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Recipe {
    pub terms: Vec<(C64, u32, u32)>,
}

impl Recipe {
    pub fn constant(c: C64) -> Self {
        Recipe { terms: vec![(c, 0, 0)] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.0.norm() == 0.0)
    }

    /// Pole order at lattice points.
    pub fn pole_order(&self) -> u32 {
        self.terms.iter().filter(|t| t.0.norm() > 0.0).map(|t| 2 * t.1 + 3 * t.2).max().unwrap_or(0)
    }

    pub fn eval(&self, p: C64, dp: C64) -> C64 {
        self.terms.iter().map(|(c, a, b)| c * p.powu(*a) * dp.powu(*b)).sum()
    }

    /// d/dz using wp'' = 6 wp^2 - g2/2.
    pub fn derivative(&self, p: C64, dp: C64, g2: C64) -> C64 {
        let ddp = 6.0 * p * p - g2 / 2.0;
        self.terms
            .iter()
            .map(|(c, a, b)| {
                let mut v = ZERO;
                if *a > 0 {
                    v += c * (*a as f64) * p.powu(a - 1) * dp.powu(*b) * dp;
                }
                if *b > 0 {
                    v += c * (*b as f64) * p.powu(*a) * dp.powu(b - 1) * ddp;
                }
                v
            })
            .sum()
    }

    /// Coefficient of u^{-order} in the Laurent expansion at 0
    /// (u^2 wp -> 1, u^3 wp' -> -2).
    pub fn leading(&self, order: u32) -> C64 {
        self.terms
            .iter()
            .filter(|t| 2 * t.1 + 3 * t.2 == order)
            .map(|(c, _, b)| c * (-2.0f64).powi(*b as i32))
            .sum()
    }

    /// Parses "+"-separated monomials such as "2*wp^2", "wpp", "1", "-wp".
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.replace(' ', "");
        if s.is_empty() {
            return Err(Error::Parse("empty recipe".into()));
        }
        let mut terms = Vec::new();
        let mut chunk = String::new();
        let mut pieces = Vec::new();
        for (k, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && k > 0 && !chunk.ends_with(['e', 'E', '*', '^']) {
                pieces.push(std::mem::take(&mut chunk));
            }
            chunk.push(ch);
        }
        pieces.push(chunk);
        for piece in pieces {
            let (sign, body) = match piece.strip_prefix('-') {
                Some(b) => (-1.0, b.to_string()),
                None => (1.0, piece.trim_start_matches('+').to_string()),
            };
            let mut coef = C64::new(sign, 0.0);
            let (mut a, mut b) = (0u32, 0u32);
            for factor in body.split('*') {
                let (name, pow) = match factor.split_once('^') {
                    Some((n, p)) => (n, p.parse::<u32>().map_err(|_| Error::Parse(format!("bad power in {factor:?}")))?),
                    None => (factor, 1),
                };
                match name {
                    "wp" => a += pow,
                    "wpp" => b += pow,
                    _ => {
                        let c = crate::poly::parse_scalar(name).map_err(Error::Parse)?;
                        coef *= c.powu(pow);
                    }
                }
            }
            terms.push((coef, a, b));
        }
        Ok(Recipe { terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eisenstein(l: &EllipticLattice) -> (C64, C64) {
        // q-expansions: G4 = pi^4/45 (1 + 240 sum s3(n) q^n),
        // G6 = 2 pi^6/945 (1 - 504 sum s5(n) q^n), q = exp(2 pi i tau)
        let tau = l.w2 / l.w1;
        let q = (2.0 * PI * I * tau).exp();
        let (mut a, mut b) = (ZERO, ZERO);
        for n in 1..60u32 {
            let divs = (1..=n).filter(|d| n % d == 0);
            let s3: f64 = divs.clone().map(|d| (d as f64).powi(3)).sum();
            let s5: f64 = divs.map(|d| (d as f64).powi(5)).sum();
            a += s3 * q.powu(n);
            b += s5 * q.powu(n);
        }
        let g4 = PI.powi(4) / 45.0 * (1.0 + 240.0 * a) / l.w1.powi(4);
        let g6 = 2.0 * PI.powi(6) / 945.0 * (1.0 - 504.0 * b) / l.w1.powi(6);
        (60.0 * g4, 140.0 * g6)
    }

    #[test]
    fn invariants_match_q_series() {
        for (w1, w2) in [(ONE, I), (C64::new(1.0, 0.0), C64::new(0.3, 1.1)), (C64::new(0.8, 0.4), C64::new(-0.2, 1.3))] {
            let l = EllipticLattice::new(w1, w2, 40).unwrap();
            let (g2, g3) = eisenstein(&l);
            assert!((l.g2 - g2).norm() < 1e-10 * g2.norm().max(1.0));
            assert!((l.g3 - g3).norm() < 1e-10 * g3.norm().max(1.0));
        }
        // square lattice: g3 = 0
        assert!(EllipticLattice::square().g3.norm() < 1e-10);
    }

    #[test]
    fn parity_periodicity_and_pole() {
        let l = EllipticLattice::new(ONE, C64::new(0.3, 1.1), 40).unwrap();
        let z = C64::new(0.23, 0.41);
        assert!((l.wp(-z).unwrap() - l.wp(z).unwrap()).norm() < 1e-10);
        assert!((l.wp_prime(-z).unwrap() + l.wp_prime(z).unwrap()).norm() < 1e-9);
        for m in -3..=3 {
            for n in -3..=3 {
                let w = l.wp(z + l.w1 * m as f64 + l.w2 * n as f64).unwrap();
                assert!((w - l.wp(z).unwrap()).norm() < 1e-8);
            }
        }
        assert!(matches!(l.wp(l.w1 + l.w2 * 2.0), Err(Error::PoleProximity(_))));
        let near = l.wp(C64::new(1e-3, 0.0)).unwrap();
        assert!((near * 1e-6 - ONE).norm() < 1e-3);
        assert!(l.tail_bound < 1e-15);
    }

    #[test]
    fn recipe_parsing() {
        let r = Recipe::parse("wp^2 - 2*wpp + 3").unwrap();
        assert_eq!(r.terms, vec![(ONE, 2, 0), (C64::new(-2.0, 0.0), 0, 1), (C64::new(3.0, 0.0), 0, 0)]);
        assert_eq!(r.pole_order(), 4);
        assert_eq!(r.leading(4), ONE);
        assert_eq!(Recipe::parse("wpp").unwrap().leading(3), C64::new(-2.0, 0.0));
        assert!(Recipe::parse("wq").is_err());
    }
}
