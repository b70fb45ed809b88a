//! The warped-structure checks shared by `warped` and `demo`.

use std::sync::Arc;

use anyhow::{anyhow, bail, Result};
use rand_chacha::ChaCha8Rng;
use twistor_core::elliptic::{EllipticLattice, LatticeSpec, Recipe};
use twistor_core::meromorphic::{elliptic_map, make_rational, MapKind};
use twistor_core::warped::{self, Ray, WarpedStructure};
use twistor_core::{energy, fd, linalg, poly, sample, C64};

use crate::report::{Report, TableRow};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Copy, Debug, Default)]
pub struct Checks {
    pub degree: bool,
    pub energy: bool,
    pub area: bool,
    pub integrability: bool,
    pub forms: bool,
    pub biholo: bool,
    pub probe: bool,
    pub torus: bool,
}

impl Checks {
    pub fn any(&self) -> bool {
        self.degree || self.energy || self.area || self.integrability || self.forms || self.biholo || self.probe || self.torus
    }

    /// Cheap checks that make sense for the given map.
    pub fn defaults(ws: &WarpedStructure) -> Self {
        let rational = matches!(ws.map.kind, MapKind::Rational { .. });
        Checks { integrability: true, forms: true, probe: true, degree: rational, torus: !rational, ..Default::default() }
    }
}

pub struct Params {
    pub radius: f64,
    pub grid: usize,
    pub trials: usize,
}

/// "p0;p12" with comma-separated coefficients, constant term first.
pub fn parse_rational(spec: &str) -> Result<WarpedStructure> {
    let (a, b) = spec.split_once(';').ok_or_else(|| anyhow!("expected \"p0;p12\", got {spec:?}"))?;
    let p0 = poly::parse(a).map_err(|e| anyhow!("p0: {e}"))?;
    let p12 = poly::parse(b).map_err(|e| anyhow!("p12: {e}"))?;
    Ok(WarpedStructure::new(make_rational(&p0, &p12)?))
}

/// "f0,f12" recipes in wp and wpp over the given lattice (square if None).
pub fn parse_elliptic(spec: &str, lattice: Option<&str>) -> Result<WarpedStructure> {
    let (a, b) = spec.split_once(',').ok_or_else(|| anyhow!("expected \"f0,f12\", got {spec:?}"))?;
    let lat = match lattice {
        None => EllipticLattice::square(),
        Some(js) => {
            let s: LatticeSpec = serde_json::from_str(js).map_err(|e| anyhow!("lattice: {e}"))?;
            EllipticLattice::from_spec(&s)?
        }
    };
    Ok(WarpedStructure::new(elliptic_map(Arc::new(lat), Recipe::parse(a)?, Recipe::parse(b)?)?))
}

fn is_constant(ws: &WarpedStructure) -> bool {
    ws.map.degree == 0 || ws.map.degenerate
}

fn is_rational(ws: &WarpedStructure) -> bool {
    matches!(ws.map.kind, MapKind::Rational { .. })
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

// t values chosen off the lattice for the elliptic case
fn samples() -> [[C64; 3]; 3] {
    [
        [c(0.3, -0.2), c(0.1, 0.4), c(0.31, 0.27)],
        [c(-1.0, 0.5), c(0.2, 0.3), c(0.62, -0.41)],
        [c(0.7, 0.7), c(-0.4, 0.1), c(1.37, 0.18)],
    ]
}

fn radii(max: f64) -> Vec<f64> {
    let mut out = vec![];
    let mut r = 4.0f64.min(max);
    while r <= max * (1.0 + 1e-12) {
        out.push(r);
        r *= 2.0;
    }
    out
}

fn table(rows: &[TableRow]) -> Vec<TableRow> {
    rows.iter().map(|r| TableRow { r: r.r, grid: r.grid, value: r.value, refinement_ratio: r.refinement_ratio }).collect()
}

fn quadrature_table(
    ws: &WarpedStructure,
    rs: &[f64],
    grid: usize,
    q: fn(&WarpedStructure, f64, usize) -> twistor_core::Result<energy::Quadrature>,
) -> Result<Vec<TableRow>> {
    rs.iter()
        .map(|&r| {
            let v = q(ws, r, grid)?;
            Ok(TableRow { r, grid: v.grid, value: v.value, refinement_ratio: v.refinement_ratio })
        })
        .collect()
}

/// Verdict on a table: convergence for rational maps, growth for elliptic ones.
fn judge_table(rep: &mut Report, name: &str, ws: &WarpedStructure, rows: &[TableRow]) {
    if rows.len() < 2 {
        rep.data(&format!("{name}_note"), "need at least two radii for a verdict");
        return;
    }
    let (a, b) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
    if is_rational(ws) {
        rep.below(&format!("{name}_relative_change"), (b.value - a.value).abs() / b.value.abs().max(f64::MIN_POSITIVE), 0.05);
        rep.below(&format!("{name}_refinement_ratio"), b.refinement_ratio, energy::REFINE_TOL);
    } else {
        let growth = rows.windows(2).map(|w| w[1].value / w[0].value).fold(f64::INFINITY, f64::min);
        rep.above(&format!("{name}_min_growth_ratio"), growth, 1.5);
    }
}

fn energy_rows(rep: &mut Report, ws: &WarpedStructure, rs: &[f64], grid: usize) -> Result<Vec<TableRow>> {
    let rows = quadrature_table(ws, rs, grid, energy::energy_quadrature)?;
    if is_constant(ws) {
        rep.below("energy_constant_map", rows.last().map_or(0.0, |r| r.value), 1e-12);
    } else {
        judge_table(rep, "energy", ws, &rows);
    }
    if is_rational(ws) && !is_constant(ws) {
        let lb: Vec<[f64; 2]> = rs.iter().map(|&r| [r, energy::energy_lower_bound(ws, r, grid)]).collect();
        rep.data("energy_lower_bound", lb);
    }
    Ok(rows)
}

/// Rejects checks that do not apply to the kind of map.
pub fn validate(ws: &WarpedStructure, checks: &Checks) -> Result<()> {
    if checks.degree && !is_rational(ws) {
        bail!("--degree needs a rational map");
    }
    if checks.torus && is_rational(ws) {
        bail!("--torus needs an elliptic map");
    }
    Ok(())
}

/// Runs the selected checks, returning (name, rows) CSV tables.
pub fn run(rep: &mut Report, ws: &WarpedStructure, checks: Checks, p: &Params, rng: &mut ChaCha8Rng) -> Result<Vec<(&'static str, Vec<TableRow>)>> {
    let mut tables = Vec::new();
    if checks.integrability {
        let r = warped::integrability_report(ws, &samples(), 1e-3)?;
        if ws.profile == warped::Profile::Holomorphic {
            rep.below("cauchy_riemann", r.cr_max, 1e-12);
        }
        rep.holds("nijenhuis_second_order", r.all_second_order);
        rep.data("integrability", r);
    }
    if checks.forms {
        let f = warped::form_checks(ws, &samples()[0], 1e-2);
        if is_constant(ws) {
            rep.below("d_omega", f.d_omega, 1e-12);
            rep.below("d_star_omega", f.d_star_omega.coarse, 1e-12);
        } else {
            rep.above("d_omega", f.d_omega, 0.01);
            rep.holds("d_star_omega_second_order", f.d_star_omega.second_order);
        }
        rep.data("forms", f);
    }
    if checks.biholo {
        let mut trip = 0.0f64;
        for _ in 0..p.trials {
            let z = sample::point(rng, 3, 2.0);
            let w = warped::biholo_to_c3(ws, &z)?;
            let back = warped::inverse_biholo(ws, &w)?;
            trip = trip.max(back.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / linalg::cnorm(&z).max(1.0));
        }
        rep.below("biholo_roundtrip", trip, 1e-10);
        let x = linalg::point_to_real(&samples()[0]);
        for k in 0..2 {
            let f = |y: &[f64]| warped::biholo_to_c3(ws, &linalg::real_to_point(y)).map_or(C64::new(f64::NAN, 0.0), |w| w[k]);
            let conv = fd::convergence(|h| fd::laplacian(&f, &x, h).norm(), 2e-2);
            rep.holds(&format!("biholo_w{}_harmonic", k + 1), conv.second_order);
        }
    }
    if checks.degree {
        let d = warped::degree_count(ws, p.trials.min(100), rng)?;
        rep.below("degree_minus_p_plus_1", (d.modal as f64 - (ws.map.degree as f64 + 1.0)).abs(), 0.5);
        let mut bad = 0;
        for _ in 0..p.trials.min(100) {
            let z = sample::point(rng, 3, 2.0);
            if warped::fiber_intersection_count(ws, &z)? != 1 {
                bad += 1;
            }
        }
        rep.below("fibers_not_met_once", bad as f64, 0.5);
        rep.data("degree", d);
    }
    if checks.energy {
        let rows = energy_rows(rep, ws, &radii(p.radius), p.grid)?;
        rep.data("energy", table(&rows));
        tables.push(("energy", rows));
    }
    if checks.area {
        let rows = quadrature_table(ws, &radii(p.radius), p.grid, energy::area_quadrature)?;
        judge_table(rep, "area", ws, &rows);
        rep.data("area", table(&rows));
        tables.push(("area", rows));
    }
    if checks.probe {
        let rays = [Ray { base: [ZERO, ZERO, ONE], dir: [ONE, ZERO, ZERO] }, Ray { base: [ZERO; 3], dir: [ZERO, ZERO, ONE] }];
        let r = warped::asymptotic_probe(ws, &rays, &[10.0, 1e2, 1e4, 1e6]);
        // elliptic maps have no limit at infinity and integer radii sit on
        // lattice points, so only rational maps get a verdict
        if is_constant(ws) {
            rep.below("probe_deviation", r.max_deviation, 1e-12);
        } else if is_rational(ws) {
            rep.above("probe_deviation", r.max_deviation, 0.1);
        }
        rep.data("probe", r);
    }
    if checks.torus {
        rep.below("torus_periodicity", warped::torus_invariance_check(ws, 10)?, 1e-8);
        if !checks.energy {
            let rows = energy_rows(rep, ws, &radii(p.radius.min(16.0)), p.grid)?;
            rep.data("energy", table(&rows));
            tables.push(("energy", rows));
        }
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_double_up_to_max() {
        assert_eq!(radii(64.0), vec![4.0, 8.0, 16.0, 32.0, 64.0]);
        assert_eq!(radii(10.0), vec![4.0, 8.0]);
        assert_eq!(radii(2.0), vec![2.0]);
    }

    #[test]
    fn parses_both_map_syntaxes() {
        let ws = parse_rational("1, 0, 1;t").unwrap();
        assert_eq!(ws.map.degree, 2);
        assert!(parse_rational("1").is_err());
        let js = r#"{"w1":[1,0],"w2":[0.3,1.1],"truncation":40}"#;
        assert_eq!(parse_elliptic("wp, wpp", Some(js)).unwrap().map.degree, 3);
        // on the square lattice wp and wp' share the zero at the centre
        assert!(parse_elliptic("wp,wpp", None).is_err());
        assert!(parse_elliptic("1,wp", Some("[]")).is_err());
    }

    #[test]
    fn default_checks_follow_map_kind() {
        let r = Checks::defaults(&parse_rational("1;t").unwrap());
        assert!(r.degree && !r.torus && !r.energy);
        let e = Checks::defaults(&parse_elliptic("1,wp", None).unwrap());
        assert!(e.torus && !e.degree);
    }
}
