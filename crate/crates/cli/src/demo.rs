//! Canned runs of the worked examples.

use anyhow::Result;
use rand_chacha::ChaCha8Rng;
use twistor_core::warped::{self, Warped8, WarpedStructure};
use twistor_core::{Error, C64};

use crate::report::{Report, TableRow};
use crate::warped::{self as wc, Checks, Params};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn constant(rep: &mut Report, p: &Params, rng: &mut ChaCha8Rng) -> Result<Vec<(&'static str, Vec<TableRow>)>> {
    rep.config("map", "1;0");
    let ws = wc::parse_rational("1;0")?;
    let checks = Checks { integrability: true, forms: true, probe: true, degree: true, energy: true, ..Default::default() };
    wc::run(rep, &ws, checks, &Params { radius: p.radius.min(16.0), ..*p }, rng)
}

pub fn twistor_r4(rep: &mut Report, p: &Params, rng: &mut ChaCha8Rng) -> Result<Vec<(&'static str, Vec<TableRow>)>> {
    rep.config("map", "1;t");
    let ws = wc::parse_rational("1;t")?;
    let checks = Checks { integrability: true, forms: true, biholo: true, degree: true, probe: true, ..Default::default() };
    let tables = wc::run(rep, &ws, checks, p, rng)?;
    // the conjugated profile is the non-integrable control
    let bad = WarpedStructure::conjugated(ws.map.clone());
    let r = warped::integrability_report(&bad, &[[C64::new(0.3, -0.2), C64::new(0.1, 0.4), C64::new(0.5, 0.2)]], 1e-3)?;
    rep.above("conjugated_nijenhuis", r.nijenhuis_max, 1e-2);
    Ok(tables)
}

pub fn torus(rep: &mut Report, p: &Params, rng: &mut ChaCha8Rng) -> Result<Vec<(&'static str, Vec<TableRow>)>> {
    rep.config("map", "1,wp");
    let ws = wc::parse_elliptic("1,wp", None)?;
    let checks = Checks { integrability: true, forms: true, torus: true, ..Default::default() };
    wc::run(rep, &ws, checks, p, rng)
}

pub fn eight_dim(rep: &mut Report) -> Result<Vec<(&'static str, Vec<TableRow>)>> {
    let z = [C64::new(0.2, 0.1), C64::new(-0.3, 0.2), C64::new(0.5, -0.4), C64::new(0.3, 0.6)];
    rep.config("map", "xi_0 = 1, xi_12 = z3 z4");
    let good = Warped8::doubly_warped(|a, b| (ONE, a * b));
    let n = warped::warped8_nijenhuis(&good, &z, 1e-2)?;
    rep.holds("holomorphic_nijenhuis_second_order", n.second_order);
    rep.data("holomorphic_nijenhuis", n);
    let bad = Warped8::doubly_warped(|_, b| (ONE, b.conj()));
    let n = warped::warped8_nijenhuis(&bad, &z, 1e-2)?;
    rep.above("conjugated_nijenhuis", n.coarse, 1e-2);
    rep.data("conjugated_nijenhuis", n);
    let impure = Warped8::new(|_| [ONE, ZERO, ZERO, ZERO, ZERO, ZERO, ZERO, ONE]);
    let rejected = matches!(warped::warped8_field(&impure, &z), Err(Error::QuadricViolation(_)));
    rep.holds("impure_field_rejected", rejected);
    Ok(Vec::new())
}
