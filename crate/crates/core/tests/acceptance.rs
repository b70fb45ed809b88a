//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//!
//! Run with `cargo test -p twistor-core --test acceptance`.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistor_core::clifford6::{self as cl, M4};
use twistor_core::conformal::{self, ConformalLift};
use twistor_core::elliptic::{EllipticLattice, Recipe};
use twistor_core::energy;
use twistor_core::linalg::{self, RMat};
use twistor_core::meromorphic::{elliptic_map, make_rational, MeromorphicMap};
use twistor_core::ocs;
use twistor_core::pfaffian;
use twistor_core::sample;
use twistor_core::twistor;
use twistor_core::warped::{self, Ray, WarpedStructure};
use twistor_core::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rational(p0: &[f64], p12: &[f64]) -> MeromorphicMap {
    let r = |v: &[f64]| v.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>();
    make_rational(&r(p0), &r(p12)).expect("coprime")
}

fn elliptic(lat: &Arc<EllipticLattice>, a: &str, b: &str) -> MeromorphicMap {
    elliptic_map(lat.clone(), Recipe::parse(a).unwrap(), Recipe::parse(b).unwrap()).expect("valid recipe")
}

fn square() -> Arc<EllipticLattice> {
    Arc::new(EllipticLattice::square())
}

fn su4(rng: &mut ChaCha8Rng) -> M4 {
    let u = sample::su4(rng);
    M4::from_fn(|i, j| u[(i, j)])
}

fn p3(rng: &mut ChaCha8Rng, scale: f64) -> [C64; 3] {
    let z = sample::point(rng, 3, scale);
    [z[0], z[1], z[2]]
}

fn algebraic_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 10_000;
    let (mut cliff, mut det, mut det_diff, mut quad, mut pf) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..n {
        let (y, z) = (p3(&mut rng, 1.0), p3(&mut rng, 1.0));
        cliff = cliff.max(cl::clifford_identity_residual(&y, &z));
        let nz = cl::norm2(&z).powi(2);
        det = det.max((cl::m_matrix(&z).m.determinant() - nz).norm() / nz.max(1.0));
        let d = [y[0] - z[0], y[1] - z[1], y[2] - z[2]];
        let nd = cl::norm2(&d).powi(2);
        det_diff = det_diff.max(((cl::m_matrix(&y).m - cl::m_matrix(&z).m).determinant() - nd).norm() / nd.max(1.0));
        let s = sample::pure_spinor(&mut rng, 3);
        quad = quad.max(twistor::embed(&s, &z).unwrap().quadric_residual());
        let k = sample::skew(&mut rng, 3).map(|v| v.re);
        let m = RMat::from_fn(6, 6, |i, j| if i < j { k[(i % 3, j % 3)] + (i + 2 * j) as f64 * 0.1 } else { 0.0 });
        let m = &m - m.transpose();
        let p = pfaffian::pfaffian(&m).unwrap();
        let dm = m.determinant();
        pf = pf.max((p * p - dm).abs() / dm.abs().max(1.0));
    }
    let secs = start.elapsed().as_secs_f64();
    let worst = [cliff, det, det_diff, quad, pf].into_iter().fold(0.0, f64::max);
    outcome(
        worst < 1e-10 && secs < 30.0,
        format!("clifford {cliff:.1e}, det M {det:.1e}, det(My-Mz) {det_diff:.1e}, quadric {quad:.1e}, Pf^2-det {pf:.1e} over {n} draws each in {secs:.1}s"),
    )
}

fn ocs_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut res, mut trip) = (0.0f64, 0.0f64);
    for (n, count) in [(3, 10_000), (4, 1_000)] {
        for _ in 0..count {
            let s = sample::pure_spinor(&mut rng, n);
            let j = ocs::ocs_from_spinor(&s).unwrap();
            res = res.max(ocs::residuals(j.matrix()).max());
            let back = ocs::spinor_from_ocs(&j).unwrap();
            trip = trip.max(linalg::chordal(back.components(), s.components()));
        }
    }
    outcome(res < 1e-10 && trip < 1e-9, format!("J residual {res:.1e}, spinor roundtrip {trip:.1e} (10^4 at n=3, 10^3 at n=4)"))
}

fn twistor_roundtrip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut err, mut closed, mut swapped) = (0.0f64, 0.0f64, 0);
    for _ in 0..10_000 {
        let s = sample::pure_spinor(&mut rng, 3);
        if s.xi0().norm() == 0.0 {
            swapped += 1;
        }
        let z = sample::point(&mut rng, 3, 1.0);
        let p = twistor::embed(&s, &z).unwrap();
        let a = twistor::project(&p).unwrap();
        let b = twistor::project_closed_form(&p).unwrap();
        let nz = linalg::cnorm(&z).max(1.0);
        err = err.max(a.iter().zip(&z).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max) / nz);
        closed = closed.max(a.iter().zip(&b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max) / nz);
    }
    outcome(
        err < 1e-10 && closed < 1e-10 && swapped > 0,
        format!("project(embed) error {err:.1e}, closed form vs solve {closed:.1e}, {swapped} draws with xi_0 = 0"),
    )
}

fn conformal_equivariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = [0.0f64; 4];
    for _ in 0..1_000 {
        let lifts = [
            conformal::lift_rotation(&su4(&mut rng)).unwrap(),
            conformal::lift_dilation(rng.random_range(0.2..5.0)).unwrap(),
            conformal::lift_translation(&p3(&mut rng, 1.0)),
            conformal::lift_inversion(),
        ];
        for (k, l) in lifts.iter().enumerate() {
            let s = sample::pure_spinor(&mut rng, 3);
            let z = p3(&mut rng, 1.0);
            worst[k] = worst[k].max(conformal::equivariance_residual(l, &s, &z).unwrap());
        }
    }
    let mut member = 0.0f64;
    for _ in 0..200 {
        let mut l = ConformalLift::identity();
        for _ in 0..5 {
            let g = match rng.random_range(0..4) {
                0 => conformal::lift_rotation(&su4(&mut rng)).unwrap(),
                1 => conformal::lift_dilation(rng.random_range(0.2..5.0)).unwrap(),
                2 => conformal::lift_translation(&p3(&mut rng, 1.0)),
                _ => conformal::lift_inversion(),
            };
            l = g.after(&l);
        }
        member = member.max(l.membership_residual());
    }
    let (mut hom, mut kernel) = (0.0f64, 0.0f64);
    let id6 = RMat::identity(6, 6);
    for d in [M4::identity(), -M4::identity()] {
        kernel = kernel.max(linalg::max_abs(&(conformal::rotation_from_su4(&d).unwrap() - &id6)));
    }
    for _ in 0..1_000 {
        let (a, b) = (su4(&mut rng), su4(&mut rng));
        let lhs = conformal::rotation_from_su4(&(a * b)).unwrap();
        let ra = conformal::rotation_from_su4(&a).unwrap();
        let rhs = &ra * conformal::rotation_from_su4(&b).unwrap();
        hom = hom.max(linalg::max_abs(&(lhs - rhs)));
        // -A maps to the same rotation
        kernel = kernel.max(linalg::max_abs(&(conformal::rotation_from_su4(&(-a)).unwrap() - ra)));
    }
    let eq = worst.iter().copied().fold(0.0, f64::max);
    outcome(
        eq < 1e-10 && member < 1e-9 && hom < 1e-10 && kernel < 1e-10,
        format!(
            "equivariance rot {:.1e} dil {:.1e} trans {:.1e} inv {:.1e}; 5-step composites {member:.1e}; homomorphism {hom:.1e}; kernel {kernel:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn integrability() -> Outcome {
    let lat = square();
    let cases = [
        ("[1:t]", WarpedStructure::new(rational(&[1.0], &[0.0, 1.0]))),
        ("[1+t^2:t]", WarpedStructure::new(rational(&[1.0, 0.0, 1.0], &[0.0, 1.0]))),
        ("[1:wp]", WarpedStructure::new(elliptic(&lat, "1", "wp"))),
    ];
    let samples = [
        [c(0.3, -0.2), c(0.1, 0.4), c(0.31, 0.27)],
        [c(-1.0, 0.5), c(0.2, 0.3), c(0.62, -0.41)],
        [c(0.7, 0.7), c(-0.4, 0.1), c(1.37, 0.18)],
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, ws) in &cases {
        let rep = warped::integrability_report(ws, &samples, 1e-3).unwrap();
        let ratios: Vec<String> = rep.nijenhuis.iter().map(|c| c.ratio.map_or("-".into(), |r| format!("{r:.2}"))).collect();
        pass &= rep.cr_max <= 1e-14 && rep.all_second_order;
        parts.push(format!("{name} CR {:.0e} N ratios {}", rep.cr_max, ratios.join("/")));
    }
    let conj = WarpedStructure::conjugated(rational(&[1.0], &[0.0, 1.0]));
    let point = [c(0.3, -0.2), c(0.1, 0.4), c(0.5, 0.2)];
    let bad = warped::integrability_report(&conj, &[point], 1e-3).unwrap();
    pass &= bad.nijenhuis_max > 1e-2;
    parts.push(format!("conjugated N {:.2e}", bad.nijenhuis_max));
    outcome(pass, parts.join("; "))
}

fn degree_law() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let maps: [(&[f64], &[f64]); 4] =
        [(&[1.0], &[]), (&[1.0], &[0.0, 1.0]), (&[1.0, 0.0, 1.0], &[0.0, 1.0]), (&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0, 2.0])];
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, (a, b)) in maps.iter().enumerate() {
        let ws = WarpedStructure::new(rational(a, b));
        let rep = warped::degree_count(&ws, 30, &mut rng).unwrap();
        pass &= rep.modal == p + 1 && rep.valid >= 20;
        parts.push(format!("p={p}: {} ({} valid)", rep.modal, rep.valid));
        let mut bad = 0;
        for _ in 0..100 {
            let z = sample::point(&mut rng, 3, 2.0);
            let count = warped::fiber_intersection_count(&ws, &z).unwrap();
            let w = warped::biholo_to_c3(&ws, &z).unwrap();
            let q = twistor::project(&warped::graph_parametrization(&ws, w[0], w[1], w[2]).unwrap()).unwrap();
            let err = q.iter().zip(&z).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
            if count != 1 || err > 1e-9 {
                bad += 1;
            }
        }
        pass &= bad == 0;
        if bad > 0 {
            parts.push(format!("{bad} fibers without exactly one graph point"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    outcome(pass, format!("degrees {}; fiber count 1 on 100 fibers each; {secs:.1}s", parts.join(", ")))
}

fn energy_dichotomy() -> Outcome {
    let g = energy::DEFAULT_GRID;
    let constant = WarpedStructure::new(rational(&[1.0], &[]));
    let rat = WarpedStructure::new(rational(&[1.0], &[0.0, 1.0]));
    let ell = WarpedStructure::new(elliptic(&square(), "1", "wp"));

    let e0 = energy::energy_quadrature(&constant, 8.0, g).unwrap();
    let zero_ok = e0.value == 0.0;

    let (a, b) = (energy::energy_quadrature(&rat, 32.0, g).unwrap(), energy::energy_quadrature(&rat, 64.0, g).unwrap());
    let change = (b.value - a.value).abs() / b.value;
    let (lb32, lb64) = (energy::energy_lower_bound(&rat, 32.0, g), energy::energy_lower_bound(&rat, 64.0, g));
    let conv_ok = change < 0.05 && b.refinement_ratio <= energy::REFINE_TOL;

    let mut growth = Vec::new();
    let mut grow_ok = true;
    let mut prev = energy::energy_quadrature(&ell, 4.0, g).unwrap().value;
    for r in [8.0, 16.0, 32.0] {
        let e = energy::energy_quadrature(&ell, r, g).unwrap().value;
        growth.push(format!("{:.0}", e / prev));
        grow_ok &= e > 1.5 * prev;
        prev = e;
    }
    outcome(
        zero_ok && conv_ok && grow_ok,
        format!(
            "constant E(8) = {:.3e} (want 0); [1:t] |E(64)-E(32)|/E(64) = {:.1}% (want < 5%), refinement {:.0}%, \
             slab lower bound {lb32:.2e} -> {lb64:.2e} vs quadrature {:.2e}; elliptic E(2R)/E(R) = {} for R = 4, 8, 16",
            e0.value,
            100.0 * change,
            100.0 * b.refinement_ratio,
            b.value,
            growth.join(", ")
        ),
    )
}

fn form_dichotomy() -> Outcome {
    let lat = square();
    let cases = [
        ("[1:t]", WarpedStructure::new(rational(&[1.0], &[0.0, 1.0])), c(0.0, 0.0)),
        ("[1+t^2:t]", WarpedStructure::new(rational(&[1.0, 0.0, 1.0], &[0.0, 1.0])), c(0.3, 0.1)),
        ("[1:wp]", WarpedStructure::new(elliptic(&lat, "1", "wp")), c(0.31, 0.27)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, ws, t) in &cases {
        let z = [c(0.3, -0.2), c(0.1, 0.4), *t];
        let f = warped::form_checks(ws, &z, 1e-2);
        pass &= f.d_omega > 0.01 && f.d_star_omega.second_order;
        parts.push(format!("{name} |dw| {:.2} |d*w| {:.1e} -> {:.1e}", f.d_omega, f.d_star_omega.coarse, f.d_star_omega.fine));
    }
    let cst = WarpedStructure::new(rational(&[1.0], &[]));
    let f = warped::form_checks(&cst, &[c(0.3, -0.2), c(0.1, 0.4), c(0.5, 0.5)], 1e-2);
    pass &= f.d_omega < 1e-12 && f.d_star_omega.coarse < 1e-12;
    parts.push(format!("constant |dw| {:.0e} |d*w| {:.0e}", f.d_omega, f.d_star_omega.coarse));
    outcome(pass, parts.join("; "))
}

fn biholomorphism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ws = WarpedStructure::new(rational(&[1.0], &[0.0, 1.0]));
    let mut trip = 0.0f64;
    for _ in 0..10_000 {
        let z = sample::point(&mut rng, 3, 2.0);
        let w = warped::biholo_to_c3(&ws, &z).unwrap();
        let back = warped::inverse_biholo(&ws, &w).unwrap();
        trip = trip.max(back.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / linalg::cnorm(&z).max(1.0));
    }
    let lat = square();
    let fields = [
        ("[1:t]", WarpedStructure::new(rational(&[1.0], &[0.0, 1.0]))),
        ("[1+t^4:t]", WarpedStructure::new(rational(&[1.0, 0.0, 0.0, 0.0, 1.0], &[0.0, 1.0]))),
        ("[1:wp]", WarpedStructure::new(elliptic(&lat, "1", "wp"))),
    ];
    let mut pass = trip < 1e-10;
    let mut parts = vec![format!("roundtrip {trip:.1e} on 10^4 points")];
    for (name, ws) in &fields {
        let x = [0.3, -0.2, 0.1, 0.4, 0.31, 0.27];
        for k in 0..2 {
            let f = |y: &[f64]| warped::biholo_to_c3(ws, &linalg::real_to_point(y)).unwrap()[k];
            let conv = twistor_core::fd::convergence(|h| twistor_core::fd::laplacian(&f, &x, h).norm(), 2e-2);
            pass &= conv.second_order;
            parts.push(format!(
                "{name} lap W{} {:.1e} ratio {}",
                k + 1,
                conv.coarse,
                conv.ratio.map_or("floor".into(), |r| if conv.coarse < twistor_core::fd::ZERO_FLOOR { "floor".into() } else { format!("{r:.2}") })
            ));
        }
    }
    outcome(pass, parts.join("; "))
}

fn torus() -> Outcome {
    let lat = Arc::new(EllipticLattice::new(ONE, c(0.3, 1.1), 40).unwrap());
    let mut per = 0.0f64;
    for (a, b) in [("1", "wp"), ("wp", "wpp")] {
        per = per.max(warped::torus_invariance_check(&WarpedStructure::new(elliptic(&lat, a, b)), 10).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut de = 0.0f64;
    for l in [lat.as_ref(), &EllipticLattice::square()] {
        let mut k = 0;
        while k < 100 {
            let z = l.at(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            if l.lattice_distance(z) < 0.05 {
                continue;
            }
            let (p, dp) = l.wp_both(z).unwrap();
            de = de.max((dp * dp - (4.0 * p * p * p - l.g2 * p - l.g3)).norm() / (1.0 + p.norm().powi(3)));
            k += 1;
        }
    }
    outcome(
        per < 1e-8 && de < 1e-8,
        format!("periodicity of J {per:.1e} over both generators for [1:wp], [wp:wp']; differential equation {de:.1e} (scaled by 1+|wp|^3) at truncation 40"),
    )
}

fn probe() -> Outcome {
    let rays = [Ray { base: [ZERO, ZERO, ONE], dir: [ONE, ZERO, ZERO] }, Ray { base: [ZERO; 3], dir: [ZERO, ZERO, ONE] }];
    let radii = [10.0, 1e2, 1e4, 1e6];
    let c0 = warped::asymptotic_probe(&WarpedStructure::new(rational(&[1.0], &[])), &rays, &radii).max_deviation;
    let c1 = warped::asymptotic_probe(&WarpedStructure::new(rational(&[1.0], &[0.0, 1.0])), &rays, &radii).max_deviation;
    outcome(c0 == 0.0 && c1 > 0.1, format!("constant deviation {c0:.1e}; [1:t] ray limits differ by {c1:.3} in operator norm"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("algebraic identities", algebraic_identities),
        ("OCS correctness", ocs_correctness),
        ("twistor roundtrip", twistor_roundtrip),
        ("conformal equivariance", conformal_equivariance),
        ("integrability dichotomy", integrability),
        ("degree law", degree_law),
        ("energy dichotomy", energy_dichotomy),
        ("form dichotomy", form_dichotomy),
        ("biholomorphism", biholomorphism),
        ("torus examples", torus),
        ("asymptotic probe", probe),
    ];
    let mut passed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if o.pass {
            passed += 1;
        }
        println!("[{}] {:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
