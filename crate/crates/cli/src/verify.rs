//! Invariant sweeps for the algebraic modules.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use twistor_core::clifford6::{self as cl, M4};
use twistor_core::conformal::{self, ConformalLift};
use twistor_core::linalg::{self, RMat};
use twistor_core::{ocs, pfaffian, sample, spinor, twistor, C64};
use twistor_core::spinor::SpinorEven;

use crate::report::Report;

fn su4(rng: &mut ChaCha8Rng) -> M4 {
    let u = sample::su4(rng);
    M4::from_fn(|i, j| u[(i, j)])
}

fn p3(rng: &mut ChaCha8Rng, scale: f64) -> [C64; 3] {
    let z = sample::point(rng, 3, scale);
    [z[0], z[1], z[2]]
}

pub fn spinor_suite(rep: &mut Report, rng: &mut ChaCha8Rng, n: usize, trials: usize, tol: f64) {
    let (mut quad, mut iso, mut rank_bad, mut idem) = (0.0f64, 0.0f64, 0usize, 0.0f64);
    for _ in 0..trials {
        let s = sample::pure_spinor(rng, n);
        let u = spinor::normalize(&s).expect("nonzero");
        quad = quad.max(spinor::quadric_residuals(&u).iter().fold(0.0, |a, r| a.max(r.norm())));
        let p = spinor::is_pure(&s, spinor::PURITY_TOL);
        iso = iso.max(p.max_isotropy_residual);
        if !p.pure || p.rank != n {
            rank_bad += 1;
        }
        let uu = spinor::normalize(&u).expect("nonzero");
        idem = idem.max(linalg::chordal(uu.components(), u.components()));
    }
    rep.below("quadric_residual", quad, tol);
    rep.below("isotropy_residual", iso, tol);
    rep.below("pure_samples_rejected", rank_bad as f64, 0.5);
    rep.below("normalize_idempotence", idem, tol);
    if n >= 4 {
        // generic even spinors are impure from rank 4 on
        let mut missed = 0;
        for _ in 0..trials {
            let comps: Vec<C64> = (0..1 << (n - 1)).map(|_| sample::complex(rng)).collect();
            let s = SpinorEven::new(n, comps).expect("count");
            if spinor::is_pure(&s, spinor::PURITY_TOL).pure {
                missed += 1;
            }
        }
        rep.below("impure_samples_accepted", missed as f64, 0.5);
    }
}

pub fn ocs_suite(rep: &mut Report, rng: &mut ChaCha8Rng, n: usize, trials: usize, tol: f64) {
    let (mut res, mut trip) = (ocs::OcsResiduals { skew: 0.0, orthogonal: 0.0, square: 0.0, pfaffian: 0.0 }, 0.0f64);
    for _ in 0..trials {
        let s = sample::pure_spinor(rng, n);
        let j = ocs::ocs_from_spinor(&s).expect("pure");
        let r = ocs::residuals(j.matrix());
        res.skew = res.skew.max(r.skew);
        res.orthogonal = res.orthogonal.max(r.orthogonal);
        res.square = res.square.max(r.square);
        res.pfaffian = res.pfaffian.max(r.pfaffian);
        let back = ocs::spinor_from_ocs(&j).expect("ocs");
        trip = trip.max(linalg::chordal(back.components(), s.components()));
    }
    rep.below("skew", res.skew, tol);
    rep.below("orthogonal", res.orthogonal, tol);
    rep.below("square_minus_identity", res.square, tol);
    rep.below("pfaffian_minus_one", res.pfaffian, tol);
    rep.below("spinor_roundtrip", trip, tol.max(1e-9));
}

pub fn twistor_suite(rep: &mut Report, rng: &mut ChaCha8Rng, n: usize, trials: usize, tol: f64) {
    let (mut quad, mut err, mut closed, mut chart) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for _ in 0..trials {
        let s = sample::pure_spinor(rng, n);
        if s.xi0().norm() == 0.0 {
            chart += 1;
        }
        let z = sample::point(rng, n, 1.0);
        let p = twistor::embed(&s, &z).expect("pure");
        quad = quad.max(p.quadric_residual());
        let back = twistor::project(&p).expect("on quadric");
        let scale = linalg::cnorm(&z).max(1.0);
        err = err.max(back.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale);
        if n == 3 {
            let cf = twistor::project_closed_form(&p).expect("n = 3");
            closed = closed.max(cf.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale);
        }
    }
    rep.below("quadric_residual", quad, tol);
    rep.below("project_embed_roundtrip", err, tol);
    if n == 3 {
        rep.below("closed_form_vs_solve", closed, tol);
    }
    rep.data("xi0_zero_samples", chart);
}

pub fn clifford_suite(rep: &mut Report, rng: &mut ChaCha8Rng, trials: usize, tol: f64) {
    let (mut anti, mut det, mut diff, mut unit, mut pf) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let scale = rng.random_range(0.01..100.0f64).sqrt();
        let (y, z) = (p3(rng, scale), p3(rng, scale));
        let n2 = cl::norm2(&z);
        anti = anti.max(cl::clifford_identity_residual(&y, &z) / (1.0 + cl::norm2(&y) + n2));
        let m = cl::m_matrix(&z).m;
        det = det.max((m.determinant() - n2 * n2).norm() / (n2 * n2).max(1e-300));
        let d = [y[0] - z[0], y[1] - z[1], y[2] - z[2]];
        let nd = cl::norm2(&d);
        diff = diff.max(((cl::m_matrix(&y).m - m).determinant() - nd * nd).norm() / (nd * nd).max(1e-300));
        unit = unit.max((m * m.adjoint() - M4::identity() * C64::new(n2, 0.0)).norm() / n2.max(1e-300));
        pf = pf.max((cl::pfaffian4(&m) - n2).norm() / n2.max(1e-300));
    }
    rep.below("anticommutation", anti, tol);
    rep.below("det_is_norm_fourth", det, tol);
    rep.below("det_difference", diff, tol.max(1e-8));
    rep.below("unitarity", unit, tol);
    rep.below("pfaffian_is_norm_squared", pf, tol);
}

pub fn conformal_suite(rep: &mut Report, rng: &mut ChaCha8Rng, trials: usize, tol: f64) {
    let names = ["rotation", "dilation", "translation", "inversion"];
    let mut worst = [0.0f64; 4];
    for _ in 0..trials {
        let lifts = [
            conformal::lift_rotation(&su4(rng)).expect("su4"),
            conformal::lift_dilation(rng.random_range(0.2..5.0)).expect("positive"),
            conformal::lift_translation(&p3(rng, 1.0)),
            conformal::lift_inversion(),
        ];
        for (k, l) in lifts.iter().enumerate() {
            let s = sample::pure_spinor(rng, 3);
            let z = p3(rng, 1.0);
            if let Ok(r) = conformal::equivariance_residual(l, &s, &z) {
                worst[k] = worst[k].max(r);
            }
        }
    }
    for (name, w) in names.iter().zip(worst) {
        rep.below(&format!("equivariance_{name}"), w, tol);
    }
    let mut member = 0.0f64;
    for _ in 0..trials {
        let mut l = ConformalLift::identity();
        for _ in 0..5 {
            let g = match rng.random_range(0..4) {
                0 => conformal::lift_rotation(&su4(rng)).expect("su4"),
                1 => conformal::lift_dilation(rng.random_range(0.2..5.0)).expect("positive"),
                2 => conformal::lift_translation(&p3(rng, 1.0)),
                _ => conformal::lift_inversion(),
            };
            l = g.after(&l);
        }
        member = member.max(l.membership_residual());
    }
    rep.below("composite_membership", member, tol.max(1e-9));
    let (mut hom, mut kernel) = (0.0f64, 0.0f64);
    let id6 = RMat::identity(6, 6);
    for d in [M4::identity(), -M4::identity()] {
        kernel = kernel.max(linalg::max_abs(&(conformal::rotation_from_su4(&d).expect("su4") - &id6)));
    }
    for _ in 0..trials {
        let (a, b) = (su4(rng), su4(rng));
        let ra = conformal::rotation_from_su4(&a).expect("su4");
        let lhs = conformal::rotation_from_su4(&(a * b)).expect("su4");
        hom = hom.max(linalg::max_abs(&(lhs - &ra * conformal::rotation_from_su4(&b).expect("su4"))));
        kernel = kernel.max(linalg::max_abs(&(conformal::rotation_from_su4(&(-a)).expect("su4") - ra)));
    }
    rep.below("su4_homomorphism", hom, tol);
    rep.below("su4_kernel", kernel, tol);
    let mut pf = 0.0f64;
    for _ in 0..trials {
        let m = sample::skew(rng, 6).map(|v| v.re);
        let p = pfaffian::pfaffian(&m).expect("skew");
        let d = m.determinant();
        pf = pf.max((p * p - d).abs() / d.abs().max(1.0));
    }
    rep.below("pfaffian_squared_is_det", pf, tol);
}
