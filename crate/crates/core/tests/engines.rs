//! Cross-checks between the branch engine, the Fock engine and the
//! closed forms, at sizes small enough for the regular test run.

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use phasekick::branch::{self, BranchState};
use phasekick::fock::{self, DensityMatrix, Method};
use phasekick::model::{ModelParams, PhiSchedule};
use phasekick::numerics::{angle_diff, richardson};
use phasekick::path::{self, LoopSpec};
use phasekick::thermal::{self, AffinePhase, Quadrature, ThermalSpec};
use phasekick::error::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn fock_tracks_branch_on_complex_amplitude() {
    let p = ModelParams::new(0.4, 1.0, 1e-3).unwrap();
    let sched = path::two_leg_schedule(1.0, 0.8).unwrap();
    let alpha = c(0.3, -0.4);
    let b = branch::readout(&branch::propagate(&BranchState::plus(alpha), &sched, &p).unwrap());
    let rho = fock::evolve(&DensityMatrix::plus_coherent(alpha, 20).unwrap(), &sched, &p, Method::TrotterSplit).unwrap();
    let f = fock::readout(&rho);
    assert!(angle_diff(f.theta, b.theta).abs() < 1e-10);
    assert_abs_diff_eq!(f.gamma_damp, b.gamma_damp, epsilon = 1e-10);
    assert_abs_diff_eq!(f.p_plus, b.p_plus, epsilon = 1e-10);
}

#[test]
fn rk4_and_trotter_agree_to_first_order() {
    let sched = path::two_leg_schedule(1.0, 0.5).unwrap();
    let rho0 = DensityMatrix::plus_coherent(c(0.5, 0.0), 16).unwrap();
    let gap = |dt: f64| {
        let p = ModelParams::new(0.5, 1.0, dt).unwrap();
        let a = fock::evolve(&rho0, &sched, &p, Method::TrotterSplit).unwrap();
        let b = fock::evolve(&rho0, &sched, &p, Method::DirectRk4).unwrap();
        a.frobenius_distance(&b)
    };
    let (g1, g2) = (gap(1e-3), gap(5e-4));
    assert!(g1 < 1e-2);
    assert!((g1 / g2 - 2.0).abs() < 0.2, "ratio {}", g1 / g2);
}

#[test]
fn dyadic_identity_on_grid() {
    let pts = [c(0.0, 0.0), c(1.0, 0.5), c(-0.7, -0.7)];
    for &l1 in &pts {
        for &l2 in &pts {
            let exact = fock::dissipative_dyadic(l1, l2, 0.7, 0.3, 24).unwrap();
            let num = fock::evolve_dyad(l1, l2, 0.7, 0.3, 24, 1e-3, Method::TrotterSplit).unwrap();
            assert!((&exact - num).norm() < 1e-10);
        }
    }
}

#[test]
fn engine_matches_continuum_forms() {
    let p = ModelParams::new(0.3, 1.0, 1e-3).unwrap();
    let alpha = c(0.8, 0.2);
    let sched = path::two_leg_schedule(1.0, 1.5).unwrap();
    let run = |p: &ModelParams| branch::readout(&branch::propagate(&BranchState::plus(alpha), &sched, p).unwrap());
    let (a, b) = (run(&p), run(&p.with_dt(5e-4).unwrap()));
    let (theta, gamma) = branch::continuum_loop(alpha, &p, 1.5).unwrap();
    assert_abs_diff_eq!(richardson(a.theta, b.theta, 1), theta, epsilon = 1e-7);
    assert_abs_diff_eq!(richardson(a.gamma_damp, b.gamma_damp, 1), gamma, epsilon = 1e-7);
}

#[test]
fn reference_first_leg_values() {
    let p = ModelParams::new(1.0, 1.0, 1e-3).unwrap();
    let cf = branch::closed_form_t1(1.0, &p, 1.0).unwrap();
    assert_abs_diff_eq!(cf.theta1, 0.432332, epsilon = 1e-6);
    assert_abs_diff_eq!(cf.beta1, 0.632121, epsilon = 1e-6);
    assert_abs_diff_eq!(cf.alpha1, 0.367879, epsilon = 1e-6);
    assert_abs_diff_eq!(cf.gamma1, 0.084046, epsilon = 1e-6);
}

#[test]
fn square_area_and_closing_time() {
    let sched = path::square_schedule(0.5).unwrap();
    assert_abs_diff_eq!(path::enclosed_area(&sched, 2.0).unwrap(), 1.0, epsilon = 1e-12);
    let open = PhiSchedule::from_pairs(&[(1.0, 0.0)]).unwrap();
    assert!(matches!(path::enclosed_area(&open, 1.0), Err(Error::OpenPath { .. })));
    for gt1 in [0.1, 1.0, 3.0] {
        let t2 = path::solve_closing_time(1.0, gt1).unwrap();
        assert_abs_diff_eq!(t2, path::closing_time_by_bisection(1.0, gt1).unwrap(), epsilon = 1e-9);
    }
}

#[test]
fn truncation_is_refused_up_front() {
    let err = DensityMatrix::plus_coherent(c(5.0, 0.0), 30).unwrap_err();
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn quadrature_converges_and_matches_closed_form() {
    let p = ModelParams::new(0.05, 1.0, 1e-3).unwrap();
    let lp = LoopSpec::DissipativeTwoLeg { t1: 20.0 };
    let model = AffinePhase::fit(&lp, &p).unwrap();
    let spec = ThermalSpec::new(c(12.0, 0.0), 15.0).unwrap();
    let lo = model.lambda(&spec, Quadrature::GaussHermite { order: 40 }).unwrap().lambda;
    let hi = model.lambda(&spec, Quadrature::GaussHermite { order: 80 }).unwrap().lambda;
    assert!((lo - hi).norm() < 1e-8);
    assert!((hi - model.lambda_exact(&spec).lambda).norm() < 1e-8);

    let per_node = thermal::lambda_integral(&spec, &lp, &p, Quadrature::GaussHermite { order: 24 }).unwrap().lambda;
    let affine = model.lambda(&spec, Quadrature::GaussHermite { order: 24 }).unwrap().lambda;
    assert!((per_node - affine).norm() < 1e-9);
}

#[test]
fn weight_is_normalized() {
    let spec = ThermalSpec::new(c(1.0, -2.0), 4.0).unwrap();
    let h = 0.05;
    let mut total = 0.0;
    for i in -300..=300 {
        for j in -300..=300 {
            total += thermal::p_weight(c(1.0 + i as f64 * h, -2.0 + j as f64 * h), &spec).unwrap() * h * h;
        }
    }
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
}
