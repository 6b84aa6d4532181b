use num_complex::Complex64;
use phasekick::branch::{self, BranchState};
use phasekick::coherent::coherent_overlap;
use phasekick::fock::{self, DensityMatrix, Method};
use phasekick::model::{ModelParams, PhiSchedule};
use phasekick::numerics::{angle_diff, pairwise_sum};
use phasekick::path;
use phasekick::thermal::{AffinePhase, Quadrature, ThermalSpec};
use proptest::prelude::*;

fn amplitude(max: f64) -> impl Strategy<Value = Complex64> {
    (-max..max, -max..max).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn overlap_modulus(a in amplitude(3.0), b in amplitude(3.0)) {
        let o = coherent_overlap(a, b);
        prop_assert!((o.norm_sqr() - (-(a - b).norm_sqr()).exp()).abs() < 1e-12);
    }

    #[test]
    fn readout_probabilities(
        alpha in amplitude(4.0),
        eta in 0.0..2.0f64,
        gamma in 0.01..2.0f64,
        gt1 in 0.1..5.0f64,
    ) {
        let p = ModelParams::new(eta, gamma, 1e-3 / gamma).unwrap();
        let s = branch::propagate(&BranchState::plus(alpha), &path::two_leg_schedule(gamma, gt1 / gamma).unwrap(), &p).unwrap();
        let r = branch::readout(&s);
        prop_assert!((r.p_plus + r.p_minus - 1.0).abs() < 1e-12);
        prop_assert!(r.gamma_damp >= -1e-12);
        prop_assert!(s.separation() < 1e-6 * eta / gamma + 1e-12);
    }

    #[test]
    fn damping_exponent_ignores_alpha(a in amplitude(5.0), b in amplitude(5.0), gt1 in 0.2..4.0f64) {
        let p = ModelParams::new(0.3, 1.0, 1e-3).unwrap();
        let sched = path::two_leg_schedule(1.0, gt1).unwrap();
        let g = |x| branch::readout(&branch::propagate(&BranchState::plus(x), &sched, &p).unwrap()).gamma_damp;
        prop_assert!((g(a) - g(b)).abs() < 1e-9);
    }

    #[test]
    fn loop_phase_is_affine_in_alpha(a in amplitude(3.0), b in amplitude(3.0)) {
        let p = ModelParams::new(0.5, 1.0, 1e-3).unwrap();
        let sched = path::two_leg_schedule(1.0, 1.0).unwrap();
        let th = |x| branch::readout(&branch::propagate(&BranchState::plus(x), &sched, &p).unwrap()).theta;
        let zero = Complex64::new(0.0, 0.0);
        let lhs = th(a + b) + th(zero);
        let rhs = th(a) + th(b);
        prop_assert!(angle_diff(lhs, rhs).abs() < 1e-9);
    }

    #[test]
    fn closing_time_matches_bisection(gamma in 0.01..10.0f64, gt1 in 0.01..30.0f64) {
        let a = path::solve_closing_time(gamma, gt1 / gamma).unwrap();
        let b = path::closing_time_by_bisection(gamma, gt1 / gamma).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }

    #[test]
    fn pairwise_sum_ignores_order(mut xs in prop::collection::vec(amplitude(1.0), 1..200)) {
        let forward = pairwise_sum(&xs);
        xs.reverse();
        prop_assert!((forward - pairwise_sum(&xs)).norm() < 1e-12);
    }

    #[test]
    fn thermal_visibility_bounded(a0 in amplitude(50.0), v in 1.0..80.0f64) {
        let p = ModelParams::new(0.05, 1.0, 1e-3).unwrap();
        let model = AffinePhase::fit(&phasekick::path::LoopSpec::DissipativeTwoLeg { t1: 5.0 }, &p).unwrap();
        let spec = ThermalSpec::new(a0, v).unwrap();
        let r = model.lambda(&spec, Quadrature::GaussHermite { order: 32 }).unwrap();
        prop_assert!(r.lambda.norm() <= model.visibility() * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn density_matrix_stays_physical(
        alpha in amplitude(0.8),
        eta in 0.0..1.0f64,
        phi in 0.0..std::f64::consts::TAU,
        t in 0.05..0.3f64,
    ) {
        let p = ModelParams::new(eta, 1.0, 1e-3).unwrap();
        let sched = PhiSchedule::from_pairs(&[(t, phi)]).unwrap();
        let rho = fock::evolve(&DensityMatrix::plus_coherent(alpha, 20).unwrap(), &sched, &p, Method::TrotterSplit).unwrap();
        prop_assert!((rho.trace() - 1.0).norm() < 1e-10);
        prop_assert!(rho.hermiticity_defect() < 1e-12);
        prop_assert!(rho.min_eigenvalue() > -1e-10);
    }
}
