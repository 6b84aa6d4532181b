//! Drive schedules for the two loops, enclosed phase-space area, and the
//! second-leg duration that closes the damped loop.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PhiSchedule;

/// Relative closure tolerance: `|Σζ| <= tol · η · Σ(drive·duration)`.
pub const CLOSURE_TOLERANCE: f64 = 1e-9;

/// The two loops studied here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum LoopSpec {
    /// Undamped square: `φ = 0, π/2, π, 3π/2`, each held for `side_time`.
    UnitarySquare { side_time: f64 },
    /// Damped two-leg loop: `φ = 0` for `t1`, then `φ = π` for the
    /// closing time returned by [`solve_closing_time`].
    DissipativeTwoLeg { t1: f64 },
}

impl LoopSpec {
    pub fn schedule(&self, gamma: f64) -> Result<PhiSchedule> {
        match *self {
            LoopSpec::UnitarySquare { side_time } => square_schedule(side_time),
            LoopSpec::DissipativeTwoLeg { t1 } => two_leg_schedule(gamma, t1),
        }
    }

    /// Total loop duration (`4T` or `T₁ + T₂`).
    pub fn duration(&self, gamma: f64) -> Result<f64> {
        Ok(self.schedule(gamma)?.total_duration())
    }
}

pub fn square_schedule(side_time: f64) -> Result<PhiSchedule> {
    if !(side_time > 0.0) || !side_time.is_finite() {
        return Err(Error::param("T", format!("square side time must be > 0, got {side_time}")));
    }
    PhiSchedule::from_pairs(&[
        (side_time, 0.0),
        (side_time, FRAC_PI_2),
        (side_time, PI),
        (side_time, 3.0 * FRAC_PI_2),
    ])
}

pub fn two_leg_schedule(gamma: f64, t1: f64) -> Result<PhiSchedule> {
    let t2 = solve_closing_time(gamma, t1)?;
    PhiSchedule::from_pairs(&[(t1, 0.0), (t2, PI)])
}

/// Signed area enclosed by the undamped displacement path of `schedule`.
///
/// Orientation: positive when the drive phase advances counter-clockwise
/// (the square `0, π/2, π, 3π/2` encloses `+η²T²`). With this orientation
/// the phase kicked back onto the `|0⟩⟨1|` coherence is `θ = 2𝒜`.
pub fn enclosed_area(schedule: &PhiSchedule, eta: f64) -> Result<f64> {
    enclosed_area_with_tolerance(schedule, eta, CLOSURE_TOLERANCE)
}

pub fn enclosed_area_with_tolerance(schedule: &PhiSchedule, eta: f64, rel_tol: f64) -> Result<f64> {
    let path_length: f64 = schedule.segments().iter().map(|s| eta * s.drive * s.duration).sum();
    let residual = schedule.net_displacement(eta).norm();
    let tolerance = rel_tol * path_length;
    if residual > tolerance {
        return Err(Error::OpenPath { residual, tolerance });
    }
    Ok(-0.5 * composition_phase(schedule.segments().iter().map(|s| s.displacement(eta))))
}

/// `Im Σ_k ζ_k Σ_{l<k} ζ_l*`: the phase collected by composing the
/// displacements in order. Collinear sub-steps of one segment add nothing,
/// so summing per segment is exact.
pub fn composition_phase(steps: impl IntoIterator<Item = Complex64>) -> f64 {
    let mut vertex = Complex64::new(0.0, 0.0);
    let mut acc = 0.0;
    for z in steps {
        acc += (z * vertex.conj()).im;
        vertex += z;
    }
    acc
}

/// Second-leg duration `T₂` such that the branch separation built up during
/// the first leg is cancelled while both amplitudes decay:
/// `e^{-γT₂} = 1 / (2 - e^{-γT₁})`.
pub fn solve_closing_time(gamma: f64, t1: f64) -> Result<f64> {
    check_closing_args(gamma, t1)?;
    // ln(2 - e^{-x}) = ln(1 + (1 - e^{-x}))
    Ok((-(-gamma * t1).exp_m1()).ln_1p() / gamma)
}

/// Root of the cancellation condition by bisection on `[0, 10/γ]`; the
/// independent check on [`solve_closing_time`].
pub fn closing_time_by_bisection(gamma: f64, t1: f64) -> Result<f64> {
    check_closing_args(gamma, t1)?;
    let first_leg = -(-gamma * t1).exp_m1();
    // separation left after a second leg of length t, in units of η/γ
    let residual = |t: f64| first_leg * (-gamma * t).exp() + (-gamma * t).exp_m1();
    let (mut lo, mut hi) = (0.0, 10.0 / gamma);
    if residual(hi) > 0.0 {
        return Err(Error::Invariant("closing-time bracket does not contain a root".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_closing_args(gamma: f64, t1: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::param("gamma", "closing by decay needs gamma > 0; use the square loop at gamma = 0"));
    }
    if !(t1 > 0.0) || !t1.is_finite() {
        return Err(Error::param("T1", format!("must be > 0, got {t1}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn square_segments() {
        let s = square_schedule(1.0).unwrap();
        let phis: Vec<f64> = s.segments().iter().map(|s| s.phi).collect();
        assert_eq!(phis, vec![0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]);
        assert!(s.segments().iter().all(|s| s.duration == 1.0));
        assert!(s.net_displacement(1.0).norm() < 1e-15);
        assert!(square_schedule(0.0).is_err());
        assert!(square_schedule(-1.0).is_err());
    }

    #[test]
    fn square_areas() {
        assert_abs_diff_eq!(enclosed_area(&square_schedule(1.0).unwrap(), 1.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(enclosed_area(&square_schedule(0.5).unwrap(), 1.0).unwrap(), 0.25, epsilon = 1e-14);
        let cw = PhiSchedule::from_pairs(&[(1.0, 0.0), (1.0, 3.0 * FRAC_PI_2), (1.0, PI), (1.0, FRAC_PI_2)]).unwrap();
        assert_abs_diff_eq!(enclosed_area(&cw, 1.0).unwrap(), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn back_and_forth_encloses_nothing() {
        let s = PhiSchedule::from_pairs(&[(1.0, 0.0), (1.0, PI)]).unwrap();
        assert_abs_diff_eq!(enclosed_area(&s, 1.0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn open_path_is_rejected() {
        let s = PhiSchedule::from_pairs(&[(1.0, 0.0), (1.0, FRAC_PI_2)]).unwrap();
        assert!(matches!(enclosed_area(&s, 1.0), Err(Error::OpenPath { .. })));
    }

    #[test]
    fn closing_time_examples() {
        let t2 = solve_closing_time(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(t2, (2.0 - (-1.0f64).exp()).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(t2, 0.489880, epsilon = 1e-6);
        assert_abs_diff_eq!(closing_time_by_bisection(1.0, 1.0).unwrap(), t2, epsilon = 1e-14);
        // long first leg: T2 -> ln 2 / gamma
        assert_abs_diff_eq!(solve_closing_time(2.0, 50.0).unwrap(), 2f64.ln() / 2.0, epsilon = 1e-15);
        // short first leg: T2 -> T1
        let t1 = 1e-7;
        assert_abs_diff_eq!(solve_closing_time(1.0, t1).unwrap() / t1, 1.0, epsilon = 1e-6);
        assert!(solve_closing_time(0.0, 1.0).is_err());
        assert!(solve_closing_time(1.0, 0.0).is_err());
    }

    #[test]
    fn closing_time_matches_bisection_across_scales() {
        for &(g, t1) in &[(1e-4, 1.0), (0.3, 2.0), (1.0, 0.5), (5.0, 4.0), (1.0, 20.0)] {
            let a = solve_closing_time(g, t1).unwrap();
            let b = closing_time_by_bisection(g, t1).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "gamma={g} t1={t1}: {a} vs {b}");
        }
    }
}
