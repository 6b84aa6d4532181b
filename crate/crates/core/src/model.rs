//! Model parameters, drive schedules and the qubit readout record.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{finite, Error, Result};

/// Coupling, damping and Trotter step.
///
/// `gamma` is the amplitude damping rate: an undriven coherent amplitude
/// decays as `α e^{-γt}`, which corresponds to the dissipator
/// `2γ (b ρ b† - {b†b, ρ}/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    eta: f64,
    gamma: f64,
    dt: f64,
    step_bound: f64,
}

impl ModelParams {
    pub const DEFAULT_STEP_BOUND: f64 = 1e-3;

    pub fn new(eta: f64, gamma: f64, dt: f64) -> Result<Self> {
        let eta = finite(eta, "eta")?;
        let gamma = finite(gamma, "gamma")?;
        let dt = finite(dt, "dt")?;
        // eta = 0 is allowed: pure damping runs are used as oracles.
        if eta < 0.0 {
            return Err(Error::param("eta", format!("must be >= 0, got {eta}")));
        }
        if gamma < 0.0 {
            return Err(Error::param("gamma", format!("must be >= 0, got {gamma}")));
        }
        if dt <= 0.0 {
            return Err(Error::param("dt", format!("must be > 0, got {dt}")));
        }
        let p = ModelParams { eta, gamma, dt, step_bound: Self::DEFAULT_STEP_BOUND };
        p.check_step()?;
        Ok(p)
    }

    /// Replace the `dt·γ` bound (default `1e-3`).
    pub fn with_step_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound > 0.0) {
            return Err(Error::param("step_bound", "must be > 0"));
        }
        self.step_bound = bound;
        self.check_step()?;
        Ok(self)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param("dt", format!("must be > 0, got {dt}")));
        }
        self.dt = dt;
        self.check_step()?;
        Ok(self)
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::param("eta", format!("must be >= 0, got {eta}")));
        }
        self.eta = eta;
        Ok(self)
    }

    pub fn check_step(&self) -> Result<()> {
        let dt_gamma = self.dt * self.gamma;
        if dt_gamma > self.step_bound * (1.0 + 1e-12) {
            return Err(Error::StepBound { dt_gamma, bound: self.step_bound });
        }
        Ok(())
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_bound(&self) -> f64 {
        self.step_bound
    }
}

/// One piece of a piecewise-constant drive: the phase `phi` held for
/// `duration`, with the coupling scaled by `drive` (1 for the bare `η`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub duration: f64,
    pub phi: f64,
    pub drive: f64,
}

impl Segment {
    pub fn new(duration: f64, phi: f64) -> Self {
        Segment { duration, phi, drive: 1.0 }
    }

    pub fn scaled(duration: f64, phi: f64, drive: f64) -> Self {
        Segment { duration, phi, drive }
    }

    /// Conditional displacement `ζ = -i η t e^{-iφ}` accumulated over the
    /// segment in the absence of damping.
    pub fn displacement(&self, eta: f64) -> Complex64 {
        -Complex64::i() * (eta * self.drive * self.duration) * Complex64::from_polar(1.0, -self.phi)
    }

    /// Number of equal sub-steps of length `<= dt` covering the segment, and
    /// their length. Both engines use this so their Trotter products match.
    pub fn substeps(&self, dt: f64) -> (usize, f64) {
        let n = ((self.duration / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (n, self.duration / n as f64)
    }
}

/// Piecewise-constant drive phase `φ(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiSchedule {
    segments: Vec<Segment>,
}

impl PhiSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::param("schedule", "must contain at least one segment"));
        }
        for s in &segments {
            if !(s.duration > 0.0) || !s.duration.is_finite() {
                return Err(Error::param("schedule", format!("segment duration must be > 0, got {}", s.duration)));
            }
            if !s.phi.is_finite() || !s.drive.is_finite() || s.drive < 0.0 {
                return Err(Error::param("schedule", "segment phase and drive must be finite, drive >= 0"));
            }
        }
        Ok(PhiSchedule { segments })
    }

    /// Segments given as `(duration, phi)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(d, p)| Segment::new(d, p)).collect())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Net undamped displacement `Σ ζ_k`.
    pub fn net_displacement(&self, eta: f64) -> Complex64 {
        self.segments.iter().map(|s| s.displacement(eta)).sum()
    }

    pub fn then(mut self, other: &PhiSchedule) -> Self {
        self.segments.extend_from_slice(&other.segments);
        self
    }
}

/// Outcome probabilities for projecting the qubit on `|±⟩`, with the
/// fringe phase and the damping exponent (`visibility = e^{-gamma_damp}`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitReadout {
    pub p_plus: f64,
    pub p_minus: f64,
    pub theta: f64,
    pub gamma_damp: f64,
}

impl QubitReadout {
    /// Readout for a fringe phase `theta` and damping exponent `gamma_damp`.
    pub fn new(theta: f64, gamma_damp: f64) -> Self {
        let x = (-gamma_damp).exp() * theta.cos();
        QubitReadout { p_plus: 0.5 * (1.0 + x), p_minus: 0.5 * (1.0 - x), theta, gamma_damp }
    }

    /// Readout from the normalized coherence `2 Tr_m⟨0|ρ|1⟩ = e^{-Γ} e^{-iθ}`.
    pub fn from_coherence(kappa: Complex64) -> Self {
        Self::new(-kappa.arg(), -kappa.norm().ln())
    }

    pub fn visibility(&self) -> f64 {
        (-self.gamma_damp).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(-1.0, 0.0, 1e-3).is_err());
        assert!(ModelParams::new(1.0, -0.1, 1e-3).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.0).is_err());
        assert!(matches!(ModelParams::new(1.0, 1.0, 1e-2), Err(Error::StepBound { .. })));
        assert!(ModelParams::new(1.0, f64::NAN, 1e-3).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1e-2).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1e-3).is_ok());
        let loose = ModelParams::new(1.0, 0.0, 1e-2).unwrap().with_step_bound(1e-1).unwrap();
        assert!(loose.with_dt(0.2).is_ok());
    }

    #[test]
    fn schedule_invariants() {
        assert!(PhiSchedule::new(vec![]).is_err());
        assert!(PhiSchedule::from_pairs(&[(1.0, 0.0), (0.0, 1.0)]).is_err());
        let s = PhiSchedule::from_pairs(&[(1.0, 0.0), (0.5, PI)]).unwrap();
        assert_eq!(s.total_duration(), 1.5);
    }

    #[test]
    fn substeps_cover_segment_exactly() {
        let seg = Segment::new(1.0, 0.0);
        assert_eq!(seg.substeps(1e-3), (1000, 1e-3));
        let (n, h) = Segment::new(0.4898, 0.0).substeps(1e-3);
        assert_eq!(n, 490);
        assert!(h <= 1e-3 && (h * n as f64 - 0.4898).abs() < 1e-15);
    }

    #[test]
    fn readout_examples() {
        let r = QubitReadout::new(0.0, 0.0);
        assert_eq!((r.p_plus, r.p_minus), (1.0, 0.0));
        let r = QubitReadout::new(PI, 0.0);
        assert!(r.p_plus.abs() < 1e-15 && (r.p_minus - 1.0).abs() < 1e-15);
        let r = QubitReadout::new(0.0, 2f64.ln());
        assert!((r.p_plus - 0.75).abs() < 1e-15 && (r.p_minus - 0.25).abs() < 1e-15);
    }
}
