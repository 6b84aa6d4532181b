//! Exact propagation in the coherent-branch representation.
//!
//! Starting from `|+⟩|α⟩`, the joint state stays of the form
//!
//! ```text
//! ρ = w0 |0,λ0⟩⟨0,λ0| + w1 |1,λ1⟩⟨1,λ1| + √(w0 w1) (c |0,λ0⟩⟨1,λ1| + h.c.)
//! ```
//!
//! because the conditional displacement and the amplitude-damping channel
//! both map coherent dyads to coherent dyads. The engine tracks
//! `(λ0, λ1, ln c)` and is exact up to the Trotter splitting of the two.
//! `ln c = -Γ - iθ` is accumulated unwrapped.

use num_complex::Complex64;
use serde::Serialize;

use crate::coherent::{log_coherent_overlap, ComplexAmplitude};
use crate::error::{Error, Result};
use crate::model::{ModelParams, PhiSchedule, QubitReadout, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchState {
    /// Oscillator amplitude conditioned on qubit `|0⟩` (the driven branch).
    pub lambda0: ComplexAmplitude,
    /// Oscillator amplitude conditioned on qubit `|1⟩`.
    pub lambda1: ComplexAmplitude,
    /// `-Γ - iθ` of the `|0⟩⟨1|` dyad coefficient.
    pub log_coherence: Complex64,
    pub w0: f64,
    pub w1: f64,
}

impl BranchState {
    /// `|+⟩ ⊗ |α⟩`.
    pub fn plus(alpha: ComplexAmplitude) -> Self {
        BranchState {
            lambda0: alpha,
            lambda1: alpha,
            log_coherence: Complex64::new(0.0, 0.0),
            w0: 0.5,
            w1: 0.5,
        }
    }

    /// Accumulated phase `θ` of the dyad coefficient.
    pub fn theta(&self) -> f64 {
        -self.log_coherence.im
    }

    /// Accumulated damping exponent `Γ` of the dyad coefficient.
    pub fn gamma_damp(&self) -> f64 {
        -self.log_coherence.re
    }

    pub fn separation(&self) -> f64 {
        (self.lambda0 - self.lambda1).norm()
    }

    /// Log of the normalized qubit coherence `Tr_m⟨0|ρ|1⟩ / √(w0 w1)`,
    /// i.e. the dyad coefficient times the branch overlap `⟨λ1|λ0⟩`.
    pub fn log_qubit_coherence(&self) -> Complex64 {
        self.log_coherence + log_coherent_overlap(self.lambda0, self.lambda1)
    }

    fn is_finite(&self) -> bool {
        self.lambda0.is_finite() && self.lambda1.is_finite() && self.log_coherence.is_finite()
    }
}

/// One Trotter step `D_dt ∘ U_dt` at drive phase `phi`.
pub fn trotter_step(s: &BranchState, p: &ModelParams, phi: f64) -> Result<BranchState> {
    p.check_step()?;
    let mut next = *s;
    Kernel::new(p.eta(), p.gamma(), phi, p.dt(), PhaseRule::default()).apply(&mut next);
    if !next.is_finite() {
        return Err(Error::NonFinite("branch state"));
    }
    Ok(next)
}

/// Apply `(D_dt U_dt)^N` over every segment of `schedule`. Each segment is
/// cut into equal sub-steps no longer than `p.dt()`.
pub fn propagate(s0: &BranchState, schedule: &PhiSchedule, p: &ModelParams) -> Result<BranchState> {
    propagate_observed(s0, schedule, p, |_, _| {})
}

/// [`propagate`] calling `observe(t, state)` after every step.
pub fn propagate_observed<F>(s0: &BranchState, schedule: &PhiSchedule, p: &ModelParams, observe: F) -> Result<BranchState>
where
    F: FnMut(f64, &BranchState),
{
    propagate_with_rule(s0, schedule, p, PhaseRule::default(), observe)
}

/// Sign applied to the unitary phase increment. Only the validation
/// harness changes it, to check that a corrupted update is caught.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PhaseRule {
    pub unitary_sign: f64,
}

impl Default for PhaseRule {
    fn default() -> Self {
        PhaseRule { unitary_sign: 1.0 }
    }
}

pub(crate) fn propagate_with_rule<F>(
    s0: &BranchState,
    schedule: &PhiSchedule,
    p: &ModelParams,
    rule: PhaseRule,
    mut observe: F,
) -> Result<BranchState>
where
    F: FnMut(f64, &BranchState),
{
    p.check_step()?;
    let mut s = *s0;
    let mut t = 0.0;
    for seg in schedule.segments() {
        let (n, h) = seg.substeps(p.dt());
        let kernel = Kernel::for_segment(seg, p, h, rule);
        let t0 = t;
        for k in 0..n {
            kernel.apply(&mut s);
            t = t0 + (k + 1) as f64 * h;
            observe(t, &s);
        }
    }
    if !s.is_finite() {
        return Err(Error::NonFinite("branch state"));
    }
    Ok(s)
}

/// Per-segment constants of one Trotter step.
struct Kernel {
    dz: Complex64,
    decay: f64,
    /// `1 - e^{-2γh}`: power of the overlap picked up by the dyad.
    dephase: f64,
    unitary_sign: f64,
}

impl Kernel {
    fn new(eta: f64, gamma: f64, phi: f64, h: f64, rule: PhaseRule) -> Self {
        Kernel {
            dz: -Complex64::i() * (eta * h) * Complex64::from_polar(1.0, -phi),
            decay: (-gamma * h).exp(),
            dephase: -(-2.0 * gamma * h).exp_m1(),
            unitary_sign: rule.unitary_sign,
        }
    }

    fn for_segment(seg: &Segment, p: &ModelParams, h: f64, rule: PhaseRule) -> Self {
        Self::new(p.eta() * seg.drive, p.gamma(), seg.phi, h, rule)
    }

    #[inline]
    fn apply(&self, s: &mut BranchState) {
        // D(dz)|λ0⟩ = exp(i Im(dz λ0*)) |λ0 + dz⟩
        let phase = (self.dz * s.lambda0.conj()).im;
        s.log_coherence += Complex64::new(0.0, self.unitary_sign * phase);
        s.lambda0 += self.dz;
        // |λ0⟩⟨λ1| -> ⟨λ1|λ0⟩^{1-e^{-2γh}} |λ0 e^{-γh}⟩⟨λ1 e^{-γh}|
        s.log_coherence += self.dephase * log_coherent_overlap(s.lambda0, s.lambda1);
        s.lambda0 *= self.decay;
        s.lambda1 *= self.decay;
    }
}

/// Qubit readout in the `|±⟩` basis, including the residual branch overlap
/// (which is 1 once the loop has closed).
pub fn readout(s: &BranchState) -> QubitReadout {
    let log_kappa = s.log_qubit_coherence();
    let balance = (2.0 * (s.w0 * s.w1).sqrt()).ln();
    QubitReadout::new(-log_kappa.im, -(log_kappa.re + balance))
}

/// Quantities at the end of the first (`φ = 0`) leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormT1 {
    pub theta1: f64,
    pub beta1: f64,
    pub alpha1: f64,
    pub gamma1: f64,
}

/// `1 - e^{-x}` without cancellation.
fn one_minus_exp(x: f64) -> f64 {
    -(-x).exp_m1()
}

/// `∫₀^x (1 - e^{-u})² du = x + (1 - e^{-2x})/2 - 2(1 - e^{-x})`.
pub(crate) fn first_leg_integral(x: f64) -> f64 {
    if x < 0.5 {
        // Σ_{n≥3} (-1)^{n+1} (2^{n-1} - 2) xⁿ / n!
        let mut term = x * x / 2.0; // x^n / n! at n = 2
        let mut sum = 0.0;
        for n in 3..40 {
            term *= x / n as f64;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * (2f64.powi(n as i32 - 1) - 2.0) * term;
        }
        sum
    } else {
        x + 0.5 * one_minus_exp(2.0 * x) - 2.0 * one_minus_exp(x)
    }
}

/// `∫₀^{T₂γ} ((2 - e^{-x}) e^{-u} - 1)² du` for the closing second leg,
/// written with `m = 1 - e^{-x}` as `ln(1+m) - m + m²/2`.
pub(crate) fn second_leg_integral(x: f64) -> f64 {
    let m = one_minus_exp(x);
    if m < 0.1 {
        // Σ_{n≥3} (-1)^{n+1} mⁿ / n
        let mut pow = m * m;
        let mut sum = 0.0;
        for n in 3..60 {
            pow *= m;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * pow / n as f64;
        }
        sum
    } else {
        m.ln_1p() - m + 0.5 * m * m
    }
}

/// Reference closed forms for the first leg:
/// `θ₁ = (ηα/2γ)(1 - e^{-2γT₁})`, `β₁ = (η/γ)(1 - e^{-γT₁})`,
/// `α₁ = α e^{-γT₁}`, `Γ₁ = (η²/2γ²)[γT₁ + (1 - e^{-2γT₁})/2 - 2(1 - e^{-γT₁})]`.
///
/// At `γ = 0` the analytic limits `ηαT₁`, `ηT₁`, `α`, `0` are returned.
/// These are reference values; the engine integrates the master equation
/// and disagrees with `θ₁` and `Γ₁` (see [`continuum_first_leg`]).
pub fn closed_form_t1(alpha: f64, p: &ModelParams, t1: f64) -> Result<ClosedFormT1> {
    check_t1(t1)?;
    let (eta, gamma) = (p.eta(), p.gamma());
    if gamma == 0.0 {
        return Ok(ClosedFormT1 { theta1: eta * alpha * t1, beta1: eta * t1, alpha1: alpha, gamma1: 0.0 });
    }
    let x = gamma * t1;
    Ok(ClosedFormT1 {
        theta1: eta * alpha / (2.0 * gamma) * one_minus_exp(2.0 * x),
        beta1: eta / gamma * one_minus_exp(x),
        alpha1: alpha * (-x).exp(),
        gamma1: eta * eta / (2.0 * gamma * gamma) * first_leg_integral(x),
    })
}

/// Reference closed forms for the loop phase and damping exponent:
/// `θ(α) = ηα(1 - e^{-γT₁})² / (γ(2 - e^{-γT₁}))` and
/// `Γ = (γ/2) ∫|λ0 - λ1|² dt` over both legs, which reproduces the reference
/// `Γ₁` on the first leg.
pub fn closed_form_loop(alpha: f64, p: &ModelParams, t1: f64) -> Result<(f64, f64)> {
    check_t1(t1)?;
    let (eta, gamma) = (p.eta(), p.gamma());
    if gamma == 0.0 {
        return Err(Error::param("gamma", "the two-leg loop needs gamma > 0"));
    }
    let x = gamma * t1;
    let m = one_minus_exp(x);
    let theta = eta * alpha * m * m / (gamma * (1.0 + m));
    let big_gamma = eta * eta / (2.0 * gamma * gamma) * (first_leg_integral(x) + second_leg_integral(x));
    Ok((theta, big_gamma))
}

/// First-leg dyad coefficient of the continuum dynamics the engines
/// integrate (unitary drive plus the dissipator `2γ D[b]`):
/// `θ₁ = (η Re α/γ)(m + m²)`, `Γ₁ = (η²/γ²) ∫₀^{γT₁}(1-e^{-u})² du`, `m = 1 - e^{-γT₁}`.
pub fn continuum_first_leg(alpha: ComplexAmplitude, p: &ModelParams, t1: f64) -> Result<ClosedFormT1> {
    check_t1(t1)?;
    let (eta, gamma) = (p.eta(), p.gamma());
    if gamma == 0.0 {
        return Ok(ClosedFormT1 { theta1: eta * alpha.re * t1, beta1: eta * t1, alpha1: alpha.re, gamma1: 0.0 });
    }
    let x = gamma * t1;
    let m = one_minus_exp(x);
    Ok(ClosedFormT1 {
        theta1: eta * alpha.re / gamma * (m + m * m),
        beta1: eta / gamma * m,
        alpha1: alpha.re * (-x).exp(),
        gamma1: eta * eta / (gamma * gamma) * first_leg_integral(x),
    })
}

/// Closed two-leg loop of the continuum dynamics: `θ = 4ηRe(α)m²/(γ(1+m))`
/// and `Γ = γ ∫|λ0 - λ1|² dt`.
pub fn continuum_loop(alpha: ComplexAmplitude, p: &ModelParams, t1: f64) -> Result<(f64, f64)> {
    let (ref_theta, ref_gamma) = closed_form_loop(alpha.re, p, t1)?;
    Ok((4.0 * ref_theta, 2.0 * ref_gamma))
}

fn check_t1(t1: f64) -> Result<()> {
    if !(t1 > 0.0) || !t1.is_finite() {
        return Err(Error::param("T1", format!("must be > 0, got {t1}")));
    }
    Ok(())
}
