//! Displaced thermal states and the averaged interference factor
//!
//! ```text
//! Λ = v ∫ d²α P(α, α₀, V) e^{iθ(α)},   P = 2/(π(V-1)) · exp(-2|α-α₀|²/(V-1))
//! ```
//!
//! With `α = α₀ + σ(x + iy)` and `σ² = (V-1)/2` the weight becomes
//! `e^{-x²-y²}/π`, so a Gauss-Hermite tensor rule integrates it directly.

use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::branch::{self, BranchState};
use crate::coherent::ComplexAmplitude;
use crate::error::{finite, Error, Result};
use crate::model::{ModelParams, QubitReadout};
use crate::numerics::pairwise_sum;
use crate::path::LoopSpec;

/// Relative tolerance on the loop damping exponent being the same at every node.
pub const GAMMA_UNIFORMITY_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_GH_ORDER: usize = 64;
pub const DEFAULT_MC_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalSpec {
    pub alpha0: ComplexAmplitude,
    /// Quadrature variance `V >= 1`; `V = 1` is the coherent state `|α₀⟩`.
    pub variance: f64,
}

impl ThermalSpec {
    pub fn new(alpha0: ComplexAmplitude, variance: f64) -> Result<Self> {
        if !alpha0.is_finite() {
            return Err(Error::param("alpha0", "must be finite"));
        }
        if !(variance >= 1.0) || !variance.is_finite() {
            return Err(Error::param("V", format!("must be >= 1, got {variance}")));
        }
        Ok(ThermalSpec { alpha0, variance })
    }

    pub fn is_pure(&self) -> bool {
        self.variance == 1.0
    }

    /// Spread of `α` about `α₀` in the Gauss-Hermite variables.
    pub fn sigma(&self) -> f64 {
        (0.5 * (self.variance - 1.0)).sqrt()
    }
}

/// `V = (e^β + 1)/(e^β - 1) = coth(β/2)` with `β = ħω/k_B T`.
pub fn variance_from_temperature(beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::param("beta", format!("must be > 0, got {beta}")));
    }
    Ok(1.0 / (0.5 * beta).tanh())
}

/// Glauber-Sudarshan weight of a displaced thermal state. Undefined at
/// `V = 1`, where the weight is a delta at `α₀`.
pub fn p_weight(alpha: ComplexAmplitude, spec: &ThermalSpec) -> Result<f64> {
    let s = spec.variance - 1.0;
    if !(s > 0.0) {
        return Err(Error::param("V", "P weight needs V > 1; V = 1 is a delta at alpha0"));
    }
    Ok(2.0 / (std::f64::consts::PI * s) * (-2.0 * (alpha - spec.alpha0).norm_sqr() / s).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Quadrature {
    GaussHermite { order: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Quadrature {
    fn validate(&self) -> Result<()> {
        match *self {
            Quadrature::GaussHermite { order } if order < 2 => {
                Err(Error::param("quadrature order", format!("must be >= 2, got {order}")))
            }
            Quadrature::MonteCarlo { samples, .. } if samples < 1000 => {
                Err(Error::param("samples", format!("must be >= 1000, got {samples}")))
            }
            _ => Ok(()),
        }
    }

    /// Nodes and weights, built once and reusable across many averages.
    pub fn rule(self) -> Result<QuadratureRule> {
        self.validate()?;
        Ok(QuadratureRule { method: self, nodes: self.nodes() })
    }

    /// Nodes in `(x, y)` with weights summing to one.
    fn nodes(&self) -> Vec<(f64, f64, f64)> {
        match *self {
            Quadrature::GaussHermite { order } => {
                let rule = GaussHermite::new(NonZeroUsize::new(order).expect("validated order"));
                let pairs = rule.as_node_weight_pairs();
                let inv_pi = 1.0 / std::f64::consts::PI;
                pairs
                    .iter()
                    .flat_map(|&(x, wx)| pairs.iter().map(move |&(y, wy)| (x, y, wx * wy * inv_pi)))
                    .collect()
            }
            Quadrature::MonteCarlo { samples, seed } => {
                // e^{-x²} has variance 1/2 per axis
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let w = 1.0 / samples as f64;
                let scale = std::f64::consts::FRAC_1_SQRT_2;
                (0..samples)
                    .map(|_| {
                        let x: f64 = StandardNormal.sample(&mut rng);
                        let y: f64 = StandardNormal.sample(&mut rng);
                        (scale * x, scale * y, w)
                    })
                    .collect()
            }
        }
    }
}

/// A [`Quadrature`] with its nodes materialized.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    method: Quadrature,
    nodes: Vec<(f64, f64, f64)>,
}

impl QuadratureRule {
    pub fn method(&self) -> Quadrature {
        self.method
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaResult {
    pub lambda: ComplexAmplitude,
    pub theta_tilde: f64,
    pub visibility: f64,
    /// Standard error of `Λ` for Monte Carlo estimates.
    pub standard_error: Option<f64>,
}

impl LambdaResult {
    fn new(lambda: ComplexAmplitude, standard_error: Option<f64>) -> Self {
        LambdaResult { lambda, theta_tilde: lambda.arg(), visibility: lambda.norm(), standard_error }
    }
}

/// `P± = (1 ± |Λ| cos θ̃)/2`.
pub fn thermal_readout(r: &LambdaResult) -> QubitReadout {
    QubitReadout::new(r.theta_tilde, -r.visibility.ln())
}

/// Loop phase and damping exponent at one initial amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodePhase {
    pub theta: f64,
    pub gamma_damp: f64,
}

fn propagate_node(alpha: ComplexAmplitude, lp: &LoopSpec, p: &ModelParams) -> Result<NodePhase> {
    let sched = lp.schedule(p.gamma())?;
    let r = branch::readout(&branch::propagate(&BranchState::plus(alpha), &sched, p)?);
    Ok(NodePhase { theta: r.theta, gamma_damp: r.gamma_damp })
}

fn check_uniform_gamma(reference: f64, node: f64, alpha: ComplexAmplitude) -> Result<()> {
    if (node - reference).abs() > GAMMA_UNIFORMITY_TOLERANCE * reference.abs().max(1.0) {
        return Err(Error::Invariant(format!(
            "loop damping depends on amplitude: {node} at alpha = {alpha} vs {reference}"
        )));
    }
    Ok(())
}

/// `Λ` with the loop phase obtained by propagating the branch engine at
/// every node. Costly for long loops; see [`AffinePhase`] for sweeps.
pub fn lambda_integral(spec: &ThermalSpec, lp: &LoopSpec, p: &ModelParams, method: Quadrature) -> Result<LambdaResult> {
    let rule = method.rule()?;
    let center = propagate_node(spec.alpha0, lp, p)?;
    let v = (-center.gamma_damp).exp();
    if spec.is_pure() {
        return Ok(LambdaResult::new(Complex64::from_polar(v, center.theta), None));
    }
    average(spec, &rule, v, |alpha| {
        let node = propagate_node(alpha, lp, p)?;
        check_uniform_gamma(center.gamma_damp, node.gamma_damp, alpha)?;
        Ok(node.theta)
    })
}

fn average<F>(spec: &ThermalSpec, rule: &QuadratureRule, v: f64, theta: F) -> Result<LambdaResult>
where
    F: Fn(ComplexAmplitude) -> Result<f64> + Sync,
{
    let sigma = spec.sigma();
    let nodes = &rule.nodes;
    let phases: Vec<Complex64> = nodes
        .par_iter()
        .map(|&(x, y, _)| {
            let th = finite(theta(spec.alpha0 + sigma * Complex64::new(x, y))?, "node phase")?;
            Ok(Complex64::from_polar(1.0, th))
        })
        .collect::<Result<_>>()?;
    let terms: Vec<Complex64> = phases.iter().zip(nodes).map(|(f, &(_, _, w))| f * w).collect();
    let mean = pairwise_sum(&terms);
    let se = match rule.method {
        Quadrature::MonteCarlo { samples, .. } => {
            let dev: Vec<Complex64> = phases.iter().map(|f| Complex64::new((f - mean).norm_sqr(), 0.0)).collect();
            let m = samples as f64;
            Some(v * (pairwise_sum(&dev).re / (m * (m - 1.0))).sqrt())
        }
        Quadrature::GaussHermite { .. } => None,
    };
    Ok(LambdaResult::new(v * mean, se))
}

/// The loop phase written as `θ(α) = θ₀ + a Re α + b Im α` with an
/// amplitude-independent damping exponent.
///
/// Both branch amplitudes are affine in the initial `α` and their
/// difference does not depend on it, so every phase increment of the
/// branch engine is affine in `α` as well. [`AffinePhase::fit`] reads the
/// coefficients off three propagations and confirms the form on a fourth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffinePhase {
    pub theta0: f64,
    pub slope_re: f64,
    pub slope_im: f64,
    pub gamma_damp: f64,
}

/// Amplitude at which the fitted form is checked against propagation.
const AFFINE_PROBE: Complex64 = Complex64::new(37.0, -53.0);

impl AffinePhase {
    pub fn fit(lp: &LoopSpec, p: &ModelParams) -> Result<Self> {
        let zero = propagate_node(Complex64::new(0.0, 0.0), lp, p)?;
        let re = propagate_node(Complex64::new(1.0, 0.0), lp, p)?;
        let im = propagate_node(Complex64::new(0.0, 1.0), lp, p)?;
        let model = AffinePhase {
            theta0: zero.theta,
            slope_re: re.theta - zero.theta,
            slope_im: im.theta - zero.theta,
            gamma_damp: zero.gamma_damp,
        };
        check_uniform_gamma(zero.gamma_damp, re.gamma_damp, Complex64::new(1.0, 0.0))?;
        check_uniform_gamma(zero.gamma_damp, im.gamma_damp, Complex64::new(0.0, 1.0))?;
        let probe = propagate_node(AFFINE_PROBE, lp, p)?;
        check_uniform_gamma(zero.gamma_damp, probe.gamma_damp, AFFINE_PROBE)?;
        let predicted = model.theta(AFFINE_PROBE);
        if (probe.theta - predicted).abs() > 1e-9 * (1.0 + probe.theta.abs()) {
            return Err(Error::Invariant(format!(
                "loop phase is not affine in alpha: propagated {} vs fitted {}",
                probe.theta, predicted
            )));
        }
        Ok(model)
    }

    pub fn theta(&self, alpha: ComplexAmplitude) -> f64 {
        self.theta0 + self.slope_re * alpha.re + self.slope_im * alpha.im
    }

    pub fn visibility(&self) -> f64 {
        (-self.gamma_damp).exp()
    }

    /// Pure-state readout at `alpha`.
    pub fn readout(&self, alpha: ComplexAmplitude) -> QubitReadout {
        QubitReadout::new(self.theta(alpha), self.gamma_damp)
    }

    /// `|∇θ|` in the complex `α` plane; sets the fringe period `2π/|∇θ|`.
    pub fn gradient_norm(&self) -> f64 {
        self.slope_re.hypot(self.slope_im)
    }

    /// `Λ` from the fitted phase.
    pub fn lambda(&self, spec: &ThermalSpec, method: Quadrature) -> Result<LambdaResult> {
        self.lambda_with(spec, &method.rule()?)
    }

    /// [`lambda`](Self::lambda) with a prebuilt rule.
    pub fn lambda_with(&self, spec: &ThermalSpec, rule: &QuadratureRule) -> Result<LambdaResult> {
        let v = self.visibility();
        if spec.is_pure() {
            return Ok(LambdaResult::new(Complex64::from_polar(v, self.theta(spec.alpha0)), None));
        }
        average(spec, rule, v, |alpha| Ok(self.theta(alpha)))
    }

    /// Gaussian average of an affine phase in closed form:
    /// `Λ = v e^{iθ(α₀)} exp(-|∇θ|²(V-1)/8)`.
    pub fn lambda_exact(&self, spec: &ThermalSpec) -> LambdaResult {
        let g2 = self.slope_re.powi(2) + self.slope_im.powi(2);
        let modulus = self.visibility() * (-g2 * (spec.variance - 1.0) / 8.0).exp();
        LambdaResult::new(Complex64::from_polar(modulus, self.theta(spec.alpha0)), None)
    }
}

/// Readout of the undamped square loop of side `side_time` on a displaced
/// thermal state. The loop phase does not depend on `α`, so the thermal
/// average leaves it and the unit visibility unchanged.
pub fn unitary_thermal_phase(spec: &ThermalSpec, side_time: f64, p: &ModelParams) -> Result<QubitReadout> {
    if p.gamma() != 0.0 {
        return Err(Error::param("gamma", "the thermal square-loop phase needs gamma = 0"));
    }
    if side_time == 0.0 {
        return Ok(QubitReadout::new(0.0, 0.0));
    }
    let lp = LoopSpec::UnitarySquare { side_time };
    let r = lambda_integral(spec, &lp, p, Quadrature::GaussHermite { order: 8 })?;
    Ok(thermal_readout(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn variance_examples() {
        assert_abs_diff_eq!(variance_from_temperature(3f64.ln()).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(variance_from_temperature(0.01).unwrap(), 200.0 + 0.01 / 6.0, epsilon = 1e-8);
        assert_abs_diff_eq!(variance_from_temperature(50.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(variance_from_temperature(0.0).is_err());
        assert!(variance_from_temperature(-1.0).is_err());
        let vs: Vec<f64> = [0.1, 0.5, 1.0, 2.0].iter().map(|&b| variance_from_temperature(b).unwrap()).collect();
        assert!(vs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn p_weight_peak_and_normalization() {
        let spec = ThermalSpec::new(c(1.0, -2.0), 3.0).unwrap();
        assert_abs_diff_eq!(p_weight(c(1.0, -2.0), &spec).unwrap(), 1.0 / std::f64::consts::PI, epsilon = 1e-15);
        // midpoint rule on a ±6σ box in the α plane
        let s = ((spec.variance - 1.0) / 4.0).sqrt();
        let n = 400;
        let h = 12.0 * s / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = spec.alpha0 + c(-6.0 * s + (i as f64 + 0.5) * h, -6.0 * s + (j as f64 + 0.5) * h);
                total += p_weight(a, &spec).unwrap() * h * h;
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
        assert!(p_weight(c(0.0, 0.0), &ThermalSpec::new(c(0.0, 0.0), 1.0).unwrap()).is_err());
        assert!(ThermalSpec::new(c(0.0, 0.0), 0.5).is_err());
    }

    #[test]
    fn narrow_weight_concentrates_at_center() {
        let spec = ThermalSpec::new(c(0.5, 0.5), 1.0 + 1e-8).unwrap();
        assert!(p_weight(c(0.5, 0.5 + 1e-2), &spec).unwrap() < 1e-100);
    }

    #[test]
    fn readout_examples() {
        let r = thermal_readout(&LambdaResult::new(c(1.0, 0.0), None));
        assert_eq!((r.p_plus, r.p_minus), (1.0, 0.0));
        let r = thermal_readout(&LambdaResult::new(c(0.0, 0.0), None));
        assert_eq!((r.p_plus, r.p_minus), (0.5, 0.5));
        let v = 0.7;
        let r = thermal_readout(&LambdaResult::new(c(-v, 0.0), None));
        assert_abs_diff_eq!(r.p_plus, (1.0 - v) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.p_minus, (1.0 + v) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_quadrature_is_rejected() {
        let p = ModelParams::new(0.1, 1.0, 1e-3).unwrap();
        let lp = LoopSpec::DissipativeTwoLeg { t1: 1.0 };
        let spec = ThermalSpec::new(c(0.0, 0.0), 2.0).unwrap();
        assert!(lambda_integral(&spec, &lp, &p, Quadrature::GaussHermite { order: 1 }).is_err());
        assert!(lambda_integral(&spec, &lp, &p, Quadrature::MonteCarlo { samples: 999, seed: 1 }).is_err());
    }

    #[test]
    fn pure_case_reduction() {
        let p = ModelParams::new(0.2, 1.0, 1e-3).unwrap();
        let lp = LoopSpec::DissipativeTwoLeg { t1: 2.0 };
        let spec = ThermalSpec::new(c(1.5, 0.0), 1.0).unwrap();
        let r = lambda_integral(&spec, &lp, &p, Quadrature::GaussHermite { order: 8 }).unwrap();
        let node = propagate_node(c(1.5, 0.0), &lp, &p).unwrap();
        assert!((r.lambda - Complex64::from_polar((-node.gamma_damp).exp(), node.theta)).norm() < 1e-15);
        let r0 = lambda_integral(&ThermalSpec::new(c(0.0, 0.0), 1.0).unwrap(), &lp, &p, Quadrature::GaussHermite { order: 8 }).unwrap();
        assert_abs_diff_eq!(r0.theta_tilde, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r0.visibility, (-node.gamma_damp).exp(), epsilon = 1e-15);
    }

    #[test]
    fn propagated_and_affine_averages_agree() {
        let p = ModelParams::new(0.2, 1.0, 1e-3).unwrap();
        let lp = LoopSpec::DissipativeTwoLeg { t1: 1.0 };
        let spec = ThermalSpec::new(c(2.0, -1.0), 6.0).unwrap();
        let q = Quadrature::GaussHermite { order: 12 };
        let direct = lambda_integral(&spec, &lp, &p, q).unwrap();
        let model = AffinePhase::fit(&lp, &p).unwrap();
        let fitted = model.lambda(&spec, q).unwrap();
        assert!((direct.lambda - fitted.lambda).norm() < 1e-12);
        assert!((model.lambda_exact(&spec).lambda - fitted.lambda).norm() < 1e-12);
        assert!(direct.visibility <= model.visibility());
    }

    #[test]
    fn delta_limit_is_continuous() {
        let p = ModelParams::new(0.5, 1.0, 1e-3).unwrap();
        let model = AffinePhase::fit(&LoopSpec::DissipativeTwoLeg { t1: 1.0 }, &p).unwrap();
        let pure = model.lambda(&ThermalSpec::new(c(3.0, 0.0), 1.0).unwrap(), Quadrature::GaussHermite { order: 16 }).unwrap();
        let near = model.lambda(&ThermalSpec::new(c(3.0, 0.0), 1.0 + 1e-3).unwrap(), Quadrature::GaussHermite { order: 16 }).unwrap();
        assert!((pure.lambda - near.lambda).norm() < 1e-4);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let p = ModelParams::new(0.5, 1.0, 1e-3).unwrap();
        let model = AffinePhase::fit(&LoopSpec::DissipativeTwoLeg { t1: 2.0 }, &p).unwrap();
        let spec = ThermalSpec::new(c(1.0, 1.0), 20.0).unwrap();
        let mc = Quadrature::MonteCarlo { samples: 20_000, seed: 7 };
        let a = model.lambda(&spec, mc).unwrap();
        let b = model.lambda(&spec, mc).unwrap();
        assert_eq!(a.lambda.re.to_bits(), b.lambda.re.to_bits());
        assert_eq!(a.lambda.im.to_bits(), b.lambda.im.to_bits());
        let gh = model.lambda(&spec, Quadrature::GaussHermite { order: 64 }).unwrap();
        assert!((a.lambda - gh.lambda).norm() < 3.0 * a.standard_error.unwrap());
    }

    #[test]
    fn unitary_thermal_phase_is_amplitude_independent() {
        let p = ModelParams::new(1.0, 0.0, 1e-3).unwrap();
        let r = unitary_thermal_phase(&ThermalSpec::new(c(3.0, 0.0), 50.0).unwrap(), 0.5, &p).unwrap();
        let r0 = unitary_thermal_phase(&ThermalSpec::new(c(0.0, 0.0), 1.0).unwrap(), 0.5, &p).unwrap();
        assert_abs_diff_eq!(r.theta, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r.theta, r0.theta, epsilon = 1e-9);
        assert_abs_diff_eq!(r.visibility(), 1.0, epsilon = 1e-9);
        let z = unitary_thermal_phase(&ThermalSpec::new(c(3.0, 0.0), 50.0).unwrap(), 0.0, &p).unwrap();
        assert_eq!(z.p_plus, 1.0);
        assert!(unitary_thermal_phase(&ThermalSpec::new(c(0.0, 0.0), 2.0).unwrap(), 0.5, &p.with_dt(1e-3).unwrap()).is_ok());
        let damped = ModelParams::new(1.0, 0.1, 1e-3).unwrap();
        assert!(unitary_thermal_phase(&ThermalSpec::new(c(0.0, 0.0), 2.0).unwrap(), 0.5, &damped).is_err());
    }
}
