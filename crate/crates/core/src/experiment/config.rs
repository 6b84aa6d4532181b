//! Flat `key = value` experiment configuration.
//!
//! Every experiment has a fixed key table with defaults. A config file may
//! set any of those keys and `--set key=value` overrides win over the file.
//! Unknown keys are rejected so that a typo cannot silently fall back to a
//! default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    UnitaryLoop,
    DissipativeLoop,
    ThermalSweep,
    VarianceSweep,
    Convergence,
    Validate,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::UnitaryLoop,
        Experiment::DissipativeLoop,
        Experiment::ThermalSweep,
        Experiment::VarianceSweep,
        Experiment::Convergence,
        Experiment::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::UnitaryLoop => "unitary-loop",
            Experiment::DissipativeLoop => "dissipative-loop",
            Experiment::ThermalSweep => "thermal-sweep",
            Experiment::VarianceSweep => "variance-sweep",
            Experiment::Convergence => "convergence",
            Experiment::Validate => "validate",
        }
    }

    /// Accepted keys with their defaults and a one-line description.
    pub fn keys(self) -> &'static [(&'static str, f64, &'static str)] {
        match self {
            Experiment::UnitaryLoop => &[
                ("eta", 1.0, "coupling"),
                ("alpha_re", 0.5, "initial amplitude, real part"),
                ("alpha_im", 0.0, "initial amplitude, imaginary part"),
                ("T_min", 0.25, "smallest square side time"),
                ("T_max", 1.0, "largest square side time"),
                ("T_step", 0.25, "side time step"),
                ("dt", 1e-3, "Trotter step (Richardson pair dt, dt/2)"),
                ("fock", 1.0, "1 to run the Fock oracle as well"),
                ("d_F", 40.0, "Fock truncation"),
            ],
            Experiment::DissipativeLoop => &[
                ("gamma", 1.0, "amplitude damping rate"),
                ("eta_over_gamma", 0.05, "coupling in units of gamma"),
                ("gamma_T1", 20.0, "first-leg duration in units of 1/gamma"),
                ("alpha_min", 0.0, "initial amplitude grid, real part"),
                ("alpha_max", 300.0, ""),
                ("alpha_step", 2.0, ""),
                ("alpha_im", 0.0, "initial amplitude, imaginary part"),
                ("dt", 1e-3, "Trotter step (Richardson pair dt, dt/2)"),
                ("fock", 0.0, "1 to run the Fock oracle as well"),
                ("d_F", 60.0, "Fock truncation"),
            ],
            Experiment::ThermalSweep => &[
                ("gamma", 1.0, "amplitude damping rate"),
                ("eta_over_gamma", 0.05, "coupling in units of gamma"),
                ("gamma_T1", 20.0, "first-leg duration in units of 1/gamma"),
                ("alpha0_min", 0.0, "displacement grid, real part"),
                ("alpha0_max", 300.0, ""),
                ("alpha0_step", 2.0, ""),
                ("alpha0_im", 0.0, "displacement, imaginary part"),
                ("V_min", 1.0, "variance grid"),
                ("V_max", 60.0, ""),
                ("V_step", 1.0, ""),
                ("dt", 1e-3, "Trotter step"),
                ("quadrature_order", 64.0, "Gauss-Hermite nodes per axis"),
            ],
            Experiment::VarianceSweep => &[
                ("gamma", 1.0, "amplitude damping rate"),
                ("eta_over_gamma", 0.05, "coupling in units of gamma"),
                ("gamma_T1", 20.0, "first-leg duration in units of 1/gamma"),
                ("alpha0_re", 0.0, "displacement, real part"),
                ("alpha0_im", 0.0, "displacement, imaginary part"),
                ("V_min", 1.0, "variance grid"),
                ("V_max", 60.0, ""),
                ("V_step", 1.0, ""),
                ("dt", 1e-3, "Trotter step"),
                ("quadrature_order", 64.0, "Gauss-Hermite nodes per axis"),
                ("samples", 0.0, "Monte Carlo samples instead of Gauss-Hermite when > 0"),
                ("seed", 1.0, "Monte Carlo seed"),
            ],
            Experiment::Convergence => &[
                ("gamma", 1.0, "amplitude damping rate"),
                ("eta_over_gamma", 0.5, "coupling in units of gamma"),
                ("gamma_T1", 2.0, "first-leg duration in units of 1/gamma"),
                ("alpha_re", 0.5, "initial amplitude, real part"),
                ("alpha_im", 0.0, "initial amplitude, imaginary part"),
                ("dt0", 1e-3, "largest step; halved levels-1 times"),
                ("levels", 4.0, "number of step sizes (>= 4)"),
                ("fock", 1.0, "1 to include the Trotter-vs-RK4 Fock study"),
                ("d_F", 20.0, "Fock truncation"),
            ],
            Experiment::Validate => &[
                ("gamma", 1.0, "amplitude damping rate (0 skips the damped checks)"),
                ("eta", 0.5, "coupling"),
                ("gamma_T1", 1.0, "first-leg duration in units of 1/gamma"),
                ("dt", 1e-3, "Trotter step"),
                ("d_F", 30.0, "Fock truncation"),
                ("seed", 1.0, "Monte Carlo seed"),
                ("mutate", 0.0, "1 flips the sign of the unitary phase update"),
            ],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Resolved configuration: every key of the experiment's table has a value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    params: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let params = experiment.keys().iter().map(|&(k, v, _)| (k.to_string(), v)).collect();
        ExperimentConfig { experiment, params }
    }

    /// Defaults, then `file` (if any), then `overrides` in order.
    pub fn load(experiment: Experiment, file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut cfg = Self::defaults(experiment);
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        for o in overrides {
            let (k, v) = split_assignment(o).ok_or_else(|| Error::Config(format!("expected key=value, got `{o}`")))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Apply `key = value` lines; `#` starts a comment. An `experiment`
    /// line must name this experiment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = split_assignment(line)
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got `{raw}`", i + 1)))?;
            if k == "experiment" {
                if v != self.experiment.name() {
                    return Err(Error::Config(format!(
                        "line {}: file is for `{v}` but `{}` was requested",
                        i + 1,
                        self.experiment
                    )));
                }
                continue;
            }
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let slot = self.params.get_mut(key).ok_or_else(|| {
            let known: Vec<&str> = self.experiment.keys().iter().map(|k| k.0).collect();
            Error::Config(format!("unknown key `{key}` for {} (known: {})", self.experiment, known.join(", ")))
        })?;
        let v: f64 = value.parse().map_err(|_| Error::Config(format!("`{key}`: `{value}` is not a number")))?;
        if !v.is_finite() {
            return Err(Error::Config(format!("`{key}` must be finite")));
        }
        *slot = v;
        Ok(())
    }

    pub fn get(&self, key: &str) -> f64 {
        *self.params.get(key).unwrap_or_else(|| panic!("`{key}` is not a {} key", self.experiment))
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// A non-negative integer parameter.
    pub fn count(&self, key: &str) -> Result<usize> {
        let v = self.get(key);
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::Config(format!("`{key}` must be a non-negative integer, got {v}")));
        }
        Ok(v as usize)
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            v if v == 0.0 => Ok(false),
            v if v == 1.0 => Ok(true),
            v => Err(Error::Config(format!("`{key}` must be 0 or 1, got {v}"))),
        }
    }

    /// Grid `{prefix}_min, {prefix}_min + {prefix}_step, ..., <= {prefix}_max`.
    pub fn grid(&self, prefix: &str) -> Result<Vec<f64>> {
        let (lo, hi, step) =
            (self.get(&format!("{prefix}_min")), self.get(&format!("{prefix}_max")), self.get(&format!("{prefix}_step")));
        grid(lo, hi, step).map_err(|reason| Error::Config(format!("{prefix} grid: {reason}")))
    }

    /// Canonical text form; the hash is taken over it.
    pub fn canonical(&self) -> String {
        let mut s = format!("experiment={}\n", self.experiment);
        for (k, v) in &self.params {
            s.push_str(&format!("{k}={v:?}\n"));
        }
        s
    }

    /// SHA-256 of [`canonical`](Self::canonical), hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn split_assignment(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty() && !v.is_empty()).then_some((k, v))
}

pub(crate) fn grid(lo: f64, hi: f64, step: f64) -> std::result::Result<Vec<f64>, String> {
    if !(step > 0.0) {
        return Err(format!("step must be > 0, got {step}"));
    }
    if !(hi >= lo) {
        return Err(format!("max {hi} is below min {lo}"));
    }
    let n = ((hi - lo) / step * (1.0 + 1e-12)).floor() as usize + 1;
    if n > 10_000_000 {
        return Err(format!("{n} points is too many"));
    }
    Ok((0..n).map(|i| lo + i as f64 * step).collect())
}
