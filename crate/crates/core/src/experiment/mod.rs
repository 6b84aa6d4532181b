//! The command-line experiments as library calls.
//!
//! [`run`] resolves an [`ExperimentConfig`] into a [`Report`]: a table of
//! records plus provenance. Sweep points are evaluated in parallel and
//! collected in grid order, so the output never depends on scheduling.

pub mod config;
pub mod output;

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

pub use config::{Experiment, ExperimentConfig};
pub use output::{Cell, Format, Provenance, Report, Table};

use crate::branch::{self, BranchState, PhaseRule};
use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, Method};
use crate::model::{ModelParams, PhiSchedule, QubitReadout};
use crate::numerics::{angle_diff, loglog_slope, richardson};
use crate::path::{self, LoopSpec};
use crate::thermal::{self, AffinePhase, Quadrature, ThermalSpec};

/// Minimum number of grid points per fringe period before a sweep warns.
pub const POINTS_PER_FRINGE: f64 = 8.0;

/// Run one experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let mut prov = Provenance::new(cfg);
    let mut failure = None;
    let table = match cfg.experiment {
        Experiment::UnitaryLoop => unitary_loop(cfg, &mut prov)?,
        Experiment::DissipativeLoop => dissipative_loop(cfg, &mut prov)?,
        Experiment::ThermalSweep => thermal_sweep(cfg, &mut prov)?,
        Experiment::VarianceSweep => variance_sweep(cfg, &mut prov)?,
        Experiment::Convergence => convergence(cfg, &mut prov)?,
        Experiment::Validate => {
            let (table, failed) = validate(cfg, &mut prov)?;
            if !failed.is_empty() {
                failure = Some(format!("failed checks: {}", failed.join(", ")));
            }
            table
        }
    };
    for w in &prov.warnings {
        log::warn!("{w}");
    }
    Ok(Report { config: cfg.clone(), provenance: prov, table, failure })
}

fn alpha(cfg: &ExperimentConfig, re: &str, im: &str) -> Complex64 {
    Complex64::new(cfg.get(re), cfg.get(im))
}

/// `(η, γ, T₁)` from the dimensionless keys.
fn damped_params(cfg: &ExperimentConfig) -> Result<(f64, f64, f64)> {
    let gamma = cfg.get("gamma");
    if !(gamma > 0.0) {
        return Err(Error::Config(format!("gamma must be > 0 for {}, got {gamma}", cfg.experiment)));
    }
    Ok((cfg.get("eta_over_gamma") * gamma, gamma, cfg.get("gamma_T1") / gamma))
}

fn readout_cells(r: &QubitReadout) -> [Cell; 4] {
    [r.gamma_damp.into(), r.visibility().into(), r.p_plus.into(), r.p_minus.into()]
}

/// Fock run with its phase unwrapped next to a reference value.
fn fock_readout(alpha: Complex64, sched: &PhiSchedule, p: &ModelParams, d: usize, near: f64) -> Result<QubitReadout> {
    let rho = fock::evolve(&DensityMatrix::plus_coherent(alpha, d)?, sched, p, Method::TrotterSplit)?;
    let r = fock::readout(&rho);
    Ok(QubitReadout::new(near + angle_diff(r.theta, near), r.gamma_damp))
}

/// Branch readout extrapolated from steps `dt` and `dt/2`.
fn extrapolated_readout(alpha: Complex64, sched: &PhiSchedule, p: &ModelParams) -> Result<(QubitReadout, BranchState)> {
    let coarse = branch::readout(&branch::propagate(&BranchState::plus(alpha), sched, p)?);
    let fine_state = branch::propagate(&BranchState::plus(alpha), sched, &p.with_dt(0.5 * p.dt())?)?;
    let fine = branch::readout(&fine_state);
    let r = QubitReadout::new(
        richardson(coarse.theta, fine.theta, 1),
        richardson(coarse.gamma_damp, fine.gamma_damp, 1),
    );
    Ok((r, fine_state))
}

fn unitary_loop(cfg: &ExperimentConfig, prov: &mut Provenance) -> Result<Table> {
    let eta = cfg.get("eta");
    let a = alpha(cfg, "alpha_re", "alpha_im");
    let with_fock = cfg.flag("fock")?;
    let d = cfg.count("d_F")?;
    let p = ModelParams::new(eta, 0.0, cfg.get("dt"))?;
    prov.dt = Some(p.dt());
    prov.d_f = with_fock.then_some(d);
    let sides = cfg.grid("T")?;
    if sides.iter().any(|&t| t <= 0.0) {
        return Err(Error::Config("T grid must be > 0".into()));
    }
    let mut table = Table::new(&[
        "T", "alpha_re", "alpha_im", "theta_analytic", "theta_branch", "theta_fock", "abs_diff",
        "gamma_damp", "visibility", "p_plus", "p_minus",
    ]);
    let rows: Vec<Vec<Cell>> = sides
        .par_iter()
        .map(|&t| {
            let sched = path::square_schedule(t)?;
            let (r, _) = extrapolated_readout(a, &sched, &p)?;
            let theta_fock = if with_fock { Some(fock_readout(a, &sched, &p, d, r.theta)?.theta) } else { None };
            let analytic = eta * eta * t * t;
            let mut row = vec![t.into(), a.re.into(), a.im.into(), analytic.into(), r.theta.into()];
            row.push(theta_fock.into());
            row.push((r.theta - analytic).abs().into());
            row.extend(readout_cells(&r));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn dissipative_loop(cfg: &ExperimentConfig, prov: &mut Provenance) -> Result<Table> {
    let (eta, gamma, t1) = damped_params(cfg)?;
    let p = ModelParams::new(eta, gamma, cfg.get("dt"))?;
    let with_fock = cfg.flag("fock")?;
    let d = cfg.count("d_F")?;
    prov.dt = Some(p.dt());
    prov.d_f = with_fock.then_some(d);
    let sched = path::two_leg_schedule(gamma, t1)?;
    let im = cfg.get("alpha_im");
    let grid = cfg.grid("alpha")?;
    let mut table = Table::new(&[
        "alpha_re", "alpha_im", "theta", "gamma_damp", "visibility", "p_plus", "p_minus", "separation",
        "theta_closed_form", "gamma_closed_form", "theta_continuum", "gamma_continuum", "theta_fock", "gamma_fock",
    ]);
    let rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|&re| {
            let a = Complex64::new(re, im);
            let (r, end) = extrapolated_readout(a, &sched, &p)?;
            let (tp, gp) = branch::closed_form_loop(re, &p, t1)?;
            let (tc, gc) = branch::continuum_loop(a, &p, t1)?;
            let f = if with_fock { Some(fock_readout(a, &sched, &p, d, r.theta)?) } else { None };
            let mut row = vec![re.into(), im.into(), r.theta.into()];
            row.extend(readout_cells(&r));
            row.extend([end.separation().into(), tp.into(), gp.into(), tc.into(), gc.into()]);
            row.push(f.map(|f| f.theta).into());
            row.push(f.map(|f| f.gamma_damp).into());
            Ok(row)
        })
        .collect::<Result<_>>()?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn quadrature_order(cfg: &ExperimentConfig) -> Result<usize> {
    let n = cfg.count("quadrature_order")?;
    if n < 2 {
        return Err(Error::Config(format!("quadrature_order must be >= 2, got {n}")));
    }
    Ok(n)
}

fn variance_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let vs = cfg.grid("V")?;
    if vs[0] < 1.0 {
        return Err(Error::Config(format!("V must be >= 1, got {}", vs[0])));
    }
    Ok(vs)
}

fn thermal_sweep(cfg: &ExperimentConfig, prov: &mut Provenance) -> Result<Table> {
    let (eta, gamma, t1) = damped_params(cfg)?;
    let p = ModelParams::new(eta, gamma, cfg.get("dt"))?;
    let order = quadrature_order(cfg)?;
    prov.dt = Some(p.dt());
    prov.quadrature_order = Some(order);
    let alphas = cfg.grid("alpha0")?;
    let vs = variance_grid(cfg)?;
    let im = cfg.get("alpha0_im");
    let model = AffinePhase::fit(&LoopSpec::DissipativeTwoLeg { t1 }, &p)?;
    if let Some(w) = fringe_warning(model.slope_re, cfg.get("alpha0_step")) {
        prov.warnings.push(w);
    }
    let rule = Quadrature::GaussHermite { order }.rule()?;
    let points: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| vs.iter().map(move |&v| (a, v))).collect();
    let mut table = Table::new(&["alpha0_re", "alpha0_im", "V", "theta", "gamma_damp", "visibility", "p_plus", "p_minus"]);
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(a, v)| {
            let spec = ThermalSpec::new(Complex64::new(a, im), v)?;
            let lam = model.lambda_with(&spec, &rule)?;
            let r = thermal::thermal_readout(&lam);
            let mut row = vec![a.into(), im.into(), v.into(), lam.theta_tilde.into()];
            row.extend(readout_cells(&r));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Warning text when `step` resolves a fringe of phase slope `slope` with
/// fewer than [`POINTS_PER_FRINGE`] points.
pub fn fringe_warning(slope: f64, step: f64) -> Option<String> {
    if slope == 0.0 {
        return None;
    }
    let period = TAU / slope.abs();
    (step > period / POINTS_PER_FRINGE).then(|| {
        format!(
            "alpha0 step {step} gives {:.1} points per fringe (period {period:.4}); at least {POINTS_PER_FRINGE} recommended",
            period / step
        )
    })
}

fn variance_sweep(cfg: &ExperimentConfig, prov: &mut Provenance) -> Result<Table> {
    let (eta, gamma, t1) = damped_params(cfg)?;
    let p = ModelParams::new(eta, gamma, cfg.get("dt"))?;
    let samples = cfg.count("samples")?;
    let method = if samples > 0 {
        Quadrature::MonteCarlo { samples, seed: cfg.count("seed")? as u64 }
    } else {
        let order = quadrature_order(cfg)?;
        prov.quadrature_order = Some(order);
        Quadrature::GaussHermite { order }
    };
    prov.dt = Some(p.dt());
    let a0 = alpha(cfg, "alpha0_re", "alpha0_im");
    let vs = variance_grid(cfg)?;
    let model = AffinePhase::fit(&LoopSpec::DissipativeTwoLeg { t1 }, &p)?;
    let rule = method.rule()?;
    let mut table =
        Table::new(&["V", "theta", "gamma_damp", "visibility", "p_plus", "p_minus", "standard_error"]);
    for &v in &vs {
        let lam = model.lambda_with(&ThermalSpec::new(a0, v)?, &rule)?;
        let r = thermal::thermal_readout(&lam);
        let mut row = vec![v.into(), lam.theta_tilde.into()];
        row.extend(readout_cells(&r));
        row.push(lam.standard_error.into());
        table.push(row);
    }
    Ok(table)
}

/// Step-size study on the two-leg loop. The branch error is measured
/// against the continuum loop phase; the Fock error is the Frobenius gap
/// between the Trotter split and RK4 at the finest step.
fn convergence(cfg: &ExperimentConfig, prov: &mut Provenance) -> Result<Table> {
    let (eta, gamma, t1) = damped_params(cfg)?;
    let levels = cfg.count("levels")?;
    if levels < 4 {
        return Err(Error::Config(format!("levels must be >= 4, got {levels}")));
    }
    let dt0 = cfg.get("dt0");
    let a = alpha(cfg, "alpha_re", "alpha_im");
    let with_fock = cfg.flag("fock")?;
    let d = cfg.count("d_F")?;
    prov.dt = Some(dt0);
    prov.d_f = with_fock.then_some(d);
    let sched = path::two_leg_schedule(gamma, t1)?;
    let steps: Vec<f64> = (0..levels).map(|k| dt0 / 2f64.powi(k as i32)).collect();
    let params: Vec<ModelParams> = steps.iter().map(|&dt| ModelParams::new(eta, gamma, dt)).collect::<Result<_>>()?;

    let reference = branch::continuum_loop(a, &params[0], t1)?.0;
    let branch_err: Vec<f64> = params
        .par_iter()
        .map(|p| Ok((branch::readout(&branch::propagate(&BranchState::plus(a), &sched, p)?).theta - reference).abs()))
        .collect::<Result<_>>()?;

    let mut table = Table::new(&["engine", "dt", "error", "local_slope", "fit_slope"]);
    let mut emit = |engine: &str, errs: &[f64]| {
        let fit = loglog_slope(&steps, errs);
        for (k, (&dt, &e)) in steps.iter().zip(errs).enumerate() {
            let local = (k > 0).then(|| (errs[k - 1] / e).ln() / 2f64.ln());
            table.push(vec![engine.into(), dt.into(), e.into(), local.into(), fit.into()]);
        }
    };
    emit("branch", &branch_err);

    if with_fock {
        let rho0 = DensityMatrix::plus_coherent(a, d)?;
        let finest = params.last().expect("levels >= 4");
        let exact = fock::evolve(&rho0, &sched, finest, Method::DirectRk4)?;
        let fock_err: Vec<f64> = params
            .par_iter()
            .map(|p| Ok(fock::evolve(&rho0, &sched, p, Method::TrotterSplit)?.frobenius_distance(&exact)))
            .collect::<Result<_>>()?;
        emit("fock", &fock_err);
    }
    Ok(table)
}

/// Outcome of one validation check.
struct Check {
    name: &'static str,
    gating: bool,
    status: &'static str,
    measured: Option<f64>,
    tolerance: Option<f64>,
    detail: String,
}

impl Check {
    fn measure(name: &'static str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let ok = measured <= tolerance;
        Check {
            name,
            gating: true,
            status: if ok { "pass" } else { "fail" },
            measured: Some(measured),
            tolerance: Some(tolerance),
            detail: detail.into(),
        }
    }

    fn skipped(name: &'static str, detail: impl Into<String>) -> Self {
        Check { name, gating: true, status: "skipped", measured: None, tolerance: None, detail: detail.into() }
    }

    /// Reported for reference only; never fails the run.
    fn reference(mut self) -> Self {
        self.gating = false;
        self
    }
}

fn validate(cfg: &ExperimentConfig, prov: &mut Provenance) -> Result<(Table, Vec<&'static str>)> {
    let gamma = cfg.get("gamma");
    let eta = cfg.get("eta");
    let dt = cfg.get("dt");
    let d = cfg.count("d_F")?;
    if gamma < 0.0 {
        return Err(Error::Config(format!("gamma must be >= 0, got {gamma}")));
    }
    let rule = PhaseRule { unitary_sign: if cfg.flag("mutate")? { -1.0 } else { 1.0 } };
    prov.dt = Some(dt);
    prov.d_f = Some(d);
    let run = |a: Complex64, sched: &PhiSchedule, p: &ModelParams| {
        branch::propagate_with_rule(&BranchState::plus(a), sched, p, rule, |_, _| {})
    };
    let mut checks = Vec::new();

    // undamped square
    let side = 0.5;
    let p0 = ModelParams::new(eta, 0.0, dt)?;
    let square = path::square_schedule(side)?;
    let thetas: Vec<f64> = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(2.0, 3.0)]
        .iter()
        .map(|&a| Ok(branch::readout(&run(a, &square, &p0)?).theta))
        .collect::<Result<_>>()?;
    let area = path::enclosed_area(&square, eta)?;
    checks.push(Check::measure("unitary-phase", (thetas[0] - 2.0 * area).abs(), 1e-9, "square loop, theta = 2 x enclosed area"));
    checks.push(
        Check::measure("unitary-phase-square", (thetas[0] - eta * eta * side * side).abs(), 1e-6, "theta = eta^2 T^2")
            .reference(),
    );
    let spread = thetas.iter().fold(0.0f64, |m, t| m.max((t - thetas[0]).abs()));
    checks.push(Check::measure("unitary-alpha-independence", spread, 1e-9, "alpha in {0, 1, 2+3i}"));

    if gamma == 0.0 {
        for name in ["closing-time", "loop-closure", "damping-alpha-independence", "damping-gamma-cubed", "continuum-loop", "engine-equivalence", "dyadic-damping", "thermal-quadrature"] {
            checks.push(Check::skipped(name, "needs gamma > 0"));
        }
    } else {
        damped_checks(cfg, gamma, eta, dt, d, &run, &mut checks)?;
    }

    let mut table = Table::new(&["check", "status", "gating", "measured", "tolerance", "detail"]);
    let mut failed = Vec::new();
    for c in checks {
        if c.gating && c.status == "fail" {
            failed.push(c.name);
        }
        table.push(vec![c.name.into(), c.status.into(), c.gating.into(), c.measured.into(), c.tolerance.into(), c.detail.into()]);
    }
    Ok((table, failed))
}

fn damped_checks<F>(
    cfg: &ExperimentConfig,
    gamma: f64,
    eta: f64,
    dt: f64,
    d: usize,
    run: &F,
    checks: &mut Vec<Check>,
) -> Result<()>
where
    F: Fn(Complex64, &PhiSchedule, &ModelParams) -> Result<BranchState>,
{
    let t1 = cfg.get("gamma_T1") / gamma;
    let p = ModelParams::new(eta, gamma, dt)?;
    let t2 = path::solve_closing_time(gamma, t1)?;
    let t2b = path::closing_time_by_bisection(gamma, t1)?;
    checks.push(Check::measure("closing-time", (t2 - t2b).abs() / t2, 1e-12, "closed form vs bisection, relative"));

    let sched = path::two_leg_schedule(gamma, t1)?;
    let amplitudes = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(5.0, 0.0), Complex64::new(0.0, 3.0)];
    let ends: Vec<BranchState> = amplitudes.iter().map(|&a| run(a, &sched, &p)).collect::<Result<_>>()?;
    let sep = ends.iter().map(BranchState::separation).fold(0.0, f64::max);
    checks.push(Check::measure("loop-closure", sep / (eta / gamma), 1e-6, "branch separation in units of eta/gamma"));
    let g: Vec<f64> = ends.iter().map(|s| branch::readout(s).gamma_damp).collect();
    let spread = g.iter().fold(0.0f64, |m, x| m.max((x - g[0]).abs()));
    checks.push(Check::measure("damping-alpha-independence", spread, 1e-9, "alpha in {0, 1, 5, 3i}"));

    // Γ̃ = 2γ²Γ/η² against γ at fixed η and T₁
    let gammas = [1e-2, 1e-3, 1e-4];
    let scaled: Vec<f64> = gammas
        .iter()
        .map(|&g| {
            let pg = ModelParams::new(eta, g, dt)?;
            let big = branch::readout(&run(Complex64::new(0.0, 0.0), &path::two_leg_schedule(g, t1)?, &pg)?).gamma_damp;
            Ok(2.0 * g * g * big / (eta * eta))
        })
        .collect::<Result<_>>()?;
    let slope = loglog_slope(&gammas, &scaled);
    checks.push(Check::measure("damping-gamma-cubed", (slope - 3.0).abs(), 0.1, format!("log-log slope {slope:.4}")));

    let a = Complex64::new(1.0, 0.0);
    let fine = p.with_dt(0.5 * dt)?;
    let coarse_r = branch::readout(&run(a, &sched, &p)?);
    let fine_r = branch::readout(&run(a, &sched, &fine)?);
    let theta = richardson(coarse_r.theta, fine_r.theta, 1);
    let big = richardson(coarse_r.gamma_damp, fine_r.gamma_damp, 1);
    let (tc, gc) = branch::continuum_loop(a, &p, t1)?;
    let (tp, gp) = branch::closed_form_loop(1.0, &p, t1)?;
    let rel = ((theta - tc) / tc).abs().max(((big - gc) / gc).abs());
    checks.push(Check::measure("continuum-loop", rel, 1e-4, "theta and Gamma vs continuum forms, relative"));
    checks.push(Check::measure("closed-form-theta", ((theta - tp) / tp).abs(), 1e-4, format!("ratio {:.6}", theta / tp)).reference());
    checks.push(Check::measure("closed-form-gamma", ((big - gp) / gp).abs(), 1e-4, format!("ratio {:.6}", big / gp)).reference());

    // engine equivalence and density-matrix invariants
    let mut worst = 0.0f64;
    let mut trace_drift = 0.0f64;
    let mut herm = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for &a in &[Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)] {
        let b = branch::readout(&run(a, &sched, &p)?);
        let rho = fock::evolve(&DensityMatrix::plus_coherent(a, d)?, &sched, &p, Method::TrotterSplit)?;
        let f = fock::readout(&rho);
        worst = worst
            .max(angle_diff(f.theta, b.theta).abs())
            .max((f.gamma_damp - b.gamma_damp).abs())
            .max((f.p_plus - b.p_plus).abs());
        trace_drift = trace_drift.max((rho.trace().re - 1.0).abs());
        herm = herm.max(rho.hermiticity_defect());
        min_eig = min_eig.min(rho.min_eigenvalue());
    }
    checks.push(Check::measure("engine-equivalence", worst, 1e-4, "branch vs Fock (theta, Gamma, P+), alpha in {0, 0.5}"));
    checks.push(Check::measure("trace", trace_drift, 1e-8, "Fock trace drift"));
    checks.push(Check::measure("hermiticity", herm, 1e-10, "Fock Hermiticity defect"));
    checks.push(Check::measure("positivity", (-min_eig).max(0.0), 1e-8, format!("min eigenvalue {min_eig:.3e}")));

    let pairs = [
        (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)),
        (Complex64::new(0.5, 0.5), Complex64::new(0.0, -1.0)),
        (Complex64::new(1.2, -0.3), Complex64::new(1.2, -0.3)),
    ];
    let mut dyad = 0.0f64;
    for (l1, l2) in pairs {
        let exact = fock::dissipative_dyadic(l1, l2, gamma, t1, d)?;
        let num = fock::evolve_dyad(l1, l2, gamma, t1, d, dt, Method::TrotterSplit)?;
        dyad = dyad.max((exact - num).norm());
    }
    checks.push(Check::measure("dyadic-damping", dyad, 1e-6, "closed-form dyad damping vs eta = 0 evolution, Frobenius"));

    let model = AffinePhase::fit(&LoopSpec::DissipativeTwoLeg { t1 }, &p)?;
    let spec = ThermalSpec::new(Complex64::new(2.0, 0.5), 5.0)?;
    let gh = model.lambda(&spec, Quadrature::GaussHermite { order: 32 })?;
    let seed = cfg.count("seed")? as u64;
    let mc = model.lambda(&spec, Quadrature::MonteCarlo { samples: 10_000, seed })?;
    let se = mc.standard_error.expect("Monte Carlo reports a standard error");
    checks.push(Check::measure("thermal-quadrature", (gh.lambda - mc.lambda).norm() / se, 3.0, "|GH - MC| in standard errors"));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(e: Experiment, sets: &[&str]) -> ExperimentConfig {
        let o: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        ExperimentConfig::load(e, None, &o).unwrap()
    }

    #[test]
    fn fringe_warning_threshold() {
        assert!(fringe_warning(0.1, 2.0).is_none());
        assert!(fringe_warning(0.1, 10.0).is_some());
        assert!(fringe_warning(0.0, 10.0).is_none());
    }

    #[test]
    fn unitary_loop_rows() {
        let r = run(&cfg(Experiment::UnitaryLoop, &["fock=0"])).unwrap();
        let t = r.table.numbers("T").unwrap();
        let th = r.table.numbers("theta_branch").unwrap();
        assert_eq!(t, vec![0.25, 0.5, 0.75, 1.0]);
        for (t, th) in t.iter().zip(&th) {
            assert!((th - 2.0 * t * t).abs() < 1e-9);
        }
    }

    #[test]
    fn variance_sweep_starts_pure() {
        let r = run(&cfg(Experiment::VarianceSweep, &["V_max=5", "quadrature_order=16", "gamma_T1=2"])).unwrap();
        let p_plus = r.table.numbers("p_plus").unwrap();
        let vis = r.table.numbers("visibility").unwrap();
        let g = r.table.numbers("gamma_damp").unwrap();
        assert!((vis[0] - (-g[0]).exp()).abs() < 1e-15);
        assert!((p_plus[0] - 0.5 * (1.0 + vis[0])).abs() < 1e-15);
        assert!(p_plus.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn coarse_sweep_warns() {
        let r = run(&cfg(
            Experiment::ThermalSweep,
            &["alpha0_max=200", "alpha0_step=50", "V_max=2", "quadrature_order=8", "gamma_T1=2"],
        ))
        .unwrap();
        assert_eq!(r.provenance.warnings.len(), 1);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(run(&cfg(Experiment::Convergence, &["levels=3"])), Err(Error::Config(_))));
        assert!(matches!(run(&cfg(Experiment::VarianceSweep, &["V_min=0.5"])), Err(Error::Config(_))));
        assert!(matches!(run(&cfg(Experiment::DissipativeLoop, &["gamma=0"])), Err(Error::Config(_))));
    }
}
