//! Two-leg loop closed by damping alone: drive at φ = 0 for T₁, then at
//! φ = π for the T₂ that brings both branches back together.
//!
//! ```text
//! cargo run --release --example dissipative_loop
//! ```

use num_complex::Complex64;
use phasekick::branch::{self, BranchState};
use phasekick::model::ModelParams;
use phasekick::path;

fn main() -> phasekick::error::Result<()> {
    let (eta, gamma, t1) = (1.0, 1.0, 1.0);
    let p = ModelParams::new(eta, gamma, 1e-4)?;
    let t2 = path::solve_closing_time(gamma, t1)?;
    println!("T1 = {t1}, T2 = {t2:.9} (bisection {:.9})", path::closing_time_by_bisection(gamma, t1)?);

    let sched = path::two_leg_schedule(gamma, t1)?;
    let mut trace = Vec::new();
    let end = branch::propagate_observed(&BranchState::plus(Complex64::new(1.0, 0.0)), &sched, &p, |t, s| {
        trace.push((t, s.separation()));
    })?;
    for (t, sep) in trace.iter().step_by(2000) {
        println!("  t = {t:6.3}  |lambda0 - lambda1| = {sep:.6}");
    }
    println!("final separation {:.3e}", end.separation());

    println!("\n{:>5} {:>12} {:>12} {:>12} {:>12}", "alpha", "theta", "continuum", "closed form", "Gamma");
    for a in [0.0, 0.5, 1.0, 2.0] {
        let alpha = Complex64::new(a, 0.0);
        let r = branch::readout(&branch::propagate(&BranchState::plus(alpha), &sched, &p)?);
        let (tc, _) = branch::continuum_loop(alpha, &p, t1)?;
        let (tp, _) = branch::closed_form_loop(a, &p, t1)?;
        println!("{a:>5} {:>12.8} {tc:>12.8} {tp:>12.8} {:>12.8}", r.theta, r.gamma_damp);
    }
    Ok(())
}
