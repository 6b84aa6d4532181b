//! First-order convergence of the Trotter split, for the branch engine
//! (against the continuum loop phase) and for the Fock engine (against RK4).
//!
//! ```text
//! cargo run --release --example trotter_convergence
//! ```

use num_complex::Complex64;
use phasekick::branch::{self, BranchState};
use phasekick::fock::{self, DensityMatrix, Method};
use phasekick::model::ModelParams;
use phasekick::numerics::loglog_slope;
use phasekick::path;

fn main() -> phasekick::error::Result<()> {
    let (eta, gamma, t1) = (0.5, 1.0, 2.0);
    let alpha = Complex64::new(0.5, 0.0);
    let sched = path::two_leg_schedule(gamma, t1)?;
    let steps: Vec<f64> = (0..4).map(|k| 1e-3 / 2f64.powi(k)).collect();

    let reference = branch::continuum_loop(alpha, &ModelParams::new(eta, gamma, 1e-3)?, t1)?.0;
    let mut errs = Vec::new();
    for &dt in &steps {
        let p = ModelParams::new(eta, gamma, dt)?;
        let th = branch::readout(&branch::propagate(&BranchState::plus(alpha), &sched, &p)?).theta;
        errs.push((th - reference).abs());
        println!("branch dt = {dt:.3e}  |theta - theta_ref| = {:.4e}", errs.last().unwrap());
    }
    println!("branch slope {:.4}", loglog_slope(&steps, &errs));

    let rho0 = DensityMatrix::plus_coherent(alpha, 16)?;
    let exact = fock::evolve(&rho0, &sched, &ModelParams::new(eta, gamma, steps[3])?, Method::DirectRk4)?;
    let mut gaps = Vec::new();
    for &dt in &steps {
        let rho = fock::evolve(&rho0, &sched, &ModelParams::new(eta, gamma, dt)?, Method::TrotterSplit)?;
        gaps.push(rho.frobenius_distance(&exact));
        println!("fock   dt = {dt:.3e}  ||rho_split - rho_rk4|| = {:.4e}", gaps.last().unwrap());
    }
    println!("fock slope {:.4}", loglog_slope(&steps, &gaps));
    Ok(())
}
