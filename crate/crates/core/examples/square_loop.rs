//! Undamped square loop: the qubit picks up twice the enclosed area,
//! whatever the initial coherent amplitude.
//!
//! ```text
//! cargo run --release --example square_loop
//! ```

use num_complex::Complex64;
use phasekick::branch::{self, BranchState};
use phasekick::fock::{self, DensityMatrix, Method};
use phasekick::model::ModelParams;
use phasekick::path;

fn main() -> phasekick::error::Result<()> {
    let eta = 1.0;
    let p = ModelParams::new(eta, 0.0, 1e-3)?;

    println!("{:>6} {:>10} {:>14} {:>14}", "T", "area", "theta_branch", "theta_fock");
    for t in [0.25, 0.5, 1.0] {
        let sched = path::square_schedule(t)?;
        let area = path::enclosed_area(&sched, eta)?;
        let alpha = Complex64::new(0.5, 0.0);
        let b = branch::readout(&branch::propagate(&BranchState::plus(alpha), &sched, &p)?);
        let rho = fock::evolve(&DensityMatrix::plus_coherent(alpha, 40)?, &sched, &p, Method::TrotterSplit)?;
        let f = fock::readout(&rho);
        println!("{t:>6} {area:>10.6} {:>14.10} {:>14.10}", b.theta, f.theta);
    }

    // same loop, very different starting states
    let sched = path::square_schedule(0.5)?;
    for alpha in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(2.0, 3.0)] {
        let r = branch::readout(&branch::propagate(&BranchState::plus(alpha), &sched, &p)?);
        println!("alpha = {alpha:<8} theta = {:.12}  P+ = {:.6}", r.theta, r.p_plus);
    }
    Ok(())
}
