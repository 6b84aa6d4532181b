//! Branch engine against the truncated Fock master equation on a small
//! lattice, with the density-matrix health checks.
//!
//! ```text
//! cargo run --release --example fock_crosscheck
//! ```

use num_complex::Complex64;
use phasekick::branch::{self, BranchState};
use phasekick::fock::{self, DensityMatrix, Method};
use phasekick::model::ModelParams;
use phasekick::path;

fn main() -> phasekick::error::Result<()> {
    let gamma = 1.0;
    let d = 40;
    println!(
        "{:>5} {:>5} {:>5} {:>12} {:>12} {:>9} {:>9} {:>10}",
        "alpha", "eta/g", "gT1", "theta_b", "theta_f", "dTheta", "dGamma", "min_eig"
    );
    for a in [0.0, 0.5, 1.0] {
        for eta in [0.1, 0.5] {
            for gt1 in [0.5, 2.0] {
                let p = ModelParams::new(eta * gamma, gamma, 1e-3)?;
                let sched = path::two_leg_schedule(gamma, gt1 / gamma)?;
                let alpha = Complex64::new(a, 0.0);
                let b = branch::readout(&branch::propagate(&BranchState::plus(alpha), &sched, &p)?);
                let rho = fock::evolve(&DensityMatrix::plus_coherent(alpha, d)?, &sched, &p, Method::TrotterSplit)?;
                let f = fock::readout(&rho);
                println!(
                    "{a:>5} {eta:>5} {gt1:>5} {:>12.8} {:>12.8} {:>9.1e} {:>9.1e} {:>10.1e}",
                    b.theta,
                    f.theta,
                    (b.theta - f.theta).abs(),
                    (b.gamma_damp - f.gamma_damp).abs(),
                    rho.min_eigenvalue()
                );
            }
        }
    }
    Ok(())
}
