//! Amplitude damping of an off-diagonal coherent dyad |λ1⟩⟨λ2|: closed
//! form against the master equation at η = 0.
//!
//! ```text
//! cargo run --release --example dyadic_damping
//! ```

use num_complex::Complex64;
use phasekick::fock::{self, Method};

fn main() -> phasekick::error::Result<()> {
    let (gamma, t, d) = (1.0, 0.5, 40);
    let pts = [-1.0, 0.0, 1.0];
    for &x in &pts {
        for &y in &pts {
            let l1 = Complex64::new(x, 0.5 * y);
            let l2 = Complex64::new(-0.5 * y, x);
            let exact = fock::dissipative_dyadic(l1, l2, gamma, t, d)?;
            let rk4 = fock::evolve_dyad(l1, l2, gamma, t, d, 1e-3, Method::DirectRk4)?;
            let split = fock::evolve_dyad(l1, l2, gamma, t, d, 1e-3, Method::TrotterSplit)?;
            println!(
                "l1 = {l1:<10} l2 = {l2:<10} |exact - rk4| = {:.2e}  |exact - split| = {:.2e}  trace = {:.6}",
                (&exact - rk4).norm(),
                (&exact - split).norm(),
                exact.trace()
            );
        }
    }
    Ok(())
}
