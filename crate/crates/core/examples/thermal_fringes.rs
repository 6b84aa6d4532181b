//! Fringes of a displaced thermal state at η/γ = 0.05, γT₁ = 20: P± along
//! the displacement for a few variances, and one Gauss-Hermite point
//! checked against Monte Carlo.
//!
//! ```text
//! cargo run --release --example thermal_fringes
//! ```

use num_complex::Complex64;
use phasekick::model::ModelParams;
use phasekick::path::LoopSpec;
use phasekick::thermal::{self, AffinePhase, Quadrature, ThermalSpec};

fn main() -> phasekick::error::Result<()> {
    let gamma = 1.0;
    let p = ModelParams::new(0.05 * gamma, gamma, 1e-3)?;
    let lp = LoopSpec::DissipativeTwoLeg { t1: 20.0 / gamma };
    let model = AffinePhase::fit(&lp, &p)?;
    println!(
        "theta(alpha) = {:.6} + {:.6} Re(alpha) + {:.2e} Im(alpha), v = {:.6}",
        model.theta0,
        model.slope_re,
        model.slope_im,
        model.visibility()
    );

    let gh = Quadrature::GaussHermite { order: 64 }.rule()?;
    print!("{:>6}", "alpha0");
    for v in [1.0, 10.0, 30.0, 60.0] {
        print!("  P+(V={v:<2})");
    }
    println!();
    for a0 in (0..=60).step_by(5) {
        print!("{a0:>6}");
        for v in [1.0, 10.0, 30.0, 60.0] {
            let lam = model.lambda_with(&ThermalSpec::new(Complex64::new(a0 as f64, 0.0), v)?, &gh)?;
            print!("  {:>9.6}", thermal::thermal_readout(&lam).p_plus);
        }
        println!();
    }

    let spec = ThermalSpec::new(Complex64::new(30.0, 0.0), 20.0)?;
    let a = model.lambda_with(&spec, &gh)?;
    let b = model.lambda(&spec, Quadrature::MonteCarlo { samples: 100_000, seed: 42 })?;
    let se = b.standard_error.unwrap_or(f64::NAN);
    println!("\nLambda GH {:.8}  MC {:.8} (+/- {se:.1e})  gap {:.2} SE", a.lambda, b.lambda, (a.lambda - b.lambda).norm() / se);
    println!("closed form {:.8}", model.lambda_exact(&spec).lambda);
    Ok(())
}
