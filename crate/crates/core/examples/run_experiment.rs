//! Drive an experiment through the library instead of the binary and
//! print its CSV to stdout.
//!
//! ```text
//! cargo run --release --example run_experiment -- variance-sweep V_max=10 quadrature_order=32
//! ```

use std::io::stdout;

use phasekick::experiment::{self, Experiment, ExperimentConfig, Format};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "validate".to_string());
    let overrides: Vec<String> = args.collect();
    let result = name
        .parse::<Experiment>()
        .and_then(|e| ExperimentConfig::load(e, None, &overrides))
        .and_then(|cfg| experiment::run(&cfg))
        .and_then(|report| {
            report.write(Format::Csv, stdout().lock())?;
            Ok(report.failure)
        });
    match result {
        Ok(None) => {}
        Ok(Some(f)) => {
            eprintln!("{f}");
            std::process::exit(3);
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
