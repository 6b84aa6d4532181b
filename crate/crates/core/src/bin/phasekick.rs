use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use phasekick::error::Error;
use phasekick::experiment::{self, Experiment, ExperimentConfig, Format};

/// Run a phasekick experiment and write its records.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// unitary-loop, dissipative-loop, thermal-sweep, variance-sweep, convergence or validate
    experiment: String,
    /// key = value file; keys not given keep their defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key; may be repeated, applied after the file
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: String,
}

fn execute(cli: &Cli) -> Result<Option<String>, Error> {
    let exp: Experiment = cli.experiment.parse()?;
    let format: Format = cli.format.parse()?;
    let cfg = ExperimentConfig::load(exp, cli.config.as_deref(), &cli.set)?;
    let report = experiment::run(&cfg)?;
    let file = File::create(&cli.out)?;
    report.write(format, BufWriter::new(file))?;
    Ok(report.failure)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("phasekick: {failure}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("phasekick: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
