//! `irs-harq`: batch evaluation of outage probability for HARQ chase
//! combining over an IRS-assisted link.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 validation failure,
//! 3 numeric/convergence error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use irs_harq_cli::{
    gain_csv, run_gain, run_sweep, run_validation, sweep_csv, validation_csv, CliError, SweepSpec,
};

const EXIT_OK: u8 = 0;
const EXIT_CONFIG: u8 = 1;
const EXIT_VALIDATION_FAILED: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "irs-harq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Sweep configuration document (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; overrides `sweep.output`; stdout when neither is
    /// given.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the Monte Carlo seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the Monte Carlo trial count from the configuration.
    #[arg(long)]
    trials: Option<u64>,
    /// Suppress warnings and progress notes on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured engines over the axis grid and emit CSV.
    Sweep(CommonOpts),
    /// Compare MC engines against the closed form at a 3σ-per-row policy.
    Validate(CommonOpts),
    /// Required transmit SNR (dB) to reach a target outage, per axis value.
    Gain {
        #[command(flatten)]
        common: CommonOpts,
        /// Outage probability target for the SNR inversion.
        #[arg(long, default_value_t = 1e-3)]
        target_pout: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let code = match cli.command {
        Command::Sweep(opts) => cmd_sweep(&opts),
        Command::Validate(opts) => cmd_validate(&opts),
        Command::Gain { common, target_pout } => cmd_gain(&common, target_pout),
    };
    ExitCode::from(code)
}

fn load_spec(opts: &CommonOpts) -> Result<SweepSpec, u8> {
    let text = match std::fs::read_to_string(&opts.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", opts.config.display());
            return Err(EXIT_CONFIG);
        }
    };
    let mut spec = match SweepSpec::parse(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Err(EXIT_CONFIG);
        }
    };
    if let Some(seed) = opts.seed {
        spec.mc.seed = seed;
    }
    if let Some(trials) = opts.trials {
        spec.mc.trials = trials;
    }
    if let Err(e) = spec.validate() {
        eprintln!("error: {e}");
        return Err(EXIT_CONFIG);
    }
    Ok(spec)
}

/// CSV goes to --out, else to the config's `sweep.output`, else stdout.
fn emit(opts: &CommonOpts, spec: &SweepSpec, csv: &str) -> u8 {
    let target = opts
        .out
        .clone()
        .or_else(|| spec.sweep.output.as_ref().map(PathBuf::from));
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
            EXIT_OK
        }
        None => {
            print!("{csv}");
            EXIT_OK
        }
    }
}

fn cmd_sweep(opts: &CommonOpts) -> u8 {
    let spec = match load_spec(opts) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match run_sweep(&spec) {
        Ok(report) => {
            if !opts.quiet {
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
            }
            emit(opts, &spec, &sweep_csv(&report.rows))
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("error: {e}");
            EXIT_NUMERIC
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn cmd_validate(opts: &CommonOpts) -> u8 {
    let spec = match load_spec(opts) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match run_validation(&spec) {
        Ok(report) => {
            let csv = validation_csv(&report);
            let code = emit(opts, &spec, &csv);
            if code != EXIT_OK {
                return code;
            }
            if !opts.quiet {
                let failed = report.rows.iter().filter(|r| !r.pass).count();
                eprintln!(
                    "validation: {}/{} rows within 3σ{}",
                    report.rows.len() - failed,
                    report.rows.len(),
                    if report.all_pass { "" } else { " — FAIL" },
                );
            }
            if report.all_pass {
                EXIT_OK
            } else {
                EXIT_VALIDATION_FAILED
            }
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("error: {e}");
            EXIT_NUMERIC
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn cmd_gain(opts: &CommonOpts, target_pout: f64) -> u8 {
    let spec = match load_spec(opts) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match run_gain(&spec, target_pout) {
        Ok(rows) => {
            let every_row_failed = rows.iter().all(|r| r.error.is_some());
            let code = emit(opts, &spec, &gain_csv(&rows));
            if code != EXIT_OK {
                return code;
            }
            if every_row_failed {
                eprintln!("error: SNR inversion failed for every axis value");
                EXIT_NUMERIC
            } else {
                EXIT_OK
            }
        }
        Err(CliError::Numeric(e)) => {
            eprintln!("error: {e}");
            EXIT_NUMERIC
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
