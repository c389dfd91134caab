use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use trotter_dixmier::dixmier::{
    estimate_dixmier_trace, make_model_spectrum, ModelSpectrum, DEFAULT_SLOPE_TOL,
    DEFAULT_WINDOW_FRACTION,
};
use trotter_dixmier::harness::{self, ExitStatus, ExperimentConfig};
use trotter_dixmier::kato::{builtin, validate_kato, KatoGrid};
use trotter_dixmier::linalg::SingularValues;
use trotter_dixmier::norms::NormKind;
use trotter_dixmier::Error;

#[derive(Parser)]
#[command(
    version,
    about = "Operator-ideal norms, Dixmier traces and Trotter-Kato error rates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ModelArg {
    Harmonic,
    LogSemigroup,
    TraceClass,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a norm of the matrix stored in a text file.
    Norms {
        matrix: PathBuf,
        /// e.g. `operator`, `schatten:1`, `dixmier`, `weak:2`, `pi:harmonic`.
        #[arg(long)]
        kind: String,
    },
    /// Estimate the Dixmier trace of a model spectrum.
    Trace {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        /// Prefactor of the harmonic model.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Exponent of the log-semigroup model.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Ratio of the trace-class model.
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = DEFAULT_WINDOW_FRACTION)]
        window: f64,
        #[arg(long, default_value_t = DEFAULT_SLOPE_TOL)]
        tol: f64,
    },
    /// Check the Kato-function conditions for a built-in function.
    ValidateKato {
        #[arg(long)]
        function: String,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
    },
    /// Run a product-formula experiment described by a TOML file.
    Trotter {
        #[arg(long, required_unless_present = "print_default")]
        config: Option<PathBuf>,
        /// Print the default configuration and exit.
        #[arg(long)]
        print_default: bool,
    },
    /// Run the built-in property suite.
    Selftest,
}

fn print_check(check: &harness::Check) {
    let mark = if check.passed { "PASS" } else { "FAIL" };
    if check.detail.is_empty() {
        println!("{mark} {}", check.name);
    } else {
        println!("{mark} {}: {}", check.name, check.detail);
    }
}

fn code(status: ExitStatus) -> ExitCode {
    ExitCode::from(status.code() as u8)
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    code(match err {
        Error::Config(_) | Error::InvalidParameter(_) | Error::Parse { .. } | Error::Io(_) => {
            ExitStatus::ConfigError
        }
        _ => ExitStatus::AcceptanceFailure,
    })
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Norms { matrix, kind } => {
            let kind: NormKind = kind.parse()?;
            kind.validate()?;
            let m = harness::parse_matrix(&std::fs::read_to_string(matrix)?)?;
            println!("{}", kind.evaluate(&m.singular_values()?)?);
        }
        Command::Trace {
            model,
            n,
            c,
            t,
            r,
            window,
            tol,
        } => {
            let model = match model {
                ModelArg::Harmonic => ModelSpectrum::Harmonic { c },
                ModelArg::LogSemigroup => ModelSpectrum::LogSemigroup { t },
                ModelArg::TraceClass => ModelSpectrum::TraceClass { r },
            };
            let est = estimate_dixmier_trace(&make_model_spectrum(model, n)?, window, tol)?;
            println!("value = {:.16e}", est.value);
            println!("window = {}..={}", est.window.0, est.window.1);
            println!("slope = {:.16e}", est.slope);
            println!("converged = {}", est.converged);
            println!("window_min = {:.16e}", est.window_min);
            println!("window_max = {:.16e}", est.window_max);
        }
        Command::ValidateKato { function, a, beta } => {
            let h = builtin(&function, a)?;
            let report = validate_kato(&h, &KatoGrid::default(), beta)?;
            println!("{report}");
            if !report.passed() {
                return Ok(code(ExitStatus::AcceptanceFailure));
            }
        }
        Command::Trotter {
            config,
            print_default,
        } => {
            if print_default {
                print!("{}", ExperimentConfig::default().to_toml_string()?);
                return Ok(ExitCode::SUCCESS);
            }
            let config = ExperimentConfig::load(&config.expect("clap enforces --config"))?;
            let result = harness::run_experiment(&config);
            let status = harness::exit_status(&result);
            match result {
                Ok(outcome) => {
                    for check in &outcome.summary.checks {
                        print_check(check);
                    }
                    for path in &outcome.written {
                        println!("wrote {}", path.display());
                    }
                }
                Err(e) => eprintln!("error: {e}"),
            }
            return Ok(code(status));
        }
        Command::Selftest => {
            let checks = harness::run_selftest();
            for check in &checks {
                print_check(check);
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(code(ExitStatus::AcceptanceFailure));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run(cli.command).unwrap_or_else(fail)
}
