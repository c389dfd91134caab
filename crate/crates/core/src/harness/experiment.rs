use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{AcceptanceThresholds, ExperimentConfig};
use crate::error::{Error, Result};
use crate::linalg::SingularValues;
use crate::norms::{dixmier_norm, NormKind};
use crate::trotter::{
    calibrate_prefactor, error_curves, fit_rate, lifting_bound_check, trace_error_check,
    ErrorCurve, FitWindow, LiftingReport, RateFit, Scheme, SplittingProblem, TraceErrorReport,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Worker-thread count for grid evaluation; unset means rayon's default.
pub const THREADS_ENV: &str = "TROTTER_DIXMIER_THREADS";
pub const ROUNDOFF_REASON: &str = "roundoff floor";
pub const CSV_HEADER: &str = "scheme,norm,t,n,error";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    AcceptanceFailure,
    ConfigError,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::AcceptanceFailure => 1,
            ExitStatus::ConfigError => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FitOutcome {
    Fitted(RateFit),
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub norm: String,
    pub csv: String,
    pub max_error: f64,
    pub fit: FitOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub t0: f64,
    /// `‖F(t0)‖_{1,∞}`, or `‖T(t0)‖_{1,∞}` for `T_sym`.
    pub family_norm_t0: f64,
    pub norms: Vec<NormResult>,
    pub lifting: LiftingReport,
    pub trace: Vec<TraceErrorReport>,
    #[serde(skip)]
    pub curves: Vec<ErrorCurve>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub dim: usize,
    pub config: ExperimentConfig,
    pub schemes: Vec<SchemeResult>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub summary: Summary,
    pub written: Vec<PathBuf>,
}

impl ExperimentOutcome {
    pub fn status(&self) -> ExitStatus {
        if self.summary.passed {
            ExitStatus::Success
        } else {
            ExitStatus::AcceptanceFailure
        }
    }
}

/// Maps a run result to its exit status; configuration errors give 2.
pub fn exit_status(result: &Result<ExperimentOutcome>) -> ExitStatus {
    match result {
        Ok(outcome) => outcome.status(),
        Err(Error::Config(_) | Error::InvalidParameter(_) | Error::Parse { .. }) => {
            ExitStatus::ConfigError
        }
        Err(_) => ExitStatus::AcceptanceFailure,
    }
}

/// Runs `job` on a pool sized by [`THREADS_ENV`] when it is set.
pub fn with_configured_threads<T: Send>(job: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(job()),
        Ok(text) => {
            let threads: usize = text.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                Error::Config(format!(
                    "{THREADS_ENV} must be a positive integer, got `{text}`"
                ))
            })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

pub fn csv_file_name(scheme: Scheme, kind: &NormKind) -> String {
    format!("errors_{}_{}.csv", scheme.as_str(), kind.slug())
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

pub fn curve_to_csv(curve: &ErrorCurve) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let norm = csv_field(&curve.norm);
    for &(n, e) in &curve.samples {
        out.push_str(&format!(
            "{},{norm},{:.16e},{n},{:.16e}\n",
            curve.scheme, curve.t, e
        ));
    }
    out
}

fn check_rate(scheme: Scheme, norm: &NormResult, thresholds: &AcceptanceThresholds) -> Check {
    let name = format!("rate {scheme} {}", norm.norm);
    match &norm.fit {
        FitOutcome::Skipped { reason } => Check {
            name,
            passed: true,
            detail: format!("fit skipped: {reason}"),
        },
        FitOutcome::Fitted(fit) => {
            let (passed, want) = if scheme.is_symmetric() {
                (
                    fit.gamma >= thresholds.symmetric_gamma_min,
                    format!("gamma >= {}", thresholds.symmetric_gamma_min),
                )
            } else {
                (
                    fit.gamma >= thresholds.gamma_min
                        && fit.gamma <= thresholds.gamma_max
                        && fit.r_squared >= thresholds.r_squared_min,
                    format!(
                        "gamma in [{}, {}], r^2 >= {}",
                        thresholds.gamma_min, thresholds.gamma_max, thresholds.r_squared_min
                    ),
                )
            };
            Check {
                name,
                passed,
                detail: format!(
                    "gamma = {:.4}, r^2 = {:.5}; want {want}",
                    fit.gamma, fit.r_squared
                ),
            }
        }
    }
}

fn run_scheme(
    problem: &SplittingProblem,
    scheme: Scheme,
    config: &ExperimentConfig,
    norms: &[NormKind],
) -> Result<SchemeResult> {
    let t = config.t;
    let t0 = t / 4.0;
    let mut kinds = norms.to_vec();
    for extra in [NormKind::OPERATOR, NormKind::Dixmier] {
        if !kinds.iter().any(|k| k.slug() == extra.slug()) {
            kinds.push(extra);
        }
    }
    let curves = error_curves(problem, scheme, t, &config.n_grid, &kinds)?;
    let find = |kind: &NormKind| {
        let k = kinds
            .iter()
            .position(|k| k.slug() == kind.slug())
            .expect("kind present");
        &curves[k]
    };
    let norm_results = norms
        .iter()
        .map(|kind| {
            let curve = find(kind);
            let fit = match fit_rate(curve, FitWindow::default()) {
                Ok(fit) => FitOutcome::Fitted(fit),
                Err(Error::TooFewSamples { .. }) => FitOutcome::Skipped {
                    reason: ROUNDOFF_REASON.into(),
                },
                Err(e) => return Err(e),
            };
            Ok(NormResult {
                norm: kind.to_string(),
                csv: csv_file_name(scheme, kind),
                max_error: curve.max_error(),
                fit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let family = match scheme {
        Scheme::TSym => problem.t_family(t0)?,
        _ => problem.f_family(t0)?,
    };
    let family_norm_t0 = dixmier_norm(&family.singular_values()?);
    let op_curve = find(&NormKind::OPERATOR);
    let lifting = lifting_bound_check(
        op_curve,
        find(&NormKind::Dixmier),
        family_norm_t0,
        calibrate_prefactor(op_curve),
    )?;
    let trace = config
        .n_grid
        .par_iter()
        .map(|&n| trace_error_check(problem, scheme, t, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(SchemeResult {
        scheme,
        t0,
        family_norm_t0,
        norms: norm_results,
        lifting,
        trace,
        curves: norms.iter().map(|k| find(k).clone()).collect(),
    })
}

fn acceptance_checks(results: &[SchemeResult], thresholds: &AcceptanceThresholds) -> Vec<Check> {
    let mut checks = Vec::new();
    for r in results {
        for norm in &r.norms {
            checks.push(check_rate(r.scheme, norm, thresholds));
        }
        let lifting = &r.lifting;
        let passed = lifting.entries.is_empty() || lifting.holds_from(thresholds.max_n0);
        checks.push(Check {
            name: format!("lifting {}", r.scheme),
            passed,
            detail: format!(
                "n0 = {}, violations from n0 = {}; want n0 <= {}",
                lifting.n0.map_or_else(|| "none".into(), |n| n.to_string()),
                lifting.violations_from_n0,
                thresholds.max_n0
            ),
        });
        let failures = r.trace.iter().filter(|t| !t.holds).count();
        let min_slack = r
            .trace
            .iter()
            .map(|t| t.slack)
            .fold(f64::INFINITY, f64::min);
        checks.push(Check {
            name: format!("trace {}", r.scheme),
            passed: failures == 0,
            detail: format!("{failures} violations, smallest slack {min_slack:.3e}"),
        });
    }
    checks
}

/// Computes every curve, fit and check without touching the filesystem.
pub fn execute(config: &ExperimentConfig) -> Result<Summary> {
    let resolved = config.resolve()?;
    let problem = SplittingProblem::new(
        &resolved.a,
        &resolved.b,
        resolved.f.clone(),
        resolved.g.clone(),
    )
    .map_err(|e| Error::Config(e.to_string()))?;
    let schemes = with_configured_threads(|| {
        config
            .schemes
            .iter()
            .map(|&scheme| run_scheme(&problem, scheme, config, &resolved.norms))
            .collect::<Result<Vec<_>>>()
    })??;
    let checks = if config.acceptance.enabled {
        acceptance_checks(&schemes, &config.acceptance)
    } else {
        Vec::new()
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(Summary {
        schema_version: SCHEMA_VERSION,
        dim: problem.dim(),
        config: config.clone(),
        schemes,
        checks,
        passed,
    })
}

/// Writes one CSV per (scheme, norm) and `summary.json` into `dir`.
pub fn write_results(summary: &Summary, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for r in &summary.schemes {
        for (norm, curve) in r.norms.iter().zip(&r.curves) {
            let path = dir.join(&norm.csv);
            fs::write(&path, curve_to_csv(curve))?;
            written.push(path);
        }
    }
    let path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(summary).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(&path, json + "\n")?;
    written.push(path);
    Ok(written)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let summary = execute(config)?;
    let written = write_results(&summary, &config.output_dir)?;
    Ok(ExperimentOutcome { summary, written })
}
