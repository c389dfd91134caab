//! Trotter–Kato product approximants of `e^{-tC}`, `C = A + B`, their
//! errors in operator and ideal norms, power-law rate fits and the
//! lifting and trace-rate bound checks.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dixmier::{self, DEFAULT_SLOPE_TOL, DEFAULT_WINDOW_FRACTION};
use crate::error::{Error, Result};
use crate::kato::KatoFunction;
use crate::linalg::{EigenSystem, Hermitian, Matrix, SingularValues};
use crate::norms::{dixmier_norm, NormKind};

/// Errors below this are treated as exact zeros and left out of fits.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// `[f(tA/n) g(tB/n)]^n`
    #[serde(rename = "FG")]
    Fg,
    /// `[g(tB/n) f(tA/n)]^n`
    #[serde(rename = "GF")]
    Gf,
    /// `F(t/n)^n`, `F(t) = g(tB/2) f(tA) g(tB/2)`
    #[serde(rename = "F_sym")]
    FSym,
    /// `T(t/n)^n`, `T(t) = f(tA/2) g(tB) f(tA/2)`
    #[serde(rename = "T_sym")]
    TSym,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Fg, Scheme::Gf, Scheme::FSym, Scheme::TSym];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Fg => "FG",
            Scheme::Gf => "GF",
            Scheme::FSym => "F_sym",
            Scheme::TSym => "T_sym",
        }
    }

    /// Symmetrised schemes produce Hermitian approximants.
    pub fn is_symmetric(&self) -> bool {
        matches!(self, Scheme::FSym | Scheme::TSym)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|s| s.as_str().eq_ignore_ascii_case(text.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme `{text}`")))
    }
}

/// A positive pair `A`, `B` with Kato functions `f`, `g`, decomposed once.
#[derive(Clone, Debug)]
pub struct SplittingProblem {
    a: EigenSystem,
    b: EigenSystem,
    c: EigenSystem,
    f: KatoFunction,
    g: KatoFunction,
}

impl SplittingProblem {
    pub fn new(a: &Hermitian, b: &Hermitian, f: KatoFunction, g: KatoFunction) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        let a_eig = a.eig()?;
        let b_eig = b.eig()?;
        a_eig.clamped_nonnegative()?;
        b_eig.clamped_nonnegative()?;
        let c_eig = a.add(b).eig()?;
        Ok(Self {
            a: a_eig,
            b: b_eig,
            c: c_eig,
            f,
            g,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn f(&self) -> &KatoFunction {
        &self.f
    }

    pub fn g(&self) -> &KatoFunction {
        &self.g
    }

    fn check_time(t: f64) -> Result<()> {
        if t >= 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "time must be finite and non-negative, got {t}"
            )))
        }
    }

    /// `e^{-tC}`.
    pub fn exact(&self, t: f64) -> Result<Hermitian> {
        Self::check_time(t)?;
        self.c.apply(|s| (-s).exp(), t)
    }

    fn f_of_a(&self, scale: f64) -> Result<Hermitian> {
        self.a.apply(self.f.as_fn(), scale)
    }

    fn g_of_b(&self, scale: f64) -> Result<Hermitian> {
        self.b.apply(self.g.as_fn(), scale)
    }

    /// `F(τ) = g(τB/2) f(τA) g(τB/2)`.
    pub fn f_family(&self, tau: f64) -> Result<Matrix> {
        Self::check_time(tau)?;
        let half = self.g_of_b(tau / 2.0)?;
        let mid = self.f_of_a(tau)?;
        Ok(&(half.as_matrix() * mid.as_matrix()) * half.as_matrix())
    }

    /// `T(τ) = f(τA/2) g(τB) f(τA/2)`.
    pub fn t_family(&self, tau: f64) -> Result<Matrix> {
        Self::check_time(tau)?;
        let half = self.f_of_a(tau / 2.0)?;
        let mid = self.g_of_b(tau)?;
        Ok(&(half.as_matrix() * mid.as_matrix()) * half.as_matrix())
    }

    /// One factor of the product formula for step `τ = t/n`.
    pub fn step(&self, scheme: Scheme, tau: f64) -> Result<Matrix> {
        Self::check_time(tau)?;
        Ok(match scheme {
            Scheme::Fg => self.f_of_a(tau)?.as_matrix() * self.g_of_b(tau)?.as_matrix(),
            Scheme::Gf => self.g_of_b(tau)?.as_matrix() * self.f_of_a(tau)?.as_matrix(),
            Scheme::FSym => self.f_family(tau)?,
            Scheme::TSym => self.t_family(tau)?,
        })
    }

    /// The `n`-fold product for `scheme` at time `t`.
    pub fn approximant(&self, scheme: Scheme, t: f64, n: u64) -> Result<Matrix> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "number of steps must be at least 1".into(),
            ));
        }
        Ok(self.step(scheme, t / n as f64)?.pow(n))
    }

    /// `approximant − e^{-tC}`.
    pub fn difference(&self, scheme: Scheme, t: f64, n: u64) -> Result<Matrix> {
        Ok(&self.approximant(scheme, t, n)? - self.exact(t)?.as_matrix())
    }
}

/// `e^{-t(A+B)}` for positive `A`, `B`.
pub fn exact_semigroup(a: &Hermitian, b: &Hermitian, t: f64) -> Result<Hermitian> {
    for m in [a, b] {
        m.eig()?.clamped_nonnegative()?;
    }
    SplittingProblem::check_time(t)?;
    a.add(b).eig()?.apply(|s| (-s).exp(), t)
}

pub fn approximant(
    scheme: Scheme,
    f: &KatoFunction,
    g: &KatoFunction,
    a: &Hermitian,
    b: &Hermitian,
    t: f64,
    n: u64,
) -> Result<Matrix> {
    SplittingProblem::new(a, b, f.clone(), g.clone())?.approximant(scheme, t, n)
}

/// `(n, error)` samples for one scheme and norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub scheme: Scheme,
    pub norm: String,
    pub t: f64,
    pub samples: Vec<(u64, f64)>,
}

impl ErrorCurve {
    pub fn grid(&self) -> Vec<u64> {
        self.samples.iter().map(|&(n, _)| n).collect()
    }

    pub fn error_at(&self, n: u64) -> Option<f64> {
        self.samples.iter().find(|&&(m, _)| m == n).map(|&(_, e)| e)
    }

    pub fn max_error(&self) -> f64 {
        self.samples.iter().map(|&(_, e)| e).fold(0.0, f64::max)
    }
}

fn check_grid(n_grid: &[u64]) -> Result<()> {
    if n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "n-grid must be non-empty, positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn floor_roundoff(e: f64) -> f64 {
    if e < ROUNDOFF_FLOOR {
        0.0
    } else {
        e
    }
}

/// Error curves for several norms at once; each `n` costs one product and
/// one singular-value decomposition. Grid points are evaluated in
/// parallel and returned in ascending order.
pub fn error_curves(
    problem: &SplittingProblem,
    scheme: Scheme,
    t: f64,
    n_grid: &[u64],
    kinds: &[NormKind],
) -> Result<Vec<ErrorCurve>> {
    check_grid(n_grid)?;
    for kind in kinds {
        kind.validate()?;
    }
    let exact = problem.exact(t)?;
    let rows: Vec<Vec<f64>> = n_grid
        .par_iter()
        .map(|&n| -> Result<Vec<f64>> {
            let diff = &problem.approximant(scheme, t, n)? - exact.as_matrix();
            let s = diff.singular_values()?;
            kinds
                .iter()
                .map(|k| k.evaluate(&s).map(floor_roundoff))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(kinds
        .iter()
        .enumerate()
        .map(|(k, kind)| ErrorCurve {
            scheme,
            norm: kind.to_string(),
            t,
            samples: n_grid
                .iter()
                .zip(&rows)
                .map(|(&n, row)| (n, row[k]))
                .collect(),
        })
        .collect())
}

pub fn error_curve(
    problem: &SplittingProblem,
    scheme: Scheme,
    t: f64,
    n_grid: &[u64],
    kind: &NormKind,
) -> Result<ErrorCurve> {
    Ok(
        error_curves(problem, scheme, t, n_grid, std::slice::from_ref(kind))?
            .pop()
            .expect("one curve per kind"),
    )
}

/// Leading grid points excluded from a rate fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub skip_smallest: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self { skip_smallest: 2 }
    }
}

/// `error ≈ Γ n^{-γ}` by least squares on `ln error` vs `ln n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub gamma: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub window: (u64, u64),
    pub points: usize,
    pub excluded_zero: usize,
}

pub fn fit_rate(curve: &ErrorCurve, window: FitWindow) -> Result<RateFit> {
    let candidates = curve.samples.iter().skip(window.skip_smallest);
    let excluded_zero = candidates.clone().filter(|&&(_, e)| e <= 0.0).count();
    let usable: Vec<(u64, f64)> = candidates.filter(|&&(_, e)| e > 0.0).copied().collect();
    if usable.len() < 4 {
        return Err(Error::TooFewSamples {
            usable: usable.len(),
            excluded: excluded_zero,
        });
    }
    let xs: Vec<f64> = usable.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|&(_, e)| e.ln()).collect();
    let count = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / count;
    let y_mean = ys.iter().sum::<f64>() / count;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - x_mean) * (y - y_mean);
        sxx += (x - x_mean) * (x - x_mean);
        syy += (y - y_mean) * (y - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residual: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - residual / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(RateFit {
        gamma: -slope,
        prefactor: intercept.exp(),
        r_squared,
        window: (usable[0].0, usable[usable.len() - 1].0),
        points: usable.len(),
        excluded_zero,
    })
}

/// `max_n n · op_error(n)`: the smallest `Γ` with `op_error(n) ≤ Γ/n` on
/// the grid.
pub fn calibrate_prefactor(op_curve: &ErrorCurve) -> f64 {
    op_curve
        .samples
        .iter()
        .map(|&(n, e)| n as f64 * e)
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftingEntry {
    pub n: u64,
    pub ideal_error: f64,
    pub bound: f64,
    /// `bound − ideal_error`; negative on a violation.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftingReport {
    pub gamma_t0: f64,
    pub f_t0_norm: f64,
    pub entries: Vec<LiftingEntry>,
    /// Smallest grid `n ≥ 3` from which every entry holds.
    pub n0: Option<u64>,
    pub violations_from_n0: usize,
}

impl LiftingReport {
    pub fn holds_from(&self, max_n0: u64) -> bool {
        matches!(self.n0, Some(n0) if n0 <= max_n0) && self.violations_from_n0 == 0
    }
}

/// Checks `ideal_error(n) ≤ Γ_{t0} ‖F(t0)‖_φ (ε(⌊n/2⌋) + ε(⌊(n+1)/2⌋))`
/// with `ε(k) = 1/k` for every grid `n ≥ 3`.
///
/// `Γ_{t0} ε(·)` is the operator-norm error bound; [`calibrate_prefactor`]
/// gives the empirical `Γ_{t0}` from the operator-norm curve.
pub fn lifting_bound_check(
    op_curve: &ErrorCurve,
    ideal_curve: &ErrorCurve,
    f_t0_norm: f64,
    gamma_t0: f64,
) -> Result<LiftingReport> {
    if op_curve.grid() != ideal_curve.grid() || op_curve.t != ideal_curve.t {
        return Err(Error::GridMismatch);
    }
    let unit_rate = |k: u64| 1.0 / k as f64;
    let entries: Vec<LiftingEntry> = ideal_curve
        .samples
        .iter()
        .filter(|&&(n, _)| n >= 3)
        .map(|&(n, ideal_error)| {
            let bound = gamma_t0 * f_t0_norm * (unit_rate(n / 2) + unit_rate(n.div_ceil(2)));
            LiftingEntry {
                n,
                ideal_error,
                bound,
                margin: bound - ideal_error,
            }
        })
        .collect();
    let first_good_tail = entries
        .iter()
        .rposition(|e| e.margin < 0.0)
        .map_or(0, |k| k + 1);
    let n0 = entries.get(first_good_tail).map(|e| e.n);
    let violations_from_n0 = entries[first_good_tail..]
        .iter()
        .filter(|e| e.margin < 0.0)
        .count();
    Ok(LiftingReport {
        gamma_t0,
        f_t0_norm,
        entries,
        n0,
        violations_from_n0,
    })
}

/// Comparison of trace surrogates of the approximant and the exact flow
/// against the `‖·‖_{1,∞}` norm of their difference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceErrorReport {
    pub scheme: Scheme,
    pub n: u64,
    /// `|T_N(approximant) − T_N(exact)|`, `N = dim`.
    pub delta_tn: f64,
    /// Difference of trailing-window estimates, when the dimension allows one.
    pub delta_estimate: Option<f64>,
    pub difference_norm: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn trace_error_check(
    problem: &SplittingProblem,
    scheme: Scheme,
    t: f64,
    n: u64,
) -> Result<TraceErrorReport> {
    let approx = problem.approximant(scheme, t, n)?;
    let exact = problem.exact(t)?;
    let diff = &approx - exact.as_matrix();
    let seq_approx = dixmier::trace_sequence(&approx.singular_values()?);
    let seq_exact = dixmier::trace_sequence(&exact.singular_values()?);
    let dim = problem.dim();
    let delta_tn = (seq_approx.t(dim) - seq_exact.t(dim)).abs();
    let delta_estimate = if dim >= dixmier::MIN_ESTIMATE_LEN {
        let a = dixmier::estimate_from_sequence(
            &seq_approx,
            DEFAULT_WINDOW_FRACTION,
            DEFAULT_SLOPE_TOL,
        )?;
        let e = dixmier::estimate_from_sequence(
            &seq_exact,
            DEFAULT_WINDOW_FRACTION,
            DEFAULT_SLOPE_TOL,
        )?;
        Some((a.value - e.value).abs())
    } else {
        None
    };
    let difference_norm = dixmier_norm(&diff.singular_values()?);
    let worst = delta_tn.max(delta_estimate.unwrap_or(0.0));
    // Singular values carry ~1e-15 relative error per entry.
    let tolerance = 1e-12 * (1.0 + dixmier_norm(&exact.singular_values()?));
    Ok(TraceErrorReport {
        scheme,
        n,
        delta_tn,
        delta_estimate,
        difference_norm,
        slack: difference_norm - worst,
        holds: worst <= difference_norm + tolerance,
    })
}

/// `(s, ‖e^{-sC}‖_{1,∞}, ‖F(t0)‖_{1,∞})` for every `s ≥ t0` in `times`.
pub fn semigroup_ideal_bound(
    problem: &SplittingProblem,
    t0: f64,
    times: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    let reference = dixmier_norm(&problem.f_family(t0)?.singular_values()?);
    times
        .iter()
        .filter(|&&s| s >= t0)
        .map(|&s| {
            Ok((
                s,
                dixmier_norm(&problem.exact(s)?.singular_values()?),
                reference,
            ))
        })
        .collect()
}
