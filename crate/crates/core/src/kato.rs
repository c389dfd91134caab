//! Kato functions: Borel maps `h: [0, ∞) → [0, 1]` with `h(0) = 1` and
//! `h'(+0) = -1`, plus grid-based evidence for the class `K_β`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Richardson base step for the one-sided derivative at zero.
pub const DERIVATIVE_STEP: f64 = 1e-3;
pub const DERIVATIVE_TOL: f64 = 1e-6;
pub const VALUE_AT_ZERO_TOL: f64 = 1e-12;
pub const MIN_GRID_POINTS: usize = 200;

/// Ratio noise allowed when the seminorm falls back to evaluating
/// `h(s) - 1 + s` directly.
const REMAINDER_NOISE: f64 = 1e-6;

/// `ε` values at which `δ(ε) = 1 − sup_{s ≥ ε} h(s)` is tabulated.
pub const DELTA_EPSILONS: [f64; 7] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0];

#[derive(Clone)]
pub struct KatoFunction {
    name: String,
    params: Vec<(String, f64)>,
    declared_beta: f64,
    eval: ScalarFn,
    /// `h(s) − 1 + s` evaluated without cancellation, when known.
    remainder: Option<ScalarFn>,
}

impl fmt::Debug for KatoFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KatoFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("declared_beta", &self.declared_beta)
            .finish()
    }
}

impl KatoFunction {
    /// A user-supplied function. `declared_beta` must lie in `(1, 2]`.
    pub fn custom(
        name: impl Into<String>,
        declared_beta: f64,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_beta(declared_beta)?;
        Ok(Self {
            name: name.into(),
            params: Vec::new(),
            declared_beta,
            eval: Arc::new(h),
            remainder: None,
        })
    }

    /// `h(s) = e^{-s}`.
    pub fn exp() -> Self {
        Self {
            name: "exp".into(),
            params: Vec::new(),
            declared_beta: 2.0,
            eval: Arc::new(|s: f64| (-s).exp()),
            remainder: Some(Arc::new(|s: f64| (-s).exp_m1() + s)),
        }
    }

    /// `h(s) = (1 + s/a)^{-a}`, `a > 0`.
    pub fn resolvent_power(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "resolvent power needs a > 0, got {a}"
            )));
        }
        Ok(Self {
            name: "resolvent_power".into(),
            params: vec![("a".into(), a)],
            declared_beta: 2.0,
            eval: Arc::new(move |s: f64| (-a * (s / a).ln_1p()).exp()),
            remainder: Some(Arc::new(move |s: f64| (-a * (s / a).ln_1p()).exp_m1() + s)),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn declared_beta(&self) -> f64 {
        self.declared_beta
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }

    /// Scalar closure, for spectral calculus.
    pub fn as_fn(&self) -> impl Fn(f64) -> f64 + '_ {
        move |s| (self.eval)(s)
    }

    fn remainder(&self, s: f64) -> (f64, bool) {
        match &self.remainder {
            Some(r) => (r(s), true),
            None => (self.eval(s) - 1.0 + s, false),
        }
    }

    /// Canonical identifier, e.g. `exp` or `resolvent_power:2`.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            let params: Vec<String> = self.params.iter().map(|(_, v)| format!("{v}")).collect();
            format!("{}:{}", self.name, params.join(","))
        }
    }
}

impl fmt::Display for KatoFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses a built-in name: `exp`, `resolvent_power:<a>` (also
/// `resolvent:<a>`).
impl FromStr for KatoFunction {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (head, param) = match text.split_once(':') {
            Some((h, p)) => (h, Some(p)),
            None => (text, None),
        };
        match (head, param) {
            ("exp", None) => Ok(Self::exp()),
            ("resolvent_power" | "resolvent", Some(a)) => {
                let a = a.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidParameter(format!("cannot parse resolvent parameter `{a}`"))
                })?;
                Self::resolvent_power(a)
            }
            _ => Err(Error::InvalidParameter(format!(
                "unknown Kato function `{text}`"
            ))),
        }
    }
}

/// Built-in by name; `a` is required for `resolvent_power`.
pub fn builtin(name: &str, a: Option<f64>) -> Result<KatoFunction> {
    match (name, a) {
        ("exp", _) => Ok(KatoFunction::exp()),
        ("resolvent_power" | "resolvent", Some(a)) => KatoFunction::resolvent_power(a),
        ("resolvent_power" | "resolvent", None) => Err(Error::InvalidParameter(
            "resolvent_power needs a parameter a > 0".into(),
        )),
        _ => Err(Error::InvalidParameter(format!(
            "unknown Kato function `{name}`"
        ))),
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 1.0 && beta <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "β must lie in (1, 2], got {beta}"
        )))
    }
}

/// Sorted positive sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct KatoGrid {
    points: Vec<f64>,
}

impl KatoGrid {
    /// `count` log-spaced points on `[lo, hi]`, endpoints included.
    pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) || count < 2 {
            return Err(Error::InvalidParameter(format!(
                "log grid needs 0 < lo < hi and at least 2 points, got [{lo}, {hi}] x {count}"
            )));
        }
        let ratio = hi / lo;
        let last = (count - 1) as f64;
        let points = (0..count)
            .map(|k| lo * ratio.powf(k as f64 / last))
            .collect();
        Ok(Self { points })
    }

    pub fn from_points(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidParameter(
                "grid points must be positive and finite".into(),
            ));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for KatoGrid {
    /// 2001 log-spaced points on `[1e-8, 1e3]`.
    fn default() -> Self {
        Self::log_spaced(1e-8, 1e3, 2001).expect("static grid is valid")
    }
}

/// `[h]_β = sup_{s>0} |h(s) − 1 + s| / s^β` over the grid; a lower bound
/// for the true supremum.
///
/// Without a cancellation-free remainder, grid points where rounding in
/// `h(s) − 1 + s` could move the ratio by more than `1e-6` are skipped.
pub fn beta_seminorm(h: &KatoFunction, beta: f64, grid: &KatoGrid) -> Result<f64> {
    check_beta(beta)?;
    let mut best = 0.0_f64;
    for &s in grid.points() {
        let (r, stable) = h.remainder(s);
        let denom = s.powf(beta);
        if !stable && 4.0 * f64::EPSILON * (1.0 + s) / denom > REMAINDER_NOISE {
            continue;
        }
        let ratio = r.abs() / denom;
        if ratio.is_nan() {
            return Ok(f64::NAN);
        }
        best = best.max(ratio);
    }
    Ok(best)
}

/// Richardson-extrapolated `h'(+0)` from difference quotients at `step`,
/// `step/2`, `step/4`.
pub fn right_derivative_at_zero(h: &KatoFunction, step: f64) -> f64 {
    let h0 = h.eval(0.0);
    let quotient = |s: f64| (h.eval(s) - h0) / s;
    let d0 = quotient(step);
    let d1 = quotient(step / 2.0);
    let d2 = quotient(step / 4.0);
    let r0 = 2.0 * d1 - d0;
    let r1 = 2.0 * d2 - d1;
    (4.0 * r1 - r0) / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KatoVerdict {
    pub value_at_zero: bool,
    pub derivative: bool,
    pub range: bool,
    pub delta_positive: bool,
    pub seminorm_finite: bool,
    pub grid_dense: bool,
}

impl KatoVerdict {
    pub fn passed(&self) -> bool {
        self.value_at_zero
            && self.derivative
            && self.range
            && self.delta_positive
            && self.seminorm_finite
            && self.grid_dense
    }

    fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.value_at_zero {
            out.push("h(0) != 1");
        }
        if !self.derivative {
            out.push("h'(+0) != -1");
        }
        if !self.range {
            out.push("h leaves [0, 1]");
        }
        if !self.delta_positive {
            out.push("delta(eps) not positive");
        }
        if !self.seminorm_finite {
            out.push("[h]_beta not finite");
        }
        if !self.grid_dense {
            out.push("grid has fewer than 200 points");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KatoValidationReport {
    pub function: String,
    pub beta: f64,
    pub value_at_zero: f64,
    pub right_derivative: f64,
    pub range_ok: bool,
    /// `(ε, δ(ε))` pairs.
    pub delta_of_eps: Vec<(f64, f64)>,
    pub beta_seminorm: f64,
    pub verdict: KatoVerdict,
}

impl KatoValidationReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn failure_summary(&self) -> String {
        self.verdict.failures().join("; ")
    }
}

impl fmt::Display for KatoValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "function: {}", self.function)?;
        writeln!(f, "beta: {:e}", self.beta)?;
        writeln!(f, "value_at_zero: {:.16e}", self.value_at_zero)?;
        writeln!(f, "right_derivative: {:.16e}", self.right_derivative)?;
        writeln!(f, "range_ok: {}", self.range_ok)?;
        writeln!(f, "beta_seminorm: {:.16e}", self.beta_seminorm)?;
        writeln!(f, "delta_of_eps:")?;
        for (eps, delta) in &self.delta_of_eps {
            writeln!(f, "  {eps:e}: {delta:.16e}")?;
        }
        writeln!(f, "verdict:")?;
        writeln!(
            f,
            "  value_at_zero: {}",
            pass_fail(self.verdict.value_at_zero)
        )?;
        writeln!(
            f,
            "  right_derivative: {}",
            pass_fail(self.verdict.derivative)
        )?;
        writeln!(f, "  range: {}", pass_fail(self.verdict.range))?;
        writeln!(
            f,
            "  delta_positive: {}",
            pass_fail(self.verdict.delta_positive)
        )?;
        writeln!(
            f,
            "  seminorm_finite: {}",
            pass_fail(self.verdict.seminorm_finite)
        )?;
        writeln!(f, "  grid_dense: {}", pass_fail(self.verdict.grid_dense))?;
        write!(f, "overall: {}", pass_fail(self.passed()))
    }
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Grid evidence for `h ∈ K_β`. Never errors on a failing function; the
/// verdict records which condition broke.
pub fn validate_kato(h: &KatoFunction, grid: &KatoGrid, beta: f64) -> Result<KatoValidationReport> {
    let value_at_zero = h.eval(0.0);
    let right_derivative = right_derivative_at_zero(h, DERIVATIVE_STEP);
    let in_range = |v: f64| (0.0..=1.0).contains(&v);
    let range_ok = in_range(value_at_zero) && grid.points().iter().all(|&s| in_range(h.eval(s)));

    let delta_of_eps: Vec<(f64, f64)> = DELTA_EPSILONS
        .iter()
        .map(|&eps| {
            let sup = grid
                .points()
                .iter()
                .filter(|&&s| s >= eps)
                .map(|&s| h.eval(s))
                .fold(h.eval(eps), f64::max);
            (eps, 1.0 - sup)
        })
        .collect();

    let beta_seminorm = beta_seminorm(h, beta, grid)?;
    let verdict = KatoVerdict {
        value_at_zero: (value_at_zero - 1.0).abs() <= VALUE_AT_ZERO_TOL,
        derivative: (right_derivative + 1.0).abs() <= DERIVATIVE_TOL,
        range: range_ok,
        delta_positive: delta_of_eps.iter().all(|&(_, d)| d > 0.0),
        seminorm_finite: beta_seminorm.is_finite(),
        grid_dense: grid.len() >= MIN_GRID_POINTS,
    };
    Ok(KatoValidationReport {
        function: h.label(),
        beta,
        value_at_zero,
        right_derivative,
        range_ok,
        delta_of_eps,
        beta_seminorm,
        verdict,
    })
}

/// `s ↦ Π_k h_k(w_k s)`, unvalidated.
pub fn product(factors: &[(KatoFunction, f64)]) -> KatoFunction {
    let parts: Vec<(ScalarFn, f64)> = factors.iter().map(|(h, w)| (h.eval.clone(), *w)).collect();
    let name = factors
        .iter()
        .map(|(h, w)| format!("{}({}s)", h.label(), w))
        .collect::<Vec<_>>()
        .join("*");
    let declared_beta = factors
        .iter()
        .map(|(h, _)| h.declared_beta)
        .fold(2.0, f64::min);
    KatoFunction {
        name,
        params: Vec::new(),
        declared_beta,
        eval: Arc::new(move |s| parts.iter().map(|(h, w)| h(w * s)).product()),
        remainder: None,
    }
}

/// `g(s/2) f(s) g(s/2)`, the scalar profile of `F(t)` on commuting data.
pub fn symmetric_product(f: &KatoFunction, g: &KatoFunction) -> KatoFunction {
    product(&[(g.clone(), 0.5), (f.clone(), 1.0), (g.clone(), 0.5)])
}

/// `h(s) = f(α s) · g(γ s)` after checking both factors, then revalidated
/// on the default grid. A product whose derivative at zero is not `-1`
/// (for example `e^{-s} · e^{-s}`) is rejected with the failing checks.
pub fn product_closure(
    f: &KatoFunction,
    g: &KatoFunction,
    weights: (f64, f64),
) -> Result<KatoFunction> {
    let grid = KatoGrid::default();
    for h in [f, g] {
        let report = validate_kato(h, &grid, h.declared_beta)?;
        if !report.passed() {
            return Err(Error::KatoValidation {
                name: h.label(),
                reason: report.failure_summary(),
            });
        }
    }
    let h = product(&[(f.clone(), weights.0), (g.clone(), weights.1)]);
    let report = validate_kato(&h, &grid, h.declared_beta)?;
    if report.passed() {
        Ok(h)
    } else {
        Err(Error::KatoValidation {
            name: h.label(),
            reason: format!(
                "{} (h'(+0) = {:.6})",
                report.failure_summary(),
                report.right_derivative
            ),
        })
    }
}
