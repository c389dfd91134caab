//! Partial-sum sequences `σ_n`, `T_n = σ_n / (1 + ln n)`, the dilation
//! map, Horn–Ky Fan checks and a Dixmier-trace estimator for spectra
//! whose `T_n` converges.
//!
//! No invariant mean is constructed. The estimator averages `T_n` over a
//! trailing window and flags convergence by the slope of `T_n` against
//! `ln n`; on convergent sequences every dilation-invariant mean agrees
//! with that limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Hermitian, SingularValues};
use crate::spectrum::SingularSpectrum;

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;
pub const DEFAULT_SLOPE_TOL: f64 = 0.02;
pub const MIN_WINDOW_POINTS: usize = 8;
pub const MIN_ESTIMATE_LEN: usize = 16;

/// `σ_n` and `T_n` for `n = 1..=N` (stored 0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSequence {
    pub sigma: Vec<f64>,
    pub tee: Vec<f64>,
}

impl TraceSequence {
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// `T_n` with 1-based `n`.
    pub fn t(&self, n: usize) -> f64 {
        self.tee[n - 1]
    }

    /// `ξ_{2n} − ξ_{2n−1}` for `ξ = T`, `n = 1..=N/2`.
    pub fn telescoping_differences(&self) -> Vec<f64> {
        (1..=self.len() / 2)
            .map(|n| self.t(2 * n) - self.t(2 * n - 1))
            .collect()
    }
}

fn log_weight(n: usize) -> f64 {
    1.0 + (n as f64).ln()
}

/// Exact running sums, accumulated strictly left to right.
pub fn trace_sequence(s: &SingularSpectrum) -> TraceSequence {
    let sigma = s.partial_sums();
    let tee = sigma
        .iter()
        .enumerate()
        .map(|(k, v)| v / log_weight(k + 1))
        .collect();
    TraceSequence { sigma, tee }
}

/// Trailing-window summary of a bounded sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowStats {
    /// 1-based inclusive bounds.
    pub n_lo: usize,
    pub n_hi: usize,
    pub mean: f64,
    /// Least-squares slope against `ln n`.
    pub slope: f64,
    pub min: f64,
    pub max: f64,
}

/// Statistics of `seq` over `[⌈(1 − fraction)·N⌉, N]`.
pub fn trailing_window(seq: &[f64], fraction: f64) -> Result<WindowStats> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "window fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let len = seq.len();
    let n_lo = (((1.0 - fraction) * len as f64).ceil() as usize).max(1);
    let n_hi = len;
    let points = (n_hi + 1).saturating_sub(n_lo);
    if points < MIN_WINDOW_POINTS {
        return Err(Error::WindowTooSmall {
            points,
            required: MIN_WINDOW_POINTS,
        });
    }
    let window = &seq[n_lo - 1..n_hi];
    let count = window.len() as f64;
    let mean = window.iter().sum::<f64>() / count;
    let xs: Vec<f64> = (n_lo..=n_hi).map(|n| (n as f64).ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(window) {
        sxy += (x - x_mean) * (y - mean);
        sxx += (x - x_mean) * (x - x_mean);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let min = window.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(WindowStats {
        n_lo,
        n_hi,
        mean,
        slope,
        min,
        max,
    })
}

/// Surrogate for `Tr_ω` on a spectrum.
///
/// `value` is the trailing-window mean of `T_n`; it is a trace claim only
/// when `converged` is set. Otherwise `window_min`/`window_max` bracket
/// the oscillation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEstimate {
    pub value: f64,
    pub window: (usize, usize),
    pub slope: f64,
    pub converged: bool,
    pub window_min: f64,
    pub window_max: f64,
}

pub fn estimate_dixmier_trace(
    s: &SingularSpectrum,
    window_fraction: f64,
    slope_tol: f64,
) -> Result<TraceEstimate> {
    if s.len() < MIN_ESTIMATE_LEN {
        return Err(Error::WindowTooSmall {
            points: s.len(),
            required: MIN_ESTIMATE_LEN,
        });
    }
    estimate_from_sequence(&trace_sequence(s), window_fraction, slope_tol)
}

pub fn estimate_from_sequence(
    seq: &TraceSequence,
    window_fraction: f64,
    slope_tol: f64,
) -> Result<TraceEstimate> {
    if slope_tol.is_nan() || slope_tol < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "slope tolerance must be non-negative, got {slope_tol}"
        )));
    }
    let stats = trailing_window(&seq.tee, window_fraction)?;
    Ok(TraceEstimate {
        value: stats.mean,
        window: (stats.n_lo, stats.n_hi),
        slope: stats.slope,
        converged: stats.slope.abs() <= slope_tol,
        window_min: stats.min,
        window_max: stats.max,
    })
}

/// Estimator applied to the singular values of a matrix. A finite matrix
/// is trace class, so its `T_n` only reflects the leading block of a model.
pub fn estimate_dixmier_trace_of<M: SingularValues + ?Sized>(
    m: &M,
    window_fraction: f64,
    slope_tol: f64,
) -> Result<TraceEstimate> {
    estimate_dixmier_trace(&m.singular_values()?, window_fraction, slope_tol)
}

/// `D_k(η) = (η_1, …, η_1, η_2, …)`, each entry repeated `k` times.
pub fn dilation(seq: &[f64], k: usize) -> Vec<f64> {
    seq.iter()
        .flat_map(|&x| std::iter::repeat_n(x, k))
        .collect()
}

/// `D_2(η) = (η_1, η_1, η_2, η_2, …)`.
pub fn dilation_d2(seq: &[f64]) -> Vec<f64> {
    dilation(seq, 2)
}

/// Desk-scale model spectra.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpectrum {
    /// `s_j = c / j`.
    Harmonic { c: f64 },
    /// `s_j = j^{-t}`, the spectrum of `e^{-tC}` for `C = diag(ln j)`.
    LogSemigroup { t: f64 },
    /// `s_j = r^j`, `0 < r < 1`.
    TraceClass { r: f64 },
}

impl ModelSpectrum {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            ModelSpectrum::Harmonic { c } if !(c > 0.0 && c.is_finite()) => {
                bad(format!("harmonic model needs c > 0, got {c}"))
            }
            ModelSpectrum::LogSemigroup { t } if !(t > 0.0 && t.is_finite()) => {
                bad(format!("log-semigroup model needs t > 0, got {t}"))
            }
            ModelSpectrum::TraceClass { r } if !(r > 0.0 && r < 1.0) => {
                bad(format!("trace-class model needs 0 < r < 1, got {r}"))
            }
            _ => Ok(()),
        }
    }
}

pub fn make_model_spectrum(kind: ModelSpectrum, len: usize) -> Result<SingularSpectrum> {
    kind.validate()?;
    if len == 0 {
        return Err(Error::InvalidParameter(
            "model spectrum length must be at least 1".into(),
        ));
    }
    let values: Vec<f64> = (1..=len)
        .map(|j| {
            let j = j as f64;
            match kind {
                ModelSpectrum::Harmonic { c } => c / j,
                ModelSpectrum::LogSemigroup { t } => j.powf(-t),
                ModelSpectrum::TraceClass { r } => r.powf(j),
            }
        })
        .collect();
    SingularSpectrum::new(values)
}

/// `σ_n(X)` for `X ⪰ 0` as the largest value of `tr(XP)` over rank-`n`
/// projections, which is the sum of the `n` largest eigenvalues.
pub fn variational_sigma(x: &Hermitian, n: usize) -> Result<f64> {
    if n == 0 || n > x.dim() {
        return Err(Error::OutOfRange {
            index: n,
            len: x.dim(),
        });
    }
    let eig = x.eig()?;
    let values = eig.clamped_nonnegative()?;
    Ok(values.iter().rev().take(n).sum())
}

fn psd_sigma(x: &Hermitian) -> Result<Vec<f64>> {
    let mut values = x.eig()?.clamped_nonnegative()?;
    values.reverse();
    Ok(SingularSpectrum::from_unsorted(&values).partial_sums())
}

/// Horn–Ky Fan sub/super-additivity of `σ_n` and the induced chain for
/// `T_n`, on a positive pair.
#[derive(Clone, Debug, PartialEq)]
pub struct HornKyFanReport {
    pub dim: usize,
    /// `max_n σ_n(X+Y) − σ_n(X) − σ_n(Y)`; non-positive when the upper bound holds.
    pub upper_violation: f64,
    /// `max_{2n≤dim} σ_n(X) + σ_n(Y) − σ_{2n}(X+Y)`.
    pub lower_violation: f64,
    /// `max_n T_n(X+Y) − T_n(X) − T_n(Y)`.
    pub tee_upper_violation: f64,
    /// `max_{2n≤dim} T_n(X) + T_n(Y) − (1+ln 2n)/(1+ln n) · T_{2n}(X+Y)`.
    pub tee_lower_violation: f64,
}

impl HornKyFanReport {
    pub fn max_violation(&self) -> f64 {
        self.upper_violation
            .max(self.lower_violation)
            .max(self.tee_upper_violation)
            .max(self.tee_lower_violation)
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.max_violation() <= slack
    }
}

pub fn horn_ky_fan_check(x: &Hermitian, y: &Hermitian) -> Result<HornKyFanReport> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let dim = x.dim();
    let sx = psd_sigma(x)?;
    let sy = psd_sigma(y)?;
    let sxy = psd_sigma(&x.add(y))?;
    let mut report = HornKyFanReport {
        dim,
        upper_violation: f64::NEG_INFINITY,
        lower_violation: f64::NEG_INFINITY,
        tee_upper_violation: f64::NEG_INFINITY,
        tee_lower_violation: f64::NEG_INFINITY,
    };
    for n in 1..=dim {
        let w = log_weight(n);
        let sum = sx[n - 1] + sy[n - 1];
        report.upper_violation = report.upper_violation.max(sxy[n - 1] - sum);
        report.tee_upper_violation = report.tee_upper_violation.max(sxy[n - 1] / w - sum / w);
        if 2 * n <= dim {
            report.lower_violation = report.lower_violation.max(sum - sxy[2 * n - 1]);
            let t2n = sxy[2 * n - 1] / log_weight(2 * n);
            report.tee_lower_violation = report
                .tee_lower_violation
                .max(sum / w - log_weight(2 * n) / w * t2n);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::dixmier_norm;
    use crate::sampling;

    fn harmonic_number(n: usize) -> f64 {
        (1..=n).map(|j| 1.0 / j as f64).sum()
    }

    #[test]
    fn harmonic_trace_sequence() {
        let s = make_model_spectrum(ModelSpectrum::Harmonic { c: 1.0 }, 10_000).unwrap();
        let seq = trace_sequence(&s);
        let oracle = harmonic_number(10_000) / (1.0 + 10_000f64.ln());
        assert!((seq.t(10_000) - oracle).abs() < 1e-12);
        assert!((seq.t(10_000) - 0.95860).abs() < 1e-5);
        assert_eq!(seq.t(1), 1.0);
        assert!(seq.sigma.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn point_mass_trace_sequence_decays() {
        let s = SingularSpectrum::new(vec![2.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let seq = trace_sequence(&s);
        for n in 1..=5 {
            assert_eq!(seq.t(n), 2.0 / (1.0 + (n as f64).ln()));
        }
        assert!(seq.tee.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn geometric_partial_sums_stay_below_one() {
        let s = make_model_spectrum(ModelSpectrum::TraceClass { r: 0.5 }, 200).unwrap();
        let seq = trace_sequence(&s);
        assert!(seq.sigma.iter().all(|&v| v < 1.0 + 1e-15));
        assert!(seq.t(200) < seq.t(20));
    }

    #[test]
    fn harmonic_estimate_converges_near_one() {
        let s = make_model_spectrum(ModelSpectrum::Harmonic { c: 1.0 }, 100_000).unwrap();
        let est = estimate_dixmier_trace(&s, 0.5, 0.01).unwrap();
        assert!((est.value - 1.0).abs() <= 0.05, "{est:?}");
        assert!(est.converged);
        assert_eq!(est.window, (50_000, 100_000));
        assert!(est.window_min <= est.value && est.value <= est.window_max);
    }

    #[test]
    fn scaled_harmonic_estimate() {
        let s = make_model_spectrum(ModelSpectrum::Harmonic { c: 2.5 }, 100_000).unwrap();
        let est = estimate_dixmier_trace(&s, DEFAULT_WINDOW_FRACTION, DEFAULT_SLOPE_TOL).unwrap();
        assert!((est.value - 2.5).abs() <= 0.05 * 2.5, "{est:?}");
    }

    #[test]
    fn trace_class_estimate_decreases() {
        let s = make_model_spectrum(ModelSpectrum::TraceClass { r: 0.5 }, 1_000).unwrap();
        let est = estimate_dixmier_trace(&s, DEFAULT_WINDOW_FRACTION, DEFAULT_SLOPE_TOL).unwrap();
        assert!(est.slope < 0.0);
        // σ_n ≈ 1 on the window, so the mean of T_n sits between the
        // endpoint values 1/(1 + ln n).
        assert!(est.value >= 1.0 / (1.0 + 1000f64.ln()));
        assert!(est.value <= 1.0 / (1.0 + 500f64.ln()));
    }

    #[test]
    fn growing_sequence_is_not_converged() {
        let s = SingularSpectrum::new(vec![1.0; 400]).unwrap();
        let est = estimate_dixmier_trace(&s, 0.5, DEFAULT_SLOPE_TOL).unwrap();
        assert!(!est.converged);
        assert!(est.window_max > est.window_min);
    }

    #[test]
    fn estimator_errors() {
        let short = make_model_spectrum(ModelSpectrum::Harmonic { c: 1.0 }, 10).unwrap();
        assert!(matches!(
            estimate_dixmier_trace(&short, 0.5, 0.02),
            Err(Error::WindowTooSmall { .. })
        ));
        let s = make_model_spectrum(ModelSpectrum::Harmonic { c: 1.0 }, 20).unwrap();
        assert!(matches!(
            estimate_dixmier_trace(&s, 0.2, 0.02),
            Err(Error::WindowTooSmall { points: 5, .. })
        ));
        assert!(estimate_dixmier_trace(&s, 1.0, 0.02).is_err());
        assert!(estimate_dixmier_trace(&s, 0.5, -1.0).is_err());
    }

    #[test]
    fn estimate_bounded_by_dixmier_norm() {
        for kind in [
            ModelSpectrum::Harmonic { c: 1.0 },
            ModelSpectrum::Harmonic { c: 3.0 },
            ModelSpectrum::LogSemigroup { t: 0.8 },
            ModelSpectrum::TraceClass { r: 0.9 },
        ] {
            let s = make_model_spectrum(kind, 5_000).unwrap();
            let est = estimate_dixmier_trace(&s, 0.5, 0.02).unwrap();
            assert!(est.value <= dixmier_norm(&s), "{kind:?}");
        }
    }

    #[test]
    fn dilation_examples() {
        assert_eq!(
            dilation_d2(&[1.0, 2.0, 3.0]),
            vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]
        );
        assert_eq!(dilation_d2(&[0.7; 3]), vec![0.7; 6]);
        assert_eq!(dilation(&[1.0, 2.0], 3), vec![1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn dilation_preserves_limit_of_convergent_sequence() {
        // η_n = 1 + 1/n converges to 1.
        let seq: Vec<f64> = (1..=10_000).map(|n| 1.0 + 1.0 / n as f64).collect();
        let a = trailing_window(&seq, 0.5).unwrap().mean;
        let b = trailing_window(&dilation_d2(&seq), 0.5).unwrap().mean;
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn model_spectra() {
        let h = make_model_spectrum(ModelSpectrum::Harmonic { c: 1.0 }, 3).unwrap();
        assert_eq!(h.values(), &[1.0, 0.5, 1.0 / 3.0]);
        let l = make_model_spectrum(ModelSpectrum::LogSemigroup { t: 1.0 }, 50).unwrap();
        let h50 = make_model_spectrum(ModelSpectrum::Harmonic { c: 1.0 }, 50).unwrap();
        for (a, b) in l.values().iter().zip(h50.values()) {
            assert!((a - b).abs() < 1e-16);
        }
        let g = make_model_spectrum(ModelSpectrum::TraceClass { r: 0.5 }, 4).unwrap();
        assert_eq!(g.values(), &[0.5, 0.25, 0.125, 0.0625]);
        assert!(make_model_spectrum(ModelSpectrum::Harmonic { c: 0.0 }, 3).is_err());
        assert!(make_model_spectrum(ModelSpectrum::LogSemigroup { t: -1.0 }, 3).is_err());
        assert!(make_model_spectrum(ModelSpectrum::TraceClass { r: 1.0 }, 3).is_err());
        assert!(make_model_spectrum(ModelSpectrum::Harmonic { c: 1.0 }, 0).is_err());
    }

    #[test]
    fn variational_sigma_examples() {
        let d = Hermitian::from_real_diag(&[3.0, 2.0, 1.0]).unwrap();
        assert!((variational_sigma(&d, 2).unwrap() - 5.0).abs() < 1e-14);
        assert!((variational_sigma(&d, 3).unwrap() - 6.0).abs() < 1e-14);
        assert!(variational_sigma(&d, 0).is_err());
        assert!(variational_sigma(&d, 4).is_err());

        let x = sampling::random_psd(&mut sampling::rng(12), 6);
        let sigma = x.singular_values().unwrap().partial_sums();
        for n in 1..=6 {
            assert!((variational_sigma(&x, n).unwrap() - sigma[n - 1]).abs() < 1e-10 * sigma[5]);
        }
    }

    #[test]
    fn horn_ky_fan_identity_pair_is_tight() {
        let i = Hermitian::identity(4);
        let r = horn_ky_fan_check(&i, &i).unwrap();
        assert!(r.upper_violation.abs() < 1e-14);
        assert!(r.lower_violation <= 1e-14);
        assert!(r.holds(1e-12));
    }

    #[test]
    fn horn_ky_fan_complementary_projectors() {
        let x = Hermitian::from_real_diag(&[1.0, 0.0]).unwrap();
        let y = Hermitian::from_real_diag(&[0.0, 1.0]).unwrap();
        let r = horn_ky_fan_check(&x, &y).unwrap();
        // σ_1(X+Y) = 1 ≤ 2, σ_2(X+Y) = 2 ≥ σ_1(X) + σ_1(Y) = 2; the upper
        // bound is slack at n = 1 and tight at n = 2.
        assert!(r.upper_violation.abs() < 1e-14);
        assert!(r.lower_violation.abs() < 1e-14);
    }

    #[test]
    fn horn_ky_fan_rejects_indefinite() {
        let x = Hermitian::from_real_diag(&[1.0, -1.0]).unwrap();
        assert!(matches!(
            horn_ky_fan_check(&x, &x),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn telescoping_differences_vanish_for_harmonic() {
        let s = make_model_spectrum(ModelSpectrum::Harmonic { c: 1.0 }, 100_000).unwrap();
        let diffs = trace_sequence(&s).telescoping_differences();
        let tail = diffs[diffs.len() - 100..]
            .iter()
            .fold(0.0_f64, |m, d| m.max(d.abs()));
        assert!(tail < 1e-3);
        assert!(diffs[10].abs() > tail);
    }
}
