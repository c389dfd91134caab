//! Symmetric norming functions on singular-value sequences and the
//! unitarily invariant operator norms they induce.
//!
//! Every norm here is evaluated on a finite spectrum; suprema over `n`
//! run up to the spectrum length.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SingularValues};
use crate::sampling;
use crate::spectrum::SingularSpectrum;

/// Non-increasing positive weights with `π_1 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiWeights {
    weights: Vec<f64>,
}

impl PiWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        match weights.first() {
            None => {
                return Err(Error::InvalidParameter(
                    "Π weights must be non-empty".into(),
                ))
            }
            Some(&w) if w != 1.0 => {
                return Err(Error::InvalidParameter(format!(
                    "Π weights must start at 1, got {w}"
                )))
            }
            _ => {}
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidParameter(
                "Π weights must be finite and positive".into(),
            ));
        }
        if weights.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "Π weights must be non-increasing".into(),
            ));
        }
        Ok(Self { weights })
    }

    /// `π_j = j^{-α}`.
    pub fn power(alpha: f64, len: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Π power exponent must lie in (0, 1], got {alpha}"
            )));
        }
        Self::new((1..=len.max(1)).map(|j| (j as f64).powf(-alpha)).collect())
    }

    /// `π_j = 1/j`.
    pub fn harmonic(len: usize) -> Self {
        Self::power(1.0, len).expect("α = 1 is valid")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ_{j≤n} π_j / (n π_n)` at `n = len`. Bounded ratios indicate a
    /// regular sequence; the value is reported, never enforced.
    pub fn regularity_ratio(&self) -> f64 {
        let n = self.weights.len();
        let total: f64 = self.weights.iter().sum();
        total / (n as f64 * self.weights[n - 1])
    }
}

/// Where a Π-norm takes its weights from.
#[derive(Clone, Debug, PartialEq)]
pub enum PiSource {
    /// `π_j = j^{-α}`, generated to the spectrum length.
    Power(f64),
    Explicit(PiWeights),
}

impl PiSource {
    fn weights_for(&self, len: usize) -> Result<PiWeights> {
        match self {
            PiSource::Power(alpha) => PiWeights::power(*alpha, len),
            PiSource::Explicit(w) => Ok(w.clone()),
        }
    }
}

/// A symmetric norm selector.
#[derive(Clone, Debug, PartialEq)]
pub enum NormKind {
    /// `(Σ s_j^p)^{1/p}`, `p ∈ [1, ∞]`; `p = ∞` is the operator norm.
    Schatten(f64),
    /// `sup_n σ_n / Σ_{j≤n} π_j`.
    Pi(PiSource),
    /// `sup_n n^{-(1-1/p)} σ_n`, `p > 1`.
    Weak(f64),
    /// `sup_n σ_n / (1 + ln n)`.
    Dixmier,
    /// `Σ_j j^{-1/p} s_j`, `p ∈ [1, ∞)`.
    Macaev(f64),
}

impl NormKind {
    pub const OPERATOR: NormKind = NormKind::Schatten(f64::INFINITY);

    pub fn validate(&self) -> Result<()> {
        match self {
            NormKind::Schatten(p) if p.is_nan() || *p < 1.0 => Err(Error::InvalidParameter(format!(
                "Schatten exponent must satisfy p >= 1, got {p}"
            ))),
            NormKind::Weak(p) if !(*p > 1.0 && p.is_finite()) => Err(Error::InvalidParameter(format!(
                "weak-Lp exponent must satisfy 1 < p < inf, got {p} (use the dixmier norm for p = 1)"
            ))),
            NormKind::Macaev(p) if !(*p >= 1.0 && p.is_finite()) => Err(Error::InvalidParameter(
                format!("Macaev exponent must satisfy 1 <= p < inf, got {p}"),
            )),
            NormKind::Pi(PiSource::Power(alpha)) if !(*alpha > 0.0 && *alpha <= 1.0) => Err(
                Error::InvalidParameter(format!("Π power exponent must lie in (0, 1], got {alpha}")),
            ),
            _ => Ok(()),
        }
    }

    /// `φ(s)` for this kind.
    pub fn evaluate(&self, s: &SingularSpectrum) -> Result<f64> {
        self.validate()?;
        match self {
            NormKind::Schatten(p) => schatten_norm(s, *p),
            NormKind::Pi(source) => pi_norm(s, &source.weights_for(s.len())?),
            NormKind::Weak(p) => weak_norm(s, *p),
            NormKind::Dixmier => Ok(dixmier_norm(s)),
            NormKind::Macaev(p) => macaev_norm(s, *p),
        }
    }

    /// Short identifier used in file names and CSV columns.
    pub fn slug(&self) -> String {
        self.to_string().replace([':', ',', '.'], "_")
    }
}

fn fmt_exponent(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else {
        format!("{p}")
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Schatten(p) if p.is_infinite() => write!(f, "operator"),
            NormKind::Schatten(p) => write!(f, "schatten:{}", fmt_exponent(*p)),
            NormKind::Pi(PiSource::Power(alpha)) if *alpha == 1.0 => write!(f, "pi:harmonic"),
            NormKind::Pi(PiSource::Power(alpha)) => write!(f, "pi:power:{alpha}"),
            NormKind::Pi(PiSource::Explicit(w)) => {
                let list: Vec<String> = w.weights().iter().map(|x| format!("{x}")).collect();
                write!(f, "pi:{}", list.join(","))
            }
            NormKind::Weak(p) => write!(f, "weak:{p}"),
            NormKind::Dixmier => write!(f, "dixmier"),
            NormKind::Macaev(p) => write!(f, "macaev:{p}"),
        }
    }
}

fn parse_exponent(text: &str, what: &str) -> Result<f64> {
    let text = text.trim();
    if matches!(text, "inf" | "infinity" | "∞") {
        return Ok(f64::INFINITY);
    }
    text.parse::<f64>()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse {what} `{text}`")))
}

/// Parses `operator`, `schatten:<p|inf>`, `pi:harmonic`, `pi:power:<α>`,
/// `pi:<w1,w2,...>`, `weak:<p>`, `dixmier`, `macaev:<p>`. Parameters are
/// validated.
impl FromStr for NormKind {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (head, rest) = match text.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (text, None),
        };
        let missing = || Error::InvalidParameter(format!("norm kind `{head}` needs a parameter"));
        let kind = match head.to_ascii_lowercase().as_str() {
            "operator" | "op" if rest.is_none() => NormKind::OPERATOR,
            "dixmier" if rest.is_none() => NormKind::Dixmier,
            "schatten" => NormKind::Schatten(parse_exponent(
                rest.ok_or_else(missing)?,
                "Schatten exponent",
            )?),
            "weak" => NormKind::Weak(parse_exponent(rest.ok_or_else(missing)?, "weak exponent")?),
            "macaev" => NormKind::Macaev(parse_exponent(
                rest.ok_or_else(missing)?,
                "Macaev exponent",
            )?),
            "pi" => {
                let rest = rest.ok_or_else(missing)?.trim();
                if rest == "harmonic" {
                    NormKind::Pi(PiSource::Power(1.0))
                } else if let Some(alpha) = rest.strip_prefix("power:") {
                    NormKind::Pi(PiSource::Power(parse_exponent(alpha, "Π exponent")?))
                } else {
                    let weights = rest
                        .split(',')
                        .map(|w| parse_exponent(w, "Π weight"))
                        .collect::<Result<Vec<_>>>()?;
                    NormKind::Pi(PiSource::Explicit(PiWeights::new(weights)?))
                }
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown norm kind `{text}`"
                )))
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// `(Σ s_j^p)^{1/p}`; `p = ∞` gives `s_1`.
pub fn schatten_norm(s: &SingularSpectrum, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Schatten exponent must satisfy p >= 1, got {p}"
        )));
    }
    let top = s.largest();
    if p.is_infinite() || top == 0.0 {
        return Ok(top);
    }
    if p == 1.0 {
        return Ok(s.sum());
    }
    // Scale by s_1 so large exponents do not overflow.
    let acc: f64 = s.values().iter().map(|v| (v / top).powf(p)).sum();
    Ok(top * acc.powf(1.0 / p))
}

/// `sup_n (Σ_{j≤n} s_j) / (Σ_{j≤n} π_j)`.
pub fn pi_norm(s: &SingularSpectrum, pi: &PiWeights) -> Result<f64> {
    if s.len() > pi.len() {
        return Err(Error::DimensionMismatch {
            expected: pi.len(),
            found: s.len(),
        });
    }
    let mut sigma = 0.0;
    let mut weight = 0.0;
    let mut best = 0.0_f64;
    for (sj, pj) in s.values().iter().zip(pi.weights()) {
        sigma += sj;
        weight += pj;
        best = best.max(sigma / weight);
    }
    Ok(best)
}

/// `sup_n n^{-(1-1/p)} Σ_{j≤n} s_j` for `1 < p < ∞`.
pub fn weak_norm(s: &SingularSpectrum, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "weak-Lp exponent must satisfy 1 < p < inf, got {p}"
        )));
    }
    let exponent = 1.0 - 1.0 / p;
    Ok(s.partial_sums()
        .iter()
        .enumerate()
        .map(|(k, sigma)| sigma / ((k + 1) as f64).powf(exponent))
        .fold(0.0, f64::max))
}

/// `sup_n σ_n / (1 + ln n)`.
pub fn dixmier_norm(s: &SingularSpectrum) -> f64 {
    s.partial_sums()
        .iter()
        .enumerate()
        .map(|(k, sigma)| sigma / (1.0 + ((k + 1) as f64).ln()))
        .fold(0.0, f64::max)
}

/// `Σ_j j^{-1/p} s_j` for `1 ≤ p < ∞`.
pub fn macaev_norm(s: &SingularSpectrum, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Macaev exponent must satisfy 1 <= p < inf, got {p}"
        )));
    }
    Ok(s.values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * ((k + 1) as f64).powf(-1.0 / p))
        .sum())
}

/// Ky Fan `r`-norm `Σ_{j≤r} s_j`.
pub fn ky_fan_norm(s: &SingularSpectrum, r: usize) -> f64 {
    s.values().iter().take(r).sum()
}

/// `‖M‖_φ = φ(s(M))`.
pub fn operator_ideal_norm<M: SingularValues + ?Sized>(m: &M, kind: &NormKind) -> Result<f64> {
    kind.validate()?;
    kind.evaluate(&m.singular_values()?)
}

/// True iff every partial sum of `xi` is at most the matching partial sum
/// of `eta`, shorter sequences padded with zeros.
pub fn ky_fan_dominated_by(xi: &SingularSpectrum, eta: &SingularSpectrum) -> bool {
    let len = xi.len().max(eta.len());
    let mut a = 0.0;
    let mut b = 0.0;
    for j in 1..=len {
        a += xi.get(j);
        b += eta.get(j);
        if a > b {
            return false;
        }
    }
    true
}

/// The `‖·‖_{1,∞}` value next to the Π-norm with `π_j = 1/j`, and their
/// ratio. The two are equivalent norms; no constant is asserted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DixmierPiComparison {
    pub dixmier: f64,
    pub pi_harmonic: f64,
    pub ratio: f64,
}

pub fn compare_dixmier_with_harmonic_pi(s: &SingularSpectrum) -> DixmierPiComparison {
    let dixmier = dixmier_norm(s);
    let pi_harmonic = pi_norm(s, &PiWeights::harmonic(s.len())).expect("weights match length");
    let ratio = if pi_harmonic > 0.0 {
        dixmier / pi_harmonic
    } else {
        f64::NAN
    };
    DixmierPiComparison {
        dixmier,
        pi_harmonic,
        ratio,
    }
}

/// Norms of the leading principal `k×k` truncations, `k = 1..=dim`, and
/// their supremum. Informative only.
pub fn truncation_profile(m: &Matrix, kind: &NormKind) -> Result<(Vec<f64>, f64)> {
    let n = m.dim();
    let mut profile = Vec::with_capacity(n);
    for k in 1..=n {
        let mut sub = Matrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                sub[(i, j)] = m[(i, j)];
            }
        }
        profile.push(operator_ideal_norm(&sub, kind)?);
    }
    let sup = profile.iter().cloned().fold(0.0, f64::max);
    Ok((profile, sup))
}

/// Axioms checked by [`check_symmetric_norm_axioms`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Positivity,
    Homogeneity,
    Triangle,
    TwoSidedBound,
    UnitaryInvariance,
    RankOneNormalization,
    AdjointEquality,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::Positivity,
        Axiom::Homogeneity,
        Axiom::Triangle,
        Axiom::TwoSidedBound,
        Axiom::UnitaryInvariance,
        Axiom::RankOneNormalization,
        Axiom::AdjointEquality,
    ];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::Positivity => "positivity",
            Axiom::Homogeneity => "homogeneity",
            Axiom::Triangle => "triangle",
            Axiom::TwoSidedBound => "two-sided bound |AXB| <= |A| |X| |B|",
            Axiom::UnitaryInvariance => "unitary invariance",
            Axiom::RankOneNormalization => "rank-one normalization",
            Axiom::AdjointEquality => "adjoint equality",
        };
        f.write_str(name)
    }
}

/// Spectra of one seeded sample, computed once and shared by every kind.
#[derive(Clone, Debug)]
struct AxiomSample {
    x: SingularSpectrum,
    y: SingularSpectrum,
    x_plus_y: SingularSpectrum,
    alpha: Complex64,
    alpha_x: SingularSpectrum,
    a_norm: f64,
    b_norm: f64,
    axb: SingularSpectrum,
    uxv: SingularSpectrum,
    x_adjoint: SingularSpectrum,
    rank_one_alpha: f64,
    rank_one: SingularSpectrum,
}

/// A reproducible set of random matrices for the axiom suite.
#[derive(Clone, Debug)]
pub struct AxiomSamples {
    dim: usize,
    samples: Vec<AxiomSample>,
}

impl AxiomSamples {
    /// `count` samples of dimension `dim` from `seed`.
    pub fn seeded(seed: u64, count: usize, dim: usize) -> Result<Self> {
        if count == 0 || dim == 0 {
            return Err(Error::InvalidParameter(
                "axiom suite needs at least one sample".into(),
            ));
        }
        let mut rng = sampling::rng(seed);
        let mut samples = Vec::with_capacity(count);
        for _ in 0..count {
            let x = sampling::random_gaussian(&mut rng, dim);
            let y = sampling::random_gaussian(&mut rng, dim);
            let a = sampling::random_gaussian(&mut rng, dim);
            let b = sampling::random_gaussian(&mut rng, dim);
            let u = sampling::random_unitary(&mut rng, dim);
            let v = sampling::random_unitary(&mut rng, dim);
            let alpha = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let rank_one_alpha = rng.random_range(-5.0..5.0);
            let e = sampling::random_unit_vector(&mut rng, dim);
            let projector = sampling::rank_one_projector(&e);
            samples.push(AxiomSample {
                x: x.singular_values()?,
                y: y.singular_values()?,
                x_plus_y: (&x + &y).singular_values()?,
                alpha,
                alpha_x: x.scale(alpha).singular_values()?,
                a_norm: a.singular_values()?.largest(),
                b_norm: b.singular_values()?.largest(),
                axb: (&(&a * &x) * &b).singular_values()?,
                uxv: (&(&u * &x) * &v).singular_values()?,
                x_adjoint: x.adjoint().singular_values()?,
                rank_one_alpha,
                rank_one: projector.scale_real(rank_one_alpha).singular_values()?,
            });
        }
        Ok(Self { dim, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[derive(Clone, Debug)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub checked: usize,
    pub failures: usize,
    /// Largest relative violation seen (negative when every check had slack).
    pub worst_relative: f64,
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub kind: NormKind,
    pub tolerance: f64,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.failures == 0)
    }

    pub fn outcome(&self, axiom: Axiom) -> &AxiomOutcome {
        self.outcomes
            .iter()
            .find(|o| o.axiom == axiom)
            .expect("every axiom is reported")
    }
}

struct Tally {
    outcome: AxiomOutcome,
    tol: f64,
}

impl Tally {
    fn new(axiom: Axiom, tol: f64) -> Self {
        Self {
            outcome: AxiomOutcome {
                axiom,
                checked: 0,
                failures: 0,
                worst_relative: f64::NEG_INFINITY,
            },
            tol,
        }
    }

    fn record(&mut self, relative_violation: f64) {
        self.outcome.checked += 1;
        self.outcome.worst_relative = self.outcome.worst_relative.max(relative_violation);
        if relative_violation.is_nan() || relative_violation > self.tol {
            self.outcome.failures += 1;
        }
    }

    /// `lhs ≤ rhs` up to relative tolerance.
    fn at_most(&mut self, lhs: f64, rhs: f64) {
        self.record((lhs - rhs) / rhs.abs().max(f64::MIN_POSITIVE));
    }

    fn equal(&mut self, lhs: f64, rhs: f64) {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        self.record((lhs - rhs).abs() / scale);
    }
}

/// Checks the symmetric-norm axioms for `kind` on every sample. Failures
/// are counted in the report, never raised.
pub fn check_symmetric_norm_axioms(
    kind: &NormKind,
    samples: &AxiomSamples,
    tolerance: f64,
) -> Result<AxiomReport> {
    kind.validate()?;
    let phi = |s: &SingularSpectrum| kind.evaluate(s);
    let mut positivity = Tally::new(Axiom::Positivity, tolerance);
    let mut homogeneity = Tally::new(Axiom::Homogeneity, tolerance);
    let mut triangle = Tally::new(Axiom::Triangle, tolerance);
    let mut two_sided = Tally::new(Axiom::TwoSidedBound, tolerance);
    let mut unitary = Tally::new(Axiom::UnitaryInvariance, tolerance);
    let mut rank_one = Tally::new(Axiom::RankOneNormalization, tolerance);
    let mut adjoint = Tally::new(Axiom::AdjointEquality, tolerance);

    let zero = SingularSpectrum::new(vec![0.0; samples.dim])?;
    positivity.record(if phi(&zero)? == 0.0 {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    });

    for s in &samples.samples {
        let nx = phi(&s.x)?;
        positivity.record(if nx > 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
        homogeneity.equal(phi(&s.alpha_x)?, s.alpha.norm() * nx);
        triangle.at_most(phi(&s.x_plus_y)?, nx + phi(&s.y)?);
        two_sided.at_most(phi(&s.axb)?, s.a_norm * nx * s.b_norm);
        unitary.equal(phi(&s.uxv)?, nx);
        rank_one.equal(phi(&s.rank_one)?, s.rank_one_alpha.abs());
        adjoint.equal(phi(&s.x_adjoint)?, nx);
    }

    Ok(AxiomReport {
        kind: kind.clone(),
        tolerance,
        outcomes: [
            positivity,
            homogeneity,
            triangle,
            two_sided,
            unitary,
            rank_one,
            adjoint,
        ]
        .into_iter()
        .map(|t| t.outcome)
        .collect(),
    })
}
