use serde::{Deserialize, Serialize};

use crate::dixmier::{make_model_spectrum, ModelSpectrum};
use crate::error::{Error, Result};
use crate::linalg::{Hermitian, Matrix, MAX_DIM};
use crate::sampling;

/// Named diagonal profiles, indexed by `j = 1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialProfile {
    /// `v_j = 1 / (1 + j)`.
    InverseShift,
    /// `v_j = 1`.
    Constant,
    /// `v_j = ln j`.
    LogIndex,
}

impl PotentialProfile {
    pub fn value(&self, j: usize) -> f64 {
        let j = j as f64;
        match self {
            PotentialProfile::InverseShift => 1.0 / (1.0 + j),
            PotentialProfile::Constant => 1.0,
            PotentialProfile::LogIndex => j.ln(),
        }
    }
}

/// Finite positive model operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum OperatorSpec {
    /// Dirichlet second difference: `2/h²` on the diagonal, `−1/h²` beside it.
    #[serde(rename = "laplacian_1d")]
    Laplacian1d {
        n: usize,
        h: f64,
        /// Rescale to unit operator norm.
        #[serde(default)]
        normalize: bool,
    },
    /// Diagonal from a named profile times `scale`, or explicit values.
    #[serde(rename = "potential_diag")]
    PotentialDiag {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile: Option<PotentialProfile>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    #[serde(rename = "prescribed_diag")]
    PrescribedDiag { model: ModelSpectrum, n: usize },
    /// `G*G` for a seeded complex Gaussian `G`, rescaled to unit norm.
    #[serde(rename = "random_psd")]
    RandomPsd { n: usize, seed: u64 },
}

impl OperatorSpec {
    pub fn dim(&self) -> usize {
        match self {
            OperatorSpec::Laplacian1d { n, .. }
            | OperatorSpec::PotentialDiag { n, .. }
            | OperatorSpec::PrescribedDiag { n, .. }
            | OperatorSpec::RandomPsd { n, .. } => *n,
        }
    }
}

fn invalid(message: String) -> Error {
    Error::InvalidParameter(message)
}

pub fn build_operator(spec: &OperatorSpec) -> Result<Hermitian> {
    let n = spec.dim();
    if n < 2 {
        return Err(invalid(format!(
            "operator dimension must be at least 2, got {n}"
        )));
    }
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    match spec {
        OperatorSpec::Laplacian1d { h, normalize, .. } => {
            if !(*h > 0.0 && h.is_finite()) {
                return Err(invalid(format!("laplacian_1d needs h > 0, got {h}")));
            }
            let inv = 1.0 / (h * h);
            let mut m = Matrix::zeros(n);
            for i in 0..n {
                m[(i, i)] = (2.0 * inv).into();
                if i + 1 < n {
                    m[(i, i + 1)] = (-inv).into();
                    m[(i + 1, i)] = (-inv).into();
                }
            }
            let lap = Hermitian::new(m)?;
            if *normalize {
                // Dirichlet spectrum: (4/h²) sin²(kπ / (2(n+1))), largest at k = n.
                let top = 4.0
                    * inv
                    * (n as f64 * std::f64::consts::PI / (2.0 * (n as f64 + 1.0)))
                        .sin()
                        .powi(2);
                Ok(lap.scale_real(1.0 / top))
            } else {
                Ok(lap)
            }
        }
        OperatorSpec::PotentialDiag {
            profile,
            values,
            scale,
            ..
        } => {
            let diag: Vec<f64> = match (profile, values) {
                (Some(p), None) => {
                    let scale = scale.unwrap_or(1.0);
                    (1..=n).map(|j| scale * p.value(j)).collect()
                }
                (None, Some(v)) => {
                    if scale.is_some() {
                        return Err(invalid(
                            "potential_diag: `scale` applies only to a profile".into(),
                        ));
                    }
                    if v.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            found: v.len(),
                        });
                    }
                    v.clone()
                }
                _ => {
                    return Err(invalid(
                        "potential_diag needs exactly one of `profile` or `values`".into(),
                    ))
                }
            };
            if let Some((j, v)) = diag
                .iter()
                .enumerate()
                .find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
            {
                return Err(invalid(format!(
                    "potential_diag entry {} must be finite and non-negative, got {v}",
                    j + 1
                )));
            }
            Hermitian::from_real_diag(&diag)
        }
        OperatorSpec::PrescribedDiag { model, .. } => {
            Hermitian::from_real_diag(make_model_spectrum(*model, n)?.values())
        }
        OperatorSpec::RandomPsd { seed, .. } => {
            let g = sampling::random_psd(&mut sampling::rng(*seed), n);
            let top = g.eig()?.eigenvalues[n - 1];
            Ok(g.scale_real(1.0 / top))
        }
    }
}
