use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::operators::{build_operator, OperatorSpec, PotentialProfile};
use crate::error::{Error, Result};
use crate::kato::KatoFunction;
use crate::linalg::Hermitian;
use crate::norms::NormKind;
use crate::trotter::Scheme;

/// Thresholds applied by `run_experiment` when deciding its exit status.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcceptanceThresholds {
    pub enabled: bool,
    /// Inclusive range for the fitted exponent of `FG` and `GF`.
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub r_squared_min: f64,
    /// Lower bound on the fitted exponent of `F_sym` and `T_sym`.
    pub symmetric_gamma_min: f64,
    /// Largest admissible start of the lifting-bound tail.
    pub max_n0: u64,
}

impl Default for AcceptanceThresholds {
    fn default() -> Self {
        Self {
            enabled: true,
            gamma_min: 0.9,
            gamma_max: 1.1,
            r_squared_min: 0.98,
            symmetric_gamma_min: 0.9,
            max_n0: 32,
        }
    }
}

/// Scalars precede tables so the TOML form serialises in declaration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub f: String,
    pub g: String,
    pub schemes: Vec<Scheme>,
    pub t: f64,
    pub n_grid: Vec<u64>,
    pub norms: Vec<String>,
    pub output_dir: PathBuf,
    pub operator_a: OperatorSpec,
    pub operator_b: OperatorSpec,
    #[serde(default)]
    pub acceptance: AcceptanceThresholds,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            f: "exp".into(),
            g: "exp".into(),
            schemes: Scheme::ALL.to_vec(),
            t: 1.0,
            n_grid: vec![8, 16, 32, 64, 128, 256, 512, 1024],
            norms: vec!["operator".into(), "dixmier".into()],
            output_dir: PathBuf::from("results"),
            operator_a: OperatorSpec::Laplacian1d {
                n: 64,
                h: 1.0 / 65.0,
                normalize: true,
            },
            operator_b: OperatorSpec::PotentialDiag {
                n: 64,
                profile: Some(PotentialProfile::InverseShift),
                values: None,
                scale: None,
            },
            acceptance: AcceptanceThresholds::default(),
        }
    }
}

/// A configuration with every component built and validated.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub a: Hermitian,
    pub b: Hermitian,
    pub f: KatoFunction,
    pub g: KatoFunction,
    pub norms: Vec<NormKind>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let config = |e: Error| Error::Config(e.to_string());
        if self.schemes.is_empty() {
            return Err(Error::Config("at least one scheme is required".into()));
        }
        if self.norms.is_empty() {
            return Err(Error::Config("at least one norm is required".into()));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::Config(format!(
                "t must be positive and finite, got {}",
                self.t
            )));
        }
        if self.n_grid.is_empty()
            || self.n_grid[0] == 0
            || self.n_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Config(
                "n_grid must be positive and strictly increasing".into(),
            ));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::Config("output_dir must not be empty".into()));
        }
        let norms = self
            .norms
            .iter()
            .map(|text| {
                let kind: NormKind = text.parse()?;
                kind.validate()?;
                Ok(kind)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(config)?;
        let mut slugs: Vec<String> = norms.iter().map(NormKind::slug).collect();
        slugs.sort();
        slugs.dedup();
        if slugs.len() != norms.len() {
            return Err(Error::Config("norms must be distinct".into()));
        }
        let mut schemes = self.schemes.clone();
        schemes.sort_by_key(|s| s.as_str());
        schemes.dedup();
        if schemes.len() != self.schemes.len() {
            return Err(Error::Config("schemes must be distinct".into()));
        }
        let a = build_operator(&self.operator_a).map_err(config)?;
        let b = build_operator(&self.operator_b).map_err(config)?;
        if a.dim() != b.dim() {
            return Err(Error::Config(format!(
                "operator dimensions differ: {} and {}",
                a.dim(),
                b.dim()
            )));
        }
        Ok(ResolvedConfig {
            a,
            b,
            f: self.f.parse().map_err(config)?,
            g: self.g.parse().map_err(config)?,
            norms,
        })
    }
}
