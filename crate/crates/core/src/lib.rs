//! Operator-ideal norms, Dixmier-trace estimation and Trotter–Kato
//! product-formula convergence for finite Hermitian models.

pub mod dixmier;
pub mod error;
pub mod harness;
pub mod kato;
pub mod linalg;
pub mod norms;
pub mod sampling;
pub mod spectrum;
pub mod trotter;

pub use error::{Error, Result};
pub use linalg::{Hermitian, Matrix};
pub use spectrum::SingularSpectrum;
