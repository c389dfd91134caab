//! Operator builders, experiment configuration, result emission and the
//! command-line self test.

pub mod config;
pub mod experiment;
pub mod matrix_io;
pub mod operators;
pub mod selftest;

pub use config::{AcceptanceThresholds, ExperimentConfig, ResolvedConfig};
pub use experiment::{
    execute, exit_status, run_experiment, Check, ExitStatus, ExperimentOutcome, Summary,
};
pub use matrix_io::{parse_matrix, write_matrix};
pub use operators::{build_operator, OperatorSpec, PotentialProfile};
pub use selftest::run_selftest;
