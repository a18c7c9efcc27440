//! Quantum discord and classical correlation of bipartite states measured
//! by projective (von Neumann) measurements on a qubit subsystem.

pub mod correlations;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod optimizer;
pub mod runner;
pub mod states;
pub mod su_basis;

pub use correlations::{
    classical_correlation, mutual_information, quantum_discord, quantum_discord_with_oracle, CorrelationReport,
};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64;
pub use measurement::{conditional_entropy, VonNeumannMeasurement};
pub use optimizer::{grid_oracle, Method, OptimizationResult, OptimizerConfig, OracleResult};
pub use states::DensityMatrix;
