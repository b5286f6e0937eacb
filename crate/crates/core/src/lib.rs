//! Invertibility certificates for 2×2 block operator matrices `[[A, B], [C, D]]`
//! over finite-dimensional complex spaces.

pub mod certificate;
pub mod decomposition;
pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod invertibility;
pub mod matrix;
pub mod subspace;
pub mod tolerance;

pub use certificate::{certify, Certificate, Instance, Reason};
pub use decomposition::{decompose_row, DecompositionDims, RowDecomposition};
pub use error::{Error, Result};
pub use hamiltonian::{certify_hamiltonian, HamiltonianInstance};
pub use harness::generate::{generate, GeneratorKind, GeneratorSpec};
pub use harness::io::{load_instance, LoadOptions, Report};
pub use harness::oracle::{oracle_invertible, OracleResult};
pub use matrix::Matrix;
pub use subspace::Subspace;
pub use tolerance::{ToleranceConfig, Verdict};
