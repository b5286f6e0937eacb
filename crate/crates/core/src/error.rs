use thiserror::Error;

/// Failure modes of the subspace, decomposition and certificate layers.
///
/// Numerical verdicts (singular, borderline) are not errors; they are carried
/// by [`crate::certificate::Certificate`]. These variants signal violated
/// preconditions or malformed input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix {0} contains non-finite entries")]
    NonFinite(&'static str),

    #[error("subspace is not contained in the enclosing subspace (residual {residual:.3e})")]
    ContainmentViolated { residual: f64 },

    #[error("subspaces do not form a direct sum (concatenated basis is rank deficient)")]
    DirectSumDegenerate,

    #[error("operator is not right invertible (rank {rank} < rows {rows})")]
    NotRightInvertible { rank: usize, rows: usize },

    #[error("operator is not left invertible (rank {rank} < cols {cols})")]
    NotLeftInvertible { rank: usize, cols: usize },

    #[error("Schur pivot block is singular or not square")]
    PivotSingular,

    #[error("reduced transfer membership violated (residual {residual:.3e})")]
    MembershipViolated { residual: f64 },

    #[error("special-case structure violated: {0}")]
    StructureViolated(String),

    #[error("restriction of D to X' is not left invertible")]
    DLeftInvertibilityFailed,

    #[error("matrix {which} is not Hermitian (residual {residual:.3e})")]
    NotHermitian { which: &'static str, residual: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("inconsistent generator spec: {0}")]
    SpecInconsistent(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("shape error in field `{field}`: {message}")]
    Shape { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
