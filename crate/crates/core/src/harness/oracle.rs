//! Brute-force ground truth: the full SVD of the assembled matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};
use crate::tolerance::{ToleranceConfig, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub verdict: Verdict,
    /// `None` for the empty matrix.
    pub sigma_min: Option<f64>,
    pub tau: f64,
}

/// Classifies a square matrix by its smallest singular value against
/// `τ(M) = rank_coeff·dim·ε·σ_max(M)`, using the same band as the certificate.
pub fn oracle_invertible(m: &Matrix, tol: &ToleranceConfig) -> Result<OracleResult> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    if rows == 0 {
        return Ok(OracleResult {
            verdict: Verdict::Invertible,
            sigma_min: None,
            tau: 0.0,
        });
    }
    let sigma = matrix::singular_values(m);
    let smin = sigma[rows - 1];
    let tau = tol.threshold(rows, cols, sigma[0]);
    Ok(OracleResult {
        verdict: tol.band(smin, tau),
        sigma_min: Some(smin),
        tau,
    })
}

/// Approximate kernel vector: the right singular vector of `σ_min`.
pub fn oracle_witness(m: &Matrix) -> Option<Matrix> {
    matrix::smallest_right_singular_vector(m)
}
