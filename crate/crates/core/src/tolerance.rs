use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::rank_threshold;

/// Environment variable that overrides the default `rank_coeff`.
pub const TOL_ENV_VAR: &str = "OPMAT_TOL";

/// Thresholds shared by rank decisions, subspace comparison and verdict banding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Multiplier in `τ(M) = rank_coeff·max(rows, cols)·ε·σ_max(M)`.
    pub rank_coeff: f64,
    /// Largest projector distance at which two subspaces count as equal.
    pub subspace_eq_tol: f64,
    /// Width of the indeterminate band `(τ, borderline_factor·τ]`.
    pub borderline_factor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_coeff: 1.0,
            subspace_eq_tol: 1e-8,
            borderline_factor: 100.0,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_coeff: f64, subspace_eq_tol: f64, borderline_factor: f64) -> Result<Self> {
        let tol = Self {
            rank_coeff,
            subspace_eq_tol,
            borderline_factor,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.rank_coeff) {
            return Err(Error::InvalidTolerance(format!(
                "rank_coeff must be positive, got {}",
                self.rank_coeff
            )));
        }
        if !positive(self.subspace_eq_tol) {
            return Err(Error::InvalidTolerance(format!(
                "subspace_eq_tol must be positive, got {}",
                self.subspace_eq_tol
            )));
        }
        if !(self.borderline_factor.is_finite() && self.borderline_factor >= 1.0) {
            return Err(Error::InvalidTolerance(format!(
                "borderline_factor must be >= 1, got {}",
                self.borderline_factor
            )));
        }
        Ok(())
    }

    /// Defaults with `rank_coeff` taken from `OPMAT_TOL` when it parses.
    pub fn from_env() -> Result<Self> {
        let mut tol = Self::default();
        if let Ok(raw) = std::env::var(TOL_ENV_VAR) {
            tol.rank_coeff = raw.trim().parse().map_err(|_| {
                Error::InvalidTolerance(format!("{TOL_ENV_VAR}={raw:?} is not a number"))
            })?;
            tol.validate()?;
        }
        Ok(tol)
    }

    pub fn threshold(&self, rows: usize, cols: usize, scale: f64) -> f64 {
        rank_threshold(self.rank_coeff, rows, cols, scale)
    }

    /// Tri-state classification of a decisive singular value against `τ`.
    pub fn band(&self, sigma_min: f64, tau: f64) -> Verdict {
        if sigma_min <= tau {
            Verdict::Singular
        } else if sigma_min <= self.borderline_factor * tau {
            Verdict::Indeterminate
        } else {
            Verdict::Invertible
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Invertible,
    Singular,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Invertible => "Invertible",
            Verdict::Singular => "Singular",
            Verdict::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}
