//! One-sided inverses, the classical Schur-complement test and the
//! finite-dimensional consequences of the row-isomorphism characterization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, frobenius, hstack, identity, norm2, pseudoinverse, Matrix};
use crate::subspace::{complement, kernel_of, numerical_rank, range_of, subspace_equals};
use crate::tolerance::{ToleranceConfig, Verdict};

/// An explicit one-sided inverse together with its defects.
#[derive(Debug, Clone)]
pub struct SidedInverseResult {
    pub inverse: Matrix,
    /// `‖T·S − I‖_F` (right) or `‖S·T − I‖_F` (left).
    pub residual: f64,
    /// Projector distance between the subspace the construction pins down
    /// and the one it is supposed to coincide with.
    pub range_check_residual: f64,
}

pub fn is_right_invertible(t: &Matrix, tol: &ToleranceConfig) -> bool {
    numerical_rank(t, tol) == t.nrows()
}

pub fn is_left_invertible(t: &Matrix, tol: &ToleranceConfig) -> bool {
    numerical_rank(t, tol) == t.ncols()
}

/// Right inverse `S` with `TS = I` and `ℛ(S) = 𝒩(T)⊥`.
///
/// The minimum-norm pseudoinverse is exactly the operator that vanishes on
/// `𝒩(T)` and inverts `T|𝒩(T)⊥`.
pub fn right_inverse(t: &Matrix, tol: &ToleranceConfig) -> Result<SidedInverseResult> {
    let rank = numerical_rank(t, tol);
    if rank != t.nrows() {
        return Err(Error::NotRightInvertible {
            rank,
            rows: t.nrows(),
        });
    }
    let s = pseudoinverse(t, tol.rank_coeff);
    let residual = frobenius(&(t * &s - identity(t.nrows())));
    let range_check_residual =
        subspace_equals(&range_of(&s, tol), &complement(&kernel_of(t, tol)), tol)?.residual;
    Ok(SidedInverseResult {
        inverse: s,
        residual,
        range_check_residual,
    })
}

/// Left inverse `S` with `ST = I`, vanishing on `ℛ(T)⊥`.
pub fn left_inverse(t: &Matrix, tol: &ToleranceConfig) -> Result<SidedInverseResult> {
    let rank = numerical_rank(t, tol);
    if rank != t.ncols() {
        return Err(Error::NotLeftInvertible {
            rank,
            cols: t.ncols(),
        });
    }
    let s = pseudoinverse(t, tol.rank_coeff);
    let residual = frobenius(&(&s * t - identity(t.ncols())));
    let range_check_residual =
        subspace_equals(&kernel_of(&s, tol), &complement(&range_of(t, tol)), tol)?.residual;
    Ok(SidedInverseResult {
        inverse: s,
        residual,
        range_check_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchurPivot {
    /// Pivot on `A`; the complement is `D − CA⁻¹B`.
    UseA,
    /// Pivot on `B`; the complement is `C − DB⁻¹A`.
    UseB,
}

#[derive(Debug, Clone)]
pub struct SchurVerdict {
    pub verdict: Verdict,
    pub complement: Matrix,
    /// `None` for an empty complement.
    pub sigma_min: Option<f64>,
    pub tau: f64,
}

/// Decides invertibility of `[[A, B], [C, D]]` through a Schur complement.
pub fn schur_certify(
    a: &Matrix,
    b: &Matrix,
    c: &Matrix,
    d: &Matrix,
    pivot: SchurPivot,
    tol: &ToleranceConfig,
) -> Result<SchurVerdict> {
    let (pivot_block, top, bottom_pivot_row, bottom_other) = match pivot {
        SchurPivot::UseA => (a, b, c, d),
        SchurPivot::UseB => (b, a, d, c),
    };
    if !pivot_is_isomorphism(pivot_block, tol) {
        return Err(Error::PivotSingular);
    }
    let solved = matrix::solve_square(pivot_block, top).ok_or(Error::PivotSingular)?;
    let coupling = bottom_pivot_row * solved;
    let complement = bottom_other - &coupling;
    let (rows, cols) = complement.shape();
    if rows == 0 && cols == 0 {
        return Ok(SchurVerdict {
            verdict: Verdict::Invertible,
            complement,
            sigma_min: None,
            tau: 0.0,
        });
    }
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    let sigma = matrix::singular_values(&complement);
    let smin = sigma.last().copied().unwrap_or(0.0);
    let scale = sigma[0].max(norm2(bottom_other)).max(norm2(&coupling));
    let tau = tol.threshold(rows, cols, scale);
    Ok(SchurVerdict {
        verdict: tol.band(smin, tau),
        complement,
        sigma_min: Some(smin),
        tau,
    })
}

fn pivot_is_isomorphism(m: &Matrix, tol: &ToleranceConfig) -> bool {
    m.nrows() == m.ncols() && numerical_rank(m, tol) == m.nrows()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowIsomorphism {
    pub is_iso: bool,
    /// `𝒩(A) = 𝒩(B) = {0}`.
    pub cond_i: bool,
    /// `ℛ(A) = ℛ(B)⊥` and `ℛ(B) = ℛ(A)⊥`.
    pub cond_ii: bool,
}

/// Checks whether the row `(A B)` is an isomorphism through the kernel and
/// range conditions. At finite dimension this forces `p = 0`.
pub fn row_isomorphism_check(
    a: &Matrix,
    b: &Matrix,
    tol: &ToleranceConfig,
) -> Result<RowIsomorphism> {
    let n = a.nrows();
    if b.nrows() != n {
        return Err(Error::ShapeMismatch {
            context: "row_isomorphism_check",
            expected: format!("B with {n} rows"),
            got: b.nrows().to_string(),
        });
    }
    let cond_i = kernel_of(a, tol).dim() == 0 && kernel_of(b, tol).dim() == 0;
    let ra = range_of(a, tol);
    let rb = range_of(b, tol);
    let cond_ii = subspace_equals(&ra, &complement(&rb), tol)?.equal
        && subspace_equals(&rb, &complement(&ra), tol)?.equal;
    Ok(RowIsomorphism {
        is_iso: cond_i && cond_ii,
        cond_i,
        cond_ii,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelNecessity {
    /// `false` exactly when `p ≥ 1` and `𝒩((A B)) = {0}`, which rules out
    /// invertibility of `M` for every choice of `C`, `D`.
    pub m_possible: bool,
    pub row_kernel_dim: usize,
}

pub fn kernel_necessity_check(a: &Matrix, b: &Matrix, tol: &ToleranceConfig) -> KernelNecessity {
    let row = hstack(a.nrows(), &[a, b]);
    let row_kernel_dim = kernel_of(&row, tol).dim();
    KernelNecessity {
        m_possible: !(b.ncols() >= 1 && row_kernel_dim == 0),
        row_kernel_dim,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, diag_real, from_real, zeros};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn right_invertibility() {
        assert!(is_right_invertible(&from_real(1, 3, &[1.0, 0.0, 1.0]), &tol()));
        assert!(!is_right_invertible(&zeros(2, 2), &tol()));
        let f1_row = hstack(2, &[&diag_real(&[1.0, 0.0]), &diag_real(&[0.0, 1.0])]);
        assert!(is_right_invertible(&f1_row, &tol()));
    }

    #[test]
    fn right_inverse_examples() {
        let r = right_inverse(&identity(3), &tol()).unwrap();
        assert!(frobenius(&(r.inverse - identity(3))) < 1e-14);

        let t = from_real(1, 3, &[1.0, 0.0, 1.0]);
        let r = right_inverse(&t, &tol()).unwrap();
        assert!(frobenius(&(&r.inverse - from_real(3, 1, &[0.5, 0.0, 0.5]))) < 1e-14);
        assert!(r.residual < 1e-14);
        assert!(r.range_check_residual < 1e-12);

        let r = right_inverse(&diag_real(&[2.0, 2.0]), &tol()).unwrap();
        assert!(frobenius(&(r.inverse - diag_real(&[0.5, 0.5]))) < 1e-14);

        assert!(matches!(
            right_inverse(&zeros(2, 2), &tol()),
            Err(Error::NotRightInvertible { .. })
        ));
    }

    #[test]
    fn left_inverse_examples() {
        let r = left_inverse(&from_real(2, 1, &[1.0, 0.0]), &tol()).unwrap();
        assert!(frobenius(&(&r.inverse - from_real(1, 2, &[1.0, 0.0]))) < 1e-14);
        assert!(r.residual < 1e-14);

        assert!(!is_left_invertible(&zeros(2, 1), &tol()));

        let r = left_inverse(&from_real(2, 1, &[1.0, 1.0]), &tol()).unwrap();
        assert!(frobenius(&(&r.inverse - from_real(1, 2, &[0.5, 0.5]))) < 1e-14);
        assert!(r.range_check_residual < 1e-12);

        assert!(matches!(
            left_inverse(&zeros(2, 1), &tol()),
            Err(Error::NotLeftInvertible { .. })
        ));
    }

    #[test]
    fn schur_examples() {
        let i2 = identity(2);
        let z = zeros(2, 2);
        let v = schur_certify(&i2, &z, &z, &i2, SchurPivot::UseA, &tol()).unwrap();
        assert_eq!(v.verdict, Verdict::Invertible);

        // F2: complement is d − c₁.
        let b = from_real(2, 1, &[1.0, 0.0]);
        let cm = from_real(1, 2, &[1.0, 5.0]);
        let d = from_real(1, 1, &[1.0]);
        let v = schur_certify(&i2, &b, &cm, &d, SchurPivot::UseA, &tol()).unwrap();
        assert_eq!(v.verdict, Verdict::Singular);
        let cm = from_real(1, 2, &[0.0, 0.0]);
        let v = schur_certify(&i2, &b, &cm, &d, SchurPivot::UseA, &tol()).unwrap();
        assert_eq!(v.verdict, Verdict::Invertible);
        assert!((v.complement[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let a = diag_real(&[1.0, 0.0]);
        let bb = diag_real(&[0.0, 1.0]);
        assert!(matches!(
            schur_certify(&a, &bb, &z, &i2, SchurPivot::UseA, &tol()),
            Err(Error::PivotSingular)
        ));
    }

    #[test]
    fn schur_with_b_pivot() {
        // [[0, I], [I, 0]] is invertible; C − DB⁻¹A = I.
        let i2 = identity(2);
        let z = zeros(2, 2);
        let v = schur_certify(&z, &i2, &i2, &z, SchurPivot::UseB, &tol()).unwrap();
        assert_eq!(v.verdict, Verdict::Invertible);
    }

    #[test]
    fn row_isomorphism_examples() {
        let iso = row_isomorphism_check(&identity(3), &zeros(3, 0), &tol()).unwrap();
        assert!(iso.is_iso && iso.cond_i && iso.cond_ii);

        let iso = row_isomorphism_check(
            &diag_real(&[1.0, 0.0]),
            &diag_real(&[0.0, 1.0]),
            &tol(),
        )
        .unwrap();
        assert!(!iso.is_iso && !iso.cond_i);

        let iso =
            row_isomorphism_check(&identity(2), &from_real(2, 1, &[1.0, 0.0]), &tol()).unwrap();
        assert!(!iso.is_iso);
    }

    #[test]
    fn kernel_necessity_examples() {
        let k = kernel_necessity_check(&identity(2), &from_real(2, 1, &[1.0, 0.0]), &tol());
        assert!(k.m_possible);
        assert_eq!(k.row_kernel_dim, 1);
        let k = kernel_necessity_check(&identity(2), &zeros(2, 0), &tol());
        assert!(k.m_possible);
        assert_eq!(k.row_kernel_dim, 0);
    }
}
