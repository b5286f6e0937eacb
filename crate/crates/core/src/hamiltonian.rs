//! Hamiltonian operator matrices `H = [[A, B], [C, −Aᴴ]]` with Hermitian `B`, `C`.
//!
//! Here condition (i) is automatic once `(A B)` is right invertible, and
//! `ℛ(−Aᴴ|𝒩(B))⊥ = 𝒩(P_{ℛ(B)⊥}A)`, so the reduced operator maps the projected
//! kernel into itself. In orthonormal coordinates it is Hermitian.

use crate::certificate::{run, Certificate, Instance, Route};
use crate::error::{Error, Result};
use crate::matrix::{hermitian_defect, norm2, Matrix};
use crate::subspace::{complement, kernel_of, range_of, subspace_equals, SubspaceComparison};
use crate::tolerance::ToleranceConfig;

/// Relative Hermiticity tolerance for `B` and `C`.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianInstance {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    tol: ToleranceConfig,
}

fn check_hermitian(which: &'static str, m: &Matrix) -> Result<()> {
    let residual = hermitian_defect(m);
    if residual > HERMITIAN_TOL * norm2(m).max(1.0) {
        return Err(Error::NotHermitian { which, residual });
    }
    Ok(())
}

impl HamiltonianInstance {
    /// All three blocks `n×n`; `B` and `C` Hermitian to [`HERMITIAN_TOL`].
    pub fn new(a: Matrix, b: Matrix, c: Matrix, tol: ToleranceConfig) -> Result<Self> {
        // shape and finiteness checks are shared with the general instance
        Instance::new(a.clone(), b.clone(), c.clone(), -a.adjoint(), tol)?;
        check_hermitian("B", &b)?;
        check_hermitian("C", &c)?;
        Ok(Self { a, b, c, tol })
    }

    /// Averages `B` and `C` with their adjoints before validating.
    pub fn symmetrized(a: Matrix, b: Matrix, c: Matrix, tol: ToleranceConfig) -> Result<Self> {
        let b = (&b + b.adjoint()) * crate::matrix::c(0.5, 0.0);
        let c = (&c + c.adjoint()) * crate::matrix::c(0.5, 0.0);
        Self::new(a, b, c, tol)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn tol(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// The general instance with `D = −Aᴴ`.
    pub fn to_instance(&self) -> Instance {
        Instance::new(
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            -self.a.adjoint(),
            self.tol,
        )
        .expect("validated on construction")
    }
}

/// Certificate with `𝒩(P_{ℛ(B)⊥}A)` as the codomain of the reduced operator.
///
/// `range_identity_residual` is filled on every run that reaches the
/// decomposition; a failed cross-check yields `Indeterminate` with
/// `NumericalBreakdown` rather than a wrong verdict.
pub fn certify_hamiltonian(inst: &HamiltonianInstance) -> Certificate {
    run(&inst.to_instance(), Route::Hamiltonian)
}

/// Compares `ℛ(−Aᴴ|𝒩(B))⊥` with `𝒩(P_{ℛ(B)⊥}A)`.
pub fn verify_range_identity(
    a: &Matrix,
    b: &Matrix,
    tol: &ToleranceConfig,
) -> Result<SubspaceComparison> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if b.shape() != a.shape() {
        return Err(Error::ShapeMismatch {
            context: "B",
            expected: format!("{}x{}", a.nrows(), a.ncols()),
            got: format!("{}x{}", b.nrows(), b.ncols()),
        });
    }
    check_hermitian("B", b)?;
    let kernel_b = kernel_of(b, tol);
    let lhs = complement(&range_of(&(-a.adjoint() * kernel_b.basis()), tol));
    let rb_perp = complement(&range_of(b, tol));
    let rhs = kernel_of(&(rb_perp.basis().adjoint() * a), tol);
    subspace_equals(&lhs, &rhs, tol)
}
