//! Small hand-checkable instance families.
//!
//! - `f1`: `A = diag(1,0)`, `B = diag(0,1)`; invertible iff `c₂₂ ≠ 0` when `D = I`.
//! - `f2`: `A = I₂`, `B = e₁`; `det M = d − c₁`.
//! - `f3`: Hamiltonian on the `f1` row; invertible iff `c₂₂ ≠ 0`.
//! - `f4`: `p = 0`, so `M = A`.

use crate::certificate::Instance;
use crate::hamiltonian::HamiltonianInstance;
use crate::matrix::{c, diag_real, from_real, identity, zeros, Matrix};
use crate::subspace::Subspace;
use crate::tolerance::ToleranceConfig;

pub fn f1_row() -> (Matrix, Matrix) {
    (diag_real(&[1.0, 0.0]), diag_real(&[0.0, 1.0]))
}

/// The `f1` row with arbitrary `C`, `D`.
pub fn f1(cm: Matrix, d: Matrix, tol: ToleranceConfig) -> Instance {
    let (a, b) = f1_row();
    Instance::new(a, b, cm, d, tol).expect("f1 shapes are fixed")
}

/// `f1` with `D = I` and `C = [[c₁₁, c₁₂], [c₂₁, c₂₂]]` (real).
pub fn f1_special(c11: f64, c12: f64, c21: f64, c22: f64, tol: ToleranceConfig) -> Instance {
    f1(from_real(2, 2, &[c11, c12, c21, c22]), identity(2), tol)
}

/// `(X′, X″) = (span{e₁}, span{e₂})` for `f1`.
pub fn f1_split() -> (Subspace, Subspace) {
    (Subspace::coordinate(2, &[0]), Subspace::coordinate(2, &[1]))
}

pub fn f2(c1: f64, c2: f64, d: f64, tol: ToleranceConfig) -> Instance {
    Instance::new(
        identity(2),
        from_real(2, 1, &[1.0, 0.0]),
        from_real(1, 2, &[c1, c2]),
        from_real(1, 1, &[d]),
        tol,
    )
    .expect("f2 shapes are fixed")
}

/// `C = [[c₁₁, c₁₂], [c̄₁₂, c₂₂]]`.
pub fn f3(c11: f64, c12: (f64, f64), c22: f64, tol: ToleranceConfig) -> HamiltonianInstance {
    let (a, b) = f1_row();
    let mut cm = zeros(2, 2);
    cm[(0, 0)] = c(c11, 0.0);
    cm[(0, 1)] = c(c12.0, c12.1);
    cm[(1, 0)] = c(c12.0, -c12.1);
    cm[(1, 1)] = c(c22, 0.0);
    HamiltonianInstance::new(a, b, cm, tol).expect("f3 blocks are Hermitian")
}

pub fn f4(a: Matrix, tol: ToleranceConfig) -> Instance {
    let n = a.nrows();
    Instance::new(a, zeros(n, 0), zeros(0, n), zeros(0, 0), tol).expect("f4 needs a square A")
}
