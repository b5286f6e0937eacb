//! Subspace arithmetic on orthonormal bases.
//!
//! Every subspace is stored as an `n × k` matrix with orthonormal columns.
//! Ranges and kernels come from SVDs truncated at `τ(M)`; complements and
//! orthogonal differences use prescribed dimensions so that no second rank
//! decision is made on data that is orthonormal by construction.

use crate::error::{Error, Result};
use crate::matrix::{
    self, columns, frobenius, hstack, identity, left_singular_basis, norm2, right_singular_basis,
    Matrix,
};
use crate::tolerance::ToleranceConfig;

/// Bound on `‖QᴴQ − I‖_F` accepted for a basis.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Wraps a basis after checking column orthonormality.
    pub fn from_orthonormal(basis: Matrix) -> Result<Self> {
        if !matrix::is_finite(&basis) {
            return Err(Error::NonFinite("subspace basis"));
        }
        let (n, k) = basis.shape();
        if k > n {
            return Err(Error::ShapeMismatch {
                context: "subspace basis",
                expected: format!("at most {n} columns"),
                got: k.to_string(),
            });
        }
        let defect = frobenius(&(basis.adjoint() * &basis - identity(k)));
        if defect > ORTHONORMAL_TOL {
            return Err(Error::PreconditionViolated(format!(
                "basis columns are not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    pub(crate) fn from_basis(basis: Matrix) -> Self {
        debug_assert!(
            frobenius(&(basis.adjoint() * &basis - identity(basis.ncols()))) <= 1e-8,
            "subspace basis lost orthonormality"
        );
        Self { basis }
    }

    /// The trivial subspace `{0}` of `Cⁿ`.
    pub fn zero(n: usize) -> Self {
        Self {
            basis: matrix::zeros(n, 0),
        }
    }

    /// All of `Cⁿ`, with the standard basis.
    pub fn full(n: usize) -> Self {
        Self { basis: identity(n) }
    }

    /// Span of the listed standard basis vectors `e_i` (0-based).
    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let mut basis = matrix::zeros(n, indices.len());
        for (k, &i) in indices.iter().enumerate() {
            basis[(i, k)] = matrix::ONE;
        }
        Self::from_basis(basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn into_basis(self) -> Matrix {
        self.basis
    }

    /// Orthogonal projector `QQᴴ`.
    pub fn projector(&self) -> Matrix {
        &self.basis * self.basis.adjoint()
    }

    /// Coordinates `Qᴴv` of vectors in this basis.
    pub fn coordinates(&self, v: &Matrix) -> Matrix {
        self.basis.adjoint() * v
    }

    /// `‖(I − P)·W‖₂`: how far the columns of `w` stick out of this subspace.
    pub fn excess(&self, w: &Matrix) -> f64 {
        let proj = &self.basis * (self.basis.adjoint() * w);
        norm2(&(w - proj))
    }

    /// `‖Qᴴ Q − I‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        frobenius(&(self.basis.adjoint() * &self.basis - identity(self.dim())))
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::AmbientMismatch {
                left: self.ambient_dim(),
                right: other.ambient_dim(),
            });
        }
        Ok(())
    }
}

/// Numerical rank: number of singular values above `τ(M)`.
pub fn numerical_rank(m: &Matrix, tol: &ToleranceConfig) -> usize {
    let sigma = matrix::singular_values(m);
    count_above(&sigma, m.nrows(), m.ncols(), tol)
}

fn count_above(sigma: &[f64], rows: usize, cols: usize, tol: &ToleranceConfig) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    let tau = tol.threshold(rows, cols, smax);
    sigma.iter().take_while(|&&s| s > tau).count()
}

/// Column space of `m` at numerical rank.
pub fn range_of(m: &Matrix, tol: &ToleranceConfig) -> Subspace {
    let (u, sigma) = left_singular_basis(m);
    let r = count_above(&sigma, m.nrows(), m.ncols(), tol);
    Subspace::from_basis(columns(&u, 0, r))
}

/// Null space of `m`: right singular vectors with `σ ≤ τ(M)`.
pub fn kernel_of(m: &Matrix, tol: &ToleranceConfig) -> Subspace {
    let (v, sigma) = right_singular_basis(m);
    let r = count_above(&sigma, m.nrows(), m.ncols(), tol);
    Subspace::from_basis(columns(&v, r, m.ncols()))
}

/// Orthogonal complement in the ambient space.
pub fn complement(s: &Subspace) -> Subspace {
    let n = s.ambient_dim();
    let k = s.dim();
    let (u, _) = left_singular_basis(s.basis());
    Subspace::from_basis(columns(&u, k, n))
}

pub fn subspace_sum(s1: &Subspace, s2: &Subspace, tol: &ToleranceConfig) -> Result<Subspace> {
    s1.check_ambient(s2)?;
    let stacked = hstack(s1.ambient_dim(), &[s1.basis(), s2.basis()]);
    Ok(range_of(&stacked, tol))
}

/// `Ω₁ ∩ Ω₂ = (Ω₁⊥ + Ω₂⊥)⊥`.
pub fn subspace_intersect(s1: &Subspace, s2: &Subspace, tol: &ToleranceConfig) -> Result<Subspace> {
    s1.check_ambient(s2)?;
    let sum = subspace_sum(&complement(s1), &complement(s2), tol)?;
    Ok(complement(&sum))
}

/// `S ⊖ S₁`: the orthogonal complement of `S₁` inside `S`.
pub fn subspace_ominus(s: &Subspace, s1: &Subspace, tol: &ToleranceConfig) -> Result<Subspace> {
    s.check_ambient(s1)?;
    let residual = s.excess(s1.basis());
    if residual > tol.subspace_eq_tol || s1.dim() > s.dim() {
        return Err(Error::ContainmentViolated { residual });
    }
    // S₁ in S-coordinates; its complement there has dimension dim S − dim S₁.
    let inner = s.coordinates(s1.basis());
    let (u, _) = left_singular_basis(&inner);
    let w = columns(&u, s1.dim(), s.dim());
    Ok(Subspace::from_basis(s.basis() * w))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceComparison {
    pub equal: bool,
    /// `‖P₁ − P₂‖₂`, the sine of the largest principal angle.
    pub residual: f64,
}

pub fn subspace_equals(
    s1: &Subspace,
    s2: &Subspace,
    tol: &ToleranceConfig,
) -> Result<SubspaceComparison> {
    s1.check_ambient(s2)?;
    let residual = norm2(&(s1.projector() - s2.projector()));
    Ok(SubspaceComparison {
        equal: residual <= tol.subspace_eq_tol,
        residual,
    })
}

/// Concatenated basis of a (possibly non-orthogonal) direct sum filling the
/// ambient space, factored once for repeated coordinate extraction.
#[derive(Debug, Clone)]
pub struct ObliqueFrame {
    basis: Matrix,
    dims: Vec<usize>,
}

impl ObliqueFrame {
    pub fn new(parts: &[&Subspace], tol: &ToleranceConfig) -> Result<Self> {
        let n = parts.first().map(|p| p.ambient_dim()).unwrap_or(0);
        for p in parts {
            if p.ambient_dim() != n {
                return Err(Error::AmbientMismatch {
                    left: n,
                    right: p.ambient_dim(),
                });
            }
        }
        let dims: Vec<usize> = parts.iter().map(|p| p.dim()).collect();
        if dims.iter().sum::<usize>() != n {
            return Err(Error::DirectSumDegenerate);
        }
        let blocks: Vec<&Matrix> = parts.iter().map(|p| p.basis()).collect();
        let basis = hstack(n, &blocks);
        if n > 0 && numerical_rank(&basis, tol) < n {
            return Err(Error::DirectSumDegenerate);
        }
        Ok(Self { basis, dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Stacked coordinates `c` with `basis·c = v`.
    pub fn coordinates(&self, v: &Matrix) -> Result<Matrix> {
        matrix::solve_square(&self.basis, v).ok_or(Error::DirectSumDegenerate)
    }

    /// Coordinates split per part.
    pub fn components(&self, v: &Matrix) -> Result<Vec<Matrix>> {
        let coords = self.coordinates(v)?;
        let mut out = Vec::with_capacity(self.dims.len());
        let mut at = 0;
        for &d in &self.dims {
            out.push(matrix::block(&coords, at, 0, d, v.ncols()));
            at += d;
        }
        Ok(out)
    }
}

/// Components `vᵢ` with `v = Σ basisᵢ·vᵢ` for parts forming a direct sum.
pub fn oblique_components(
    parts: &[&Subspace],
    v: &Matrix,
    tol: &ToleranceConfig,
) -> Result<Vec<Matrix>> {
    ObliqueFrame::new(parts, tol)?.components(v)
}
