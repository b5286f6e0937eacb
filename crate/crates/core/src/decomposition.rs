//! Six-part decomposition of `X ⊕ Y` induced by a right-invertible row `(A B)`.
//!
//! With `P = P_{ℛ(B)⊥}` and `Q = P_{ℛ(A)⊥}` the domain splits as
//!
//! ```text
//! X₁ = 𝒩(A)    X₂ = 𝒩(A)⊥ ⊖ 𝒩(PA)⊥    X₃ = 𝒩(PA)⊥
//! Y₁ = 𝒩(B)    Y₂ = 𝒩(B)⊥ ⊖ 𝒩(QB)⊥    Y₃ = 𝒩(QB)⊥
//! ```
//!
//! and the codomain as `X = (ℛ(A)⊥ ∔ ℛ(B)⊥) ⊕ (ℛ(A) ∩ ℛ(B))`. Block rows are
//! read off by the orthogonal projection onto each codomain part, i.e. through
//! `J = [Q_{ℛ(A)⊥}ᴴ; Q_{ℛ(B)⊥}ᴴ; Q_{ℛ∩}ᴴ]`, which is invertible because the
//! three parts sum directly to `X`. In these coordinates the row takes the
//! block form
//!
//! ```text
//!            X₁  X₂  X₃  Y₃  Y₂  Y₁
//! ℛ(A)⊥   [  0   0   0   B₃  0   0 ]
//! ℛ(B)⊥   [  0   0   A₃  0   0   0 ]
//! ℛ∩      [  0   A₂  A₀  B₀  B₂  0 ]
//! ```
//!
//! with `A₃`, `B₃` isomorphisms. The first two codomain parts are in general
//! not orthogonal; oblique coordinates along them would not produce the zero
//! blocks (`ℛ(A)` need not contain `ℛ(B)⊥`), the projections do.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invertibility::is_right_invertible;
use crate::matrix::{self, block_diag, frobenius, hstack, norm2, pseudoinverse, Matrix};
use crate::subspace::{
    complement, kernel_of, numerical_rank, range_of, subspace_intersect, subspace_ominus,
    Subspace,
};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone)]
pub struct RowDecomposition {
    pub x1: Subspace,
    pub x2: Subspace,
    pub x3: Subspace,
    pub y1: Subspace,
    pub y2: Subspace,
    pub y3: Subspace,
    pub ra_perp: Subspace,
    pub rb_perp: Subspace,
    /// `ℛ(A) ∩ ℛ(B)`.
    pub r_int: Subspace,
    /// `𝒩(P_{ℛ(B)⊥}A) = X₁ ⊕ X₂`.
    pub kernel_pa: Subspace,
    /// `𝒩(P_{ℛ(A)⊥}B) = Y₁ ⊕ Y₂`.
    pub kernel_qb: Subspace,
}

/// Dimensions of every part, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct DecompositionDims {
    pub X1: usize,
    pub X2: usize,
    pub X3: usize,
    pub Y1: usize,
    pub Y2: usize,
    pub Y3: usize,
    pub RA_perp: usize,
    pub RB_perp: usize,
    pub R_int: usize,
}

impl RowDecomposition {
    pub fn dims(&self) -> DecompositionDims {
        DecompositionDims {
            X1: self.x1.dim(),
            X2: self.x2.dim(),
            X3: self.x3.dim(),
            Y1: self.y1.dim(),
            Y2: self.y2.dim(),
            Y3: self.y3.dim(),
            RA_perp: self.ra_perp.dim(),
            RB_perp: self.rb_perp.dim(),
            R_int: self.r_int.dim(),
        }
    }

    /// `J`: stacked orthogonal projections onto `ℛ(A)⊥`, `ℛ(B)⊥`, `ℛ∩`.
    pub fn codomain_analysis(&self) -> Matrix {
        let n = self.ra_perp.ambient_dim();
        matrix::vstack(
            n,
            &[
                &self.ra_perp.basis().adjoint(),
                &self.rb_perp.basis().adjoint(),
                &self.r_int.basis().adjoint(),
            ],
        )
    }

    /// `J⁻¹`, mapping block coordinates back to `X`.
    pub fn codomain_synthesis(&self) -> Result<Matrix> {
        matrix::inverse(&self.codomain_analysis()).ok_or(Error::DirectSumDegenerate)
    }

    /// Unitary basis `X₁ ⊕ X₂ ⊕ X₃ ⊕ Y₃ ⊕ Y₂ ⊕ Y₁` of `X ⊕ Y`.
    pub fn domain_basis(&self) -> Matrix {
        let n = self.x1.ambient_dim();
        let p = self.y1.ambient_dim();
        let xs = hstack(n, &[self.x1.basis(), self.x2.basis(), self.x3.basis()]);
        let ys = hstack(p, &[self.y3.basis(), self.y2.basis(), self.y1.basis()]);
        block_diag(&[&xs, &ys])
    }

    /// Largest pairwise overlap `‖QᵢᴴQⱼ‖₂` among the domain parts on each side.
    pub fn orthogonality_defect(&self) -> f64 {
        let pairs = [
            (&self.x1, &self.x2),
            (&self.x1, &self.x3),
            (&self.x2, &self.x3),
            (&self.y1, &self.y2),
            (&self.y1, &self.y3),
            (&self.y2, &self.y3),
            (&self.ra_perp, &self.r_int),
            (&self.rb_perp, &self.r_int),
        ];
        pairs
            .iter()
            .map(|(a, b)| norm2(&(a.basis().adjoint() * b.basis())))
            .fold(0.0, f64::max)
    }
}

fn row(a: &Matrix, b: &Matrix) -> Matrix {
    hstack(a.nrows(), &[a, b])
}

fn check_row_shapes(a: &Matrix, b: &Matrix) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::ShapeMismatch {
            context: "row operator (A B)",
            expected: format!("A {n}x{n}, B {n}xp"),
            got: format!("A {}x{}, B {}x{}", a.nrows(), a.ncols(), b.nrows(), b.ncols()),
        });
    }
    Ok(())
}

fn require_right_invertible(a: &Matrix, b: &Matrix, tol: &ToleranceConfig) -> Result<()> {
    check_row_shapes(a, b)?;
    let r = row(a, b);
    if !is_right_invertible(&r, tol) {
        return Err(Error::NotRightInvertible {
            rank: numerical_rank(&r, tol),
            rows: r.nrows(),
        });
    }
    Ok(())
}

/// `𝒩(P_{S⊥}T)`, computed as the kernel of `Wᴴ T` with `W` an orthonormal
/// basis of `S⊥`; `Wᴴ T` and `WWᴴT` share their kernel.
fn kernel_of_projected(target_perp: &Subspace, t: &Matrix, tol: &ToleranceConfig) -> Subspace {
    kernel_of(&(target_perp.basis().adjoint() * t), tol)
}

pub fn decompose_row(a: &Matrix, b: &Matrix, tol: &ToleranceConfig) -> Result<RowDecomposition> {
    require_right_invertible(a, b, tol)?;
    let n = a.nrows();

    let ra = range_of(a, tol);
    let rb = range_of(b, tol);
    let ra_perp = complement(&ra);
    let rb_perp = complement(&rb);
    let r_int = subspace_intersect(&ra, &rb, tol)?;
    if ra_perp.dim() + rb_perp.dim() + r_int.dim() != n {
        return Err(Error::DirectSumDegenerate);
    }
    if n > 0 {
        let j = matrix::vstack(
            n,
            &[
                &ra_perp.basis().adjoint(),
                &rb_perp.basis().adjoint(),
                &r_int.basis().adjoint(),
            ],
        );
        let sigma = matrix::singular_values(&j);
        if sigma[n - 1] <= tol.threshold(n, n, sigma[0]) {
            return Err(Error::DirectSumDegenerate);
        }
    }

    let x1 = kernel_of(a, tol);
    let kernel_pa = kernel_of_projected(&rb_perp, a, tol);
    let x3 = complement(&kernel_pa);
    let x2 = subspace_ominus(&complement(&x1), &x3, tol)?;

    let y1 = kernel_of(b, tol);
    let kernel_qb = kernel_of_projected(&ra_perp, b, tol);
    let y3 = complement(&kernel_qb);
    let y2 = subspace_ominus(&complement(&y1), &y3, tol)?;

    Ok(RowDecomposition {
        x1,
        x2,
        x3,
        y1,
        y2,
        y3,
        ra_perp,
        rb_perp,
        r_int,
        kernel_pa,
        kernel_qb,
    })
}

/// Coordinate matrices of the row operator in the decomposition bases.
#[derive(Debug, Clone)]
pub struct BlockForm {
    /// `X₃ → ℛ∩`.
    pub a0: Matrix,
    /// `X₂ → ℛ∩`.
    pub a2: Matrix,
    /// `X₃ → ℛ(B)⊥`.
    pub a3: Matrix,
    /// `Y₃ → ℛ∩`.
    pub b0: Matrix,
    /// `Y₂ → ℛ∩`.
    pub b2: Matrix,
    /// `Y₃ → ℛ(A)⊥`.
    pub b3: Matrix,
    /// Largest Frobenius norm among the structurally zero blocks.
    pub zero_residual: f64,
    /// The full 3×6 block matrix in coordinates.
    pub coordinates: Matrix,
}

impl BlockForm {
    /// `[A₂ B₂]`, the row onto `ℛ(A) ∩ ℛ(B)`.
    pub fn inner_row(&self) -> Matrix {
        hstack(self.a2.nrows(), &[&self.a2, &self.b2])
    }
}

pub fn block_form(a: &Matrix, b: &Matrix, dec: &RowDecomposition) -> Result<BlockForm> {
    check_row_shapes(a, b)?;
    let coords = dec.codomain_analysis() * row(a, b) * dec.domain_basis();

    let [ra, rb, ri] = [dec.ra_perp.dim(), dec.rb_perp.dim(), dec.r_int.dim()];
    let [x1, x2, x3] = [dec.x1.dim(), dec.x2.dim(), dec.x3.dim()];
    let [y3, y2, y1] = [dec.y3.dim(), dec.y2.dim(), dec.y1.dim()];
    let row_at = [0, ra, ra + rb];
    let row_dims = [ra, rb, ri];
    let col_dims = [x1, x2, x3, y3, y2, y1];
    let col_at: Vec<usize> = col_dims
        .iter()
        .scan(0, |acc, &d| {
            let at = *acc;
            *acc += d;
            Some(at)
        })
        .collect();
    let blk = |r: usize, k: usize| {
        matrix::block(&coords, row_at[r], col_at[k], row_dims[r], col_dims[k])
    };

    // (row part, column part) pairs that must vanish
    const ZEROS: [(usize, usize); 12] = [
        (0, 0),
        (0, 1),
        (0, 2),
        (0, 4),
        (0, 5),
        (1, 0),
        (1, 1),
        (1, 3),
        (1, 4),
        (1, 5),
        (2, 0),
        (2, 5),
    ];
    let zero_residual = ZEROS
        .iter()
        .map(|&(r, k)| frobenius(&blk(r, k)))
        .fold(0.0, f64::max);

    Ok(BlockForm {
        a0: blk(2, 2),
        a2: blk(2, 1),
        a3: blk(1, 2),
        b0: blk(2, 3),
        b2: blk(2, 4),
        b3: blk(0, 3),
        zero_residual,
        coordinates: coords,
    })
}

/// `P_X(𝒩((A B)))`, the first-component image of the row's kernel.
pub fn projected_kernel(a: &Matrix, b: &Matrix, tol: &ToleranceConfig) -> Result<Subspace> {
    require_right_invertible(a, b, tol)?;
    let n = a.nrows();
    let k = kernel_of(&row(a, b), tol);
    let top = matrix::block(k.basis(), 0, 0, n, k.dim());
    // P_X is injective on 𝒩((A B)) off {0} ⊕ 𝒩(B), so the dimension is known;
    // a rank decision on `top` alone can pick up noise from 𝒩(B)
    let dim = k.dim() - kernel_of(b, tol).dim();
    let (u, _) = matrix::left_singular_basis(&top);
    Ok(Subspace::from_basis(matrix::columns(&u, 0, dim)))
}

/// `B₂⁻¹Ã₂` on the projected kernel, in coordinates.
#[derive(Debug, Clone)]
pub struct ReducedTransfer {
    /// `P_X(𝒩((A B)))`; its basis fixes the column coordinates of `map`.
    pub domain: Subspace,
    /// `Ã₂` on the domain basis, in `ℛ∩` coordinates.
    pub a2_tilde: Matrix,
    /// Coordinates in `Y₂`.
    pub map: Matrix,
    /// `‖B₂·map − Ã₂‖_F`.
    pub membership_residual: f64,
}

pub fn reduced_transfer(
    a: &Matrix,
    b: &Matrix,
    dec: &RowDecomposition,
    blocks: &BlockForm,
    tol: &ToleranceConfig,
) -> Result<ReducedTransfer> {
    let domain = projected_kernel(a, b, tol)?;
    // Ã₂ = (0 A₂) on X₁ ⊕ X₂: only the X₂ coordinates contribute.
    let a2_tilde = &blocks.a2 * dec.x2.coordinates(domain.basis());
    let map = pseudoinverse(&blocks.b2, tol.rank_coeff) * &a2_tilde;
    let membership_residual = frobenius(&(&blocks.b2 * &map - &a2_tilde));
    if membership_residual > 1e-6 * norm2(a) {
        return Err(Error::MembershipViolated {
            residual: membership_residual,
        });
    }
    Ok(ReducedTransfer {
        domain,
        a2_tilde,
        map,
        membership_residual,
    })
}

/// Maps the coordinate block matrix back to standard coordinates; the
/// result should reproduce `(A B)`.
pub fn reassemble(dec: &RowDecomposition, blocks: &BlockForm) -> Result<Matrix> {
    Ok(dec.codomain_synthesis()? * &blocks.coordinates * dec.domain_basis().adjoint())
}
