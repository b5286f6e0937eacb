//! Dense complex matrices and the SVD plumbing every other module builds on.
//!
//! Operators are plain [`nalgebra::DMatrix`] values over [`Complex64`].
//! Zero-row and zero-column matrices are legal and flow through every helper.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex double-precision matrix.
pub type Matrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    Matrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

/// Embeds a row-major real array with zero imaginary parts.
pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Matrix {
    assert_eq!(data.len(), rows * cols, "from_real: data length");
    Matrix::from_fn(rows, cols, |i, j| c(data[i * cols + j], 0.0))
}

/// Row-major complex constructor.
pub fn from_rows(rows: usize, cols: usize, data: &[Complex64]) -> Matrix {
    assert_eq!(data.len(), rows * cols, "from_rows: data length");
    Matrix::from_fn(rows, cols, |i, j| data[i * cols + j])
}

pub fn diag_real(values: &[f64]) -> Matrix {
    let n = values.len();
    Matrix::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { ZERO })
}

pub fn is_finite(m: &Matrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn frobenius(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral norm (largest singular value); zero for empty matrices.
pub fn norm2(m: &Matrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a matrix with at least one row and column.
pub fn sigma_min(m: &Matrix) -> Option<f64> {
    singular_values(m).last().copied()
}

/// `‖M − Mᴴ‖_F` for a square matrix.
pub fn hermitian_defect(m: &Matrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

/// Concatenates blocks horizontally; every block must have `rows` rows.
pub fn hstack(rows: usize, blocks: &[&Matrix]) -> Matrix {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack: row count");
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Concatenates blocks vertically; every block must have `cols` columns.
pub fn vstack(cols: usize, blocks: &[&Matrix]) -> Matrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack: column count");
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(*b);
        at += b.nrows();
    }
    out
}

pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut k) = (0, 0);
    for b in blocks {
        out.view_mut((r, k), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        k += b.ncols();
    }
    out
}

/// Assembles `[[A, B], [C, D]]`.
pub fn assemble_2x2(a: &Matrix, b: &Matrix, cm: &Matrix, d: &Matrix) -> Matrix {
    let n = a.nrows();
    let p = d.nrows();
    let top = hstack(n, &[a, b]);
    let bottom = hstack(p, &[cm, d]);
    vstack(n + p, &[&top, &bottom])
}

/// Copies a contiguous sub-block.
pub fn block(m: &Matrix, row: usize, col: usize, rows: usize, cols: usize) -> Matrix {
    m.view((row, col), (rows, cols)).into_owned()
}

/// Copies columns `from..to`.
pub fn columns(m: &Matrix, from: usize, to: usize) -> Matrix {
    block(m, 0, from, m.nrows(), to - from)
}

/// Rotates every column so its largest-magnitude entry is real and positive.
/// Ties go to the lowest index.
pub fn normalize_phases(m: &mut Matrix) {
    for mut col in m.column_iter_mut() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for (i, z) in col.iter().enumerate() {
            let a = z.norm();
            if a > best_abs {
                best = i;
                best_abs = a;
            }
        }
        if best_abs > 0.0 {
            let phase = col[best].conj() / best_abs;
            for z in col.iter_mut() {
                *z *= phase;
            }
            col[best] = c(col[best].re, 0.0);
        }
    }
}

fn to_faer(m: &Matrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// `(U, σ, V)` with `M = U·diag(σ)·Vᴴ` and σ descending. Thin keeps
/// `min(rows, cols)` columns in `U` and `V`; full keeps all of them.
fn svd(m: &Matrix, full: bool) -> (Matrix, Vec<f64>, Matrix) {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return if full {
            (identity(rows), Vec::new(), identity(cols))
        } else {
            (zeros(rows, 0), Vec::new(), zeros(cols, 0))
        };
    }
    let fm = to_faer(m);
    let dec = if full { fm.svd() } else { fm.thin_svd() };
    // faer's SVD is the backward-stable one; nalgebra's complex SVD loses
    // accuracy on some rank-deficient inputs
    let dec = dec.expect("SVD did not converge");
    let sigma = (0..k).map(|i| dec.S()[i].re).collect();
    (from_faer(dec.U()), sigma, from_faer(dec.V()))
}

/// Thin SVD with singular values sorted descending.
pub fn thin_svd(m: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    svd(m, false)
}

/// Singular values sorted descending, `min(rows, cols)` of them.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows().min(m.ncols()) == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD did not converge")
}

/// Full left singular basis: `U` is `rows × rows` with phase-normalized
/// columns; `σ` has `rows` entries (zeros appended past `min(rows, cols)`).
pub fn left_singular_basis(m: &Matrix) -> (Matrix, Vec<f64>) {
    let rows = m.nrows();
    let (mut u, mut sigma, _) = svd(m, true);
    sigma.resize(rows, 0.0);
    normalize_phases(&mut u);
    (u, sigma)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix; only the
/// lower triangle is read.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    if m.nrows() == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let evd = to_faer(m)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("eigendecomposition did not converge");
    let values = (0..m.nrows()).map(|i| evd.S()[i].re).collect();
    (values, from_faer(evd.U()))
}

/// Full right singular basis: `V` is `cols × cols` with phase-normalized
/// columns; `σ` has `cols` entries (zeros appended past `min(rows, cols)`).
pub fn right_singular_basis(m: &Matrix) -> (Matrix, Vec<f64>) {
    left_singular_basis(&m.adjoint())
}

/// Numerical rank threshold `τ = coeff·max(rows, cols)·ε·scale`.
pub fn rank_threshold(coeff: f64, rows: usize, cols: usize, scale: f64) -> f64 {
    coeff * (rows.max(cols) as f64) * f64::EPSILON * scale
}

/// Moore–Penrose pseudoinverse truncated at `τ(M)`.
pub fn pseudoinverse(m: &Matrix, rank_coeff: f64) -> Matrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return zeros(cols, rows);
    }
    let (u, sigma, v) = thin_svd(m);
    let tau = rank_threshold(rank_coeff, rows, cols, sigma[0]);
    let mut out = zeros(cols, rows);
    for (k, &s) in sigma.iter().enumerate() {
        if s <= tau {
            break;
        }
        let uk = u.column(k);
        let vk = v.column(k);
        out += (vk * uk.adjoint()) / c(s, 0.0);
    }
    out
}

/// Right singular vector belonging to the smallest singular value of a
/// square matrix, phase-normalized.
pub fn smallest_right_singular_vector(m: &Matrix) -> Option<Matrix> {
    let n = m.ncols();
    if n == 0 || m.nrows() != n {
        return None;
    }
    let (_, _, v) = thin_svd(m);
    let mut w = columns(&v, n - 1, n);
    normalize_phases(&mut w);
    Some(w)
}

/// Solves `M x = b` for square nonsingular `M` via LU with partial pivoting.
pub fn solve_square(m: &Matrix, b: &Matrix) -> Option<Matrix> {
    if m.nrows() == 0 {
        return Some(zeros(0, b.ncols()));
    }
    m.clone().lu().solve(b)
}

/// Inverse of a square matrix; `None` when LU breaks down.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    solve_square(m, &identity(m.nrows()))
}
