//! Executable invertibility certificate for `M = [[A, B], [C, D]]`.
//!
//! `M` is an isomorphism exactly when
//!
//! 1. the row `(A B)` is right invertible,
//! 2. `D|𝒩(B)` is left invertible, and
//! 3. the reduced operator `C₂ − D₂B₂⁻¹Ã₂`, mapping the projected kernel
//!    `P_X(𝒩((A B)))` into `𝒲 = ℛ(D|𝒩(B))⊥`, is bijective.
//!
//! The checks run in that order, so a `Singular` verdict names the first
//! necessary condition that fails. Each decisive singular value is banded
//! against a scale-aware `τ`: at or below `τ` is `Singular`, inside
//! `(τ, borderline_factor·τ]` is `Indeterminate`. Every stage uses the
//! dimension of `M` in `τ`, since the derived operators inherit rounding from
//! computations on all of `X ⊕ Y`.

use serde::{Deserialize, Serialize};

use crate::decomposition::{
    block_form, decompose_row, reduced_transfer, BlockForm, DecompositionDims, ReducedTransfer,
    RowDecomposition,
};
use crate::error::{Error, Result};
use crate::harness::oracle::{oracle_invertible, oracle_witness, OracleResult};
use crate::invertibility::kernel_necessity_check;
use crate::matrix::{
    self, assemble_2x2, block, block_diag, columns, frobenius, hstack, identity,
    left_singular_basis, norm2, singular_values, Matrix,
};
use crate::subspace::{complement, range_of, subspace_equals, Subspace};
use crate::tolerance::{ToleranceConfig, Verdict};

/// A block operator matrix together with the tolerances it is judged by.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: Matrix,
    tol: ToleranceConfig,
}

fn shape_err(name: &'static str, expected: (usize, usize), got: (usize, usize)) -> Error {
    Error::ShapeMismatch {
        context: name,
        expected: format!("{}x{}", expected.0, expected.1),
        got: format!("{}x{}", got.0, got.1),
    }
}

impl Instance {
    /// `A: n×n`, `B: n×p`, `C: p×n`, `D: p×p`, all finite.
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix, tol: ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        let n = a.nrows();
        let p = d.nrows();
        for (name, m, want) in [
            ("A", &a, (n, n)),
            ("B", &b, (n, p)),
            ("C", &c, (p, n)),
            ("D", &d, (p, p)),
        ] {
            if m.shape() != want {
                return Err(shape_err(name, want, m.shape()));
            }
            if !matrix::is_finite(m) {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(Self { a, b, c, d, tol })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn p(&self) -> usize {
        self.d.nrows()
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

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    pub fn tol(&self) -> &ToleranceConfig {
        &self.tol
    }

    pub fn with_tol(mut self, tol: ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        self.tol = tol;
        Ok(self)
    }

    pub fn into_parts(self) -> (Matrix, Matrix, Matrix, Matrix, ToleranceConfig) {
        (self.a, self.b, self.c, self.d, self.tol)
    }

    /// The `(n+p)×(n+p)` matrix `M`.
    pub fn assemble(&self) -> Matrix {
        assemble_2x2(&self.a, &self.b, &self.c, &self.d)
    }

    /// `‖M‖₂`, the floor of every scale `τ` is measured against.
    pub fn norm(&self) -> f64 {
        norm2(&self.assemble())
    }

    /// The row operator `(A B)`.
    pub fn row(&self) -> Matrix {
        hstack(self.n(), &[&self.a, &self.b])
    }

    /// The column operator `[B; D]`.
    pub fn column(&self) -> Matrix {
        matrix::vstack(self.p(), &[&self.b, &self.d])
    }
}

/// Why a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reason {
    /// All conditions hold; the reduced operator is bijective.
    ReducedInvertible,
    RowNotSurjective,
    /// `p ≥ 1` and `𝒩((A B)) = {0}`.
    RowKernelTrivial,
    RestrictionNotLeftInvertible,
    ReducedNotSquare,
    ReducedSingular,
    RowBorderline,
    RestrictionBorderline,
    ReducedBorderline,
    /// A consistency check between equivalent constructions failed.
    NumericalBreakdown,
}

impl std::fmt::Display for Reason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Condition (i): left invertibility of `D|𝒩(B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionI {
    pub holds: bool,
    /// `None` when `𝒩(B) = {0}`.
    pub sigma_min: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub verdict: Verdict,
    pub reason: Reason,
    pub cond_i: Option<ConditionI>,
    /// The reduced operator in orthonormal coordinates.
    pub reduced: Option<Matrix>,
    pub reduced_sigma_min: Option<f64>,
    pub oracle: OracleResult,
    /// `verdict == oracle.verdict`.
    pub agreement: bool,
    pub dims: Option<DecompositionDims>,
    pub zero_residual: Option<f64>,
    /// `‖U·M·V − target‖_F` in decomposition coordinates.
    pub umv_residual: Option<f64>,
    /// Hamiltonian route only: `‖P_{ℛ(−A*|𝒩(B))⊥} − P_{𝒩(P_{ℛ(B)⊥}A)}‖₂`.
    pub range_identity_residual: Option<f64>,
    /// Approximate kernel vector of `M` when the oracle reports `Singular`.
    pub witness: Option<Matrix>,
}

impl Certificate {
    fn pending(oracle: OracleResult) -> Self {
        Self {
            verdict: Verdict::Indeterminate,
            reason: Reason::NumericalBreakdown,
            cond_i: None,
            reduced: None,
            reduced_sigma_min: None,
            oracle,
            agreement: false,
            dims: None,
            zero_residual: None,
            umv_residual: None,
            range_identity_residual: None,
            witness: None,
        }
    }

    fn finish(mut self, verdict: Verdict, reason: Reason) -> Self {
        self.verdict = verdict;
        self.reason = reason;
        self.agreement = verdict == self.oracle.verdict;
        self
    }

    pub fn reduced_shape(&self) -> Option<(usize, usize)> {
        self.reduced.as_ref().map(|r| r.shape())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Route {
    General,
    /// Codomain of the reduced operator taken as `𝒩(P_{ℛ(B)⊥}A)`.
    Hamiltonian,
}

/// Everything between the row decomposition and the reduced operator.
#[derive(Debug, Clone)]
pub(crate) struct Reduction {
    pub dec: RowDecomposition,
    pub blocks: BlockForm,
    pub transfer: ReducedTransfer,
    /// `ℛ(D|𝒩(B))`.
    pub restriction_range: Subspace,
    /// `𝒲 = ℛ(D|𝒩(B))⊥`.
    pub w: Subspace,
    pub cond_i: ConditionI,
    pub cond_i_verdict: Verdict,
}

fn row_verdict(inst: &Instance) -> Verdict {
    let n = inst.n();
    if n == 0 {
        return Verdict::Invertible;
    }
    let row = inst.row();
    let sigma = singular_values(&row);
    let tau = inst.tol.threshold(n, row.ncols(), sigma[0].max(inst.norm()));
    inst.tol.band(sigma[n - 1], tau)
}

pub(crate) fn reduce(inst: &Instance) -> Result<Reduction> {
    let tol = &inst.tol;
    let dec = decompose_row(&inst.a, &inst.b, tol)?;
    let blocks = block_form(&inst.a, &inst.b, &dec)?;
    let transfer = reduced_transfer(&inst.a, &inst.b, &dec, &blocks, tol)?;

    // P_X(𝒩((A B))) and 𝒩(P_{ℛ(B)⊥}A) coincide at finite dimension.
    if !subspace_equals(&transfer.domain, &dec.kernel_pa, tol)?.equal {
        return Err(Error::PreconditionViolated(
            "projected kernel differs from kernel of P_{R(B)^perp} A".into(),
        ));
    }

    let p = inst.p();
    let k1 = dec.y1.dim();
    let restriction = &inst.d * dec.y1.basis();
    let (cond_i, cond_i_verdict) = if k1 == 0 {
        (
            ConditionI {
                holds: true,
                sigma_min: None,
            },
            Verdict::Invertible,
        )
    } else {
        let sigma = singular_values(&restriction);
        let smin = sigma[k1 - 1];
        // measured against M so a restriction that is zero up to rounding
        // is not rescaled into a well-conditioned one
        let scale = sigma[0].max(inst.norm());
        let tau = tol.threshold(inst.n() + p, inst.n() + p, scale);
        let v = tol.band(smin, tau);
        (
            ConditionI {
                holds: v == Verdict::Invertible,
                sigma_min: Some(smin),
            },
            v,
        )
    };
    // Split Y along the left singular vectors of D|𝒩(B); when condition (i)
    // holds the first k₁ of them span its range.
    let (u, _) = left_singular_basis(&restriction);
    let split = k1.min(p);
    let restriction_range = Subspace::from_orthonormal(columns(&u, 0, split))?;
    let w = Subspace::from_orthonormal(columns(&u, split, p))?;

    Ok(Reduction {
        dec,
        blocks,
        transfer,
        restriction_range,
        w,
        cond_i,
        cond_i_verdict,
    })
}

/// `(C₂ − D₂B₂⁻¹Ã₂, scale)` with the codomain basis chosen by `route`.
fn reduced_operator(inst: &Instance, red: &Reduction, route: Route) -> (Matrix, f64) {
    let codomain = match route {
        Route::General => &red.w,
        Route::Hamiltonian => &red.dec.kernel_pa,
    };
    let domain = red.transfer.domain.basis();
    let c2 = codomain.coordinates(&(&inst.c * domain));
    let d2 = codomain.coordinates(&(&inst.d * red.dec.y2.basis()));
    let r = &c2 - &d2 * &red.transfer.map;
    let scale = norm2(&r)
        .max(inst.norm())
        .max(norm2(&inst.d) * norm2(&red.transfer.map));
    (r, scale)
}

pub(crate) fn run(inst: &Instance, route: Route) -> Certificate {
    let tol = &inst.tol;
    let m = inst.assemble();
    let oracle = oracle_invertible(&m, tol).expect("assembled matrix is square");
    let mut cert = Certificate::pending(oracle);
    if oracle.verdict == Verdict::Singular {
        cert.witness = oracle_witness(&m);
    }

    match row_verdict(inst) {
        Verdict::Singular => return cert.finish(Verdict::Singular, Reason::RowNotSurjective),
        Verdict::Indeterminate => {
            return cert.finish(Verdict::Indeterminate, Reason::RowBorderline)
        }
        Verdict::Invertible => {}
    }
    if !kernel_necessity_check(&inst.a, &inst.b, tol).m_possible {
        return cert.finish(Verdict::Singular, Reason::RowKernelTrivial);
    }

    let red = match reduce(inst) {
        Ok(red) => red,
        Err(_) => return cert.finish(Verdict::Indeterminate, Reason::NumericalBreakdown),
    };
    cert.dims = Some(red.dec.dims());
    cert.zero_residual = Some(red.blocks.zero_residual);
    cert.cond_i = Some(red.cond_i);

    if route == Route::Hamiltonian {
        let residual = subspace_equals(&red.w, &red.dec.kernel_pa, tol)
            .map(|c| c.residual)
            .unwrap_or(f64::INFINITY);
        cert.range_identity_residual = Some(residual);
        // both the range identity and condition (i) hold automatically here
        if residual > tol.subspace_eq_tol || red.cond_i_verdict != Verdict::Invertible {
            return cert.finish(Verdict::Indeterminate, Reason::NumericalBreakdown);
        }
    }
    match red.cond_i_verdict {
        Verdict::Singular => {
            return cert.finish(Verdict::Singular, Reason::RestrictionNotLeftInvertible)
        }
        Verdict::Indeterminate => {
            return cert.finish(Verdict::Indeterminate, Reason::RestrictionBorderline)
        }
        Verdict::Invertible => {}
    }

    if let Ok(full) = full_block_form(inst, &red) {
        cert.umv_residual = umv_from_blocks(full).ok().map(|u| u.residual);
    }

    let (r, scale) = reduced_operator(inst, &red, route);
    let (rows, cols) = r.shape();
    cert.reduced = Some(r.clone());
    if rows != cols {
        return cert.finish(Verdict::Singular, Reason::ReducedNotSquare);
    }
    if rows == 0 {
        return cert.finish(Verdict::Invertible, Reason::ReducedInvertible);
    }
    let smin = singular_values(&r)[rows - 1];
    cert.reduced_sigma_min = Some(smin);
    let tau = tol.threshold(inst.n() + inst.p(), inst.n() + inst.p(), scale);
    match tol.band(smin, tau) {
        Verdict::Invertible => cert.finish(Verdict::Invertible, Reason::ReducedInvertible),
        Verdict::Singular => cert.finish(Verdict::Singular, Reason::ReducedSingular),
        Verdict::Indeterminate => cert.finish(Verdict::Indeterminate, Reason::ReducedBorderline),
    }
}

/// Decides invertibility of `M` and compares against the brute-force oracle.
pub fn certify(inst: &Instance) -> Certificate {
    run(inst, Route::General)
}

/// Five-by-five block layout of `M` in decomposition coordinates.
///
/// Columns: `𝒩(P_{ℛ(B)⊥}A), X₃, Y₃, Y₂, Y₁`.
/// Rows: `ℛ(A)⊥, ℛ(B)⊥, ℛ(A)∩ℛ(B), 𝒲, ℛ(D|𝒩(B))`.
///
/// ```text
/// [ 0   0   B₃  0   0  ]
/// [ 0   A₃  0   0   0  ]
/// [ Ã₂  A₀  B₀  B₂  0  ]
/// [ C₂  C₃  D₁  D₂  0  ]
/// [ C₄  C₅  D₃  D₄  D₅ ]
/// ```
#[derive(Debug, Clone)]
pub struct FullBlockForm {
    pub a_t2: Matrix,
    pub a0: Matrix,
    pub a3: Matrix,
    pub b0: Matrix,
    pub b2: Matrix,
    pub b3: Matrix,
    pub c2: Matrix,
    pub c3: Matrix,
    pub c4: Matrix,
    pub c5: Matrix,
    pub d1: Matrix,
    pub d2: Matrix,
    pub d3: Matrix,
    pub d4: Matrix,
    pub d5: Matrix,
    /// `M` in coordinates.
    pub coordinates: Matrix,
    pub row_dims: [usize; 5],
    pub col_dims: [usize; 5],
    /// Unitary domain basis.
    pub domain_basis: Matrix,
    /// Inverse of the codomain analysis map; oblique on the `X` side.
    pub codomain_basis: Matrix,
    /// Largest Frobenius norm among the structural zero blocks.
    pub zero_residual: f64,
    /// `‖codomain·coordinates·domainᴴ − M‖_F`.
    pub reconstruction_residual: f64,
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    row_at: [usize; 5],
    row_dims: [usize; 5],
    col_at: [usize; 5],
    col_dims: [usize; 5],
}

fn offsets(dims: [usize; 5]) -> [usize; 5] {
    let mut at = [0; 5];
    for i in 1..5 {
        at[i] = at[i - 1] + dims[i - 1];
    }
    at
}

impl Grid {
    fn new(row_dims: [usize; 5], col_dims: [usize; 5]) -> Self {
        Self {
            row_at: offsets(row_dims),
            row_dims,
            col_at: offsets(col_dims),
            col_dims,
        }
    }

    fn get(&self, m: &Matrix, r: usize, k: usize) -> Matrix {
        block(m, self.row_at[r], self.col_at[k], self.row_dims[r], self.col_dims[k])
    }

    fn set(&self, m: &mut Matrix, r: usize, k: usize, value: &Matrix) {
        m.view_mut(
            (self.row_at[r], self.col_at[k]),
            (self.row_dims[r], self.col_dims[k]),
        )
        .copy_from(value);
    }
}

const FULL_ZEROS: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 3),
    (0, 4),
    (1, 0),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 4),
    (3, 4),
];

/// Blocks kept by `U·M·V`.
const KEPT: [(usize, usize); 7] = [(0, 2), (1, 1), (2, 0), (2, 3), (3, 0), (3, 3), (4, 4)];

pub(crate) fn full_block_form(inst: &Instance, red: &Reduction) -> Result<FullBlockForm> {
    let dec = &red.dec;
    let n = inst.n();
    let p = inst.p();
    let kernel_basis = red.transfer.domain.basis();
    let xs = hstack(n, &[kernel_basis, dec.x3.basis()]);
    let ys = hstack(p, &[dec.y3.basis(), dec.y2.basis(), dec.y1.basis()]);
    let domain_basis = block_diag(&[&xs, &ys]);

    let y_frame = hstack(p, &[red.w.basis(), red.restriction_range.basis()]);
    let analysis = block_diag(&[&dec.codomain_analysis(), &y_frame.adjoint()]);
    let codomain_basis = block_diag(&[&dec.codomain_synthesis()?, &y_frame]);

    let m = inst.assemble();
    let coordinates = &analysis * &m * &domain_basis;

    let row_dims = [
        dec.ra_perp.dim(),
        dec.rb_perp.dim(),
        dec.r_int.dim(),
        red.w.dim(),
        red.restriction_range.dim(),
    ];
    let col_dims = [
        red.transfer.domain.dim(),
        dec.x3.dim(),
        dec.y3.dim(),
        dec.y2.dim(),
        dec.y1.dim(),
    ];
    if row_dims.iter().sum::<usize>() != n + p || col_dims.iter().sum::<usize>() != n + p {
        return Err(Error::PreconditionViolated(
            "block dimensions do not partition M".into(),
        ));
    }
    let g = Grid::new(row_dims, col_dims);
    let zero_residual = FULL_ZEROS
        .iter()
        .map(|&(r, k)| frobenius(&g.get(&coordinates, r, k)))
        .fold(0.0, f64::max);
    let reconstruction_residual =
        frobenius(&(&codomain_basis * &coordinates * domain_basis.adjoint() - &m));

    Ok(FullBlockForm {
        a_t2: g.get(&coordinates, 2, 0),
        a0: g.get(&coordinates, 2, 1),
        a3: g.get(&coordinates, 1, 1),
        b0: g.get(&coordinates, 2, 2),
        b2: g.get(&coordinates, 2, 3),
        b3: g.get(&coordinates, 0, 2),
        c2: g.get(&coordinates, 3, 0),
        c3: g.get(&coordinates, 3, 1),
        c4: g.get(&coordinates, 4, 0),
        c5: g.get(&coordinates, 4, 1),
        d1: g.get(&coordinates, 3, 2),
        d2: g.get(&coordinates, 3, 3),
        d3: g.get(&coordinates, 4, 2),
        d4: g.get(&coordinates, 4, 3),
        d5: g.get(&coordinates, 4, 4),
        coordinates,
        row_dims,
        col_dims,
        domain_basis,
        codomain_basis,
        zero_residual,
        reconstruction_residual,
    })
}

/// The unit-triangular transforms that isolate `Δ` inside `M`.
#[derive(Debug, Clone)]
pub struct UmvReduction {
    pub u: Matrix,
    pub v: Matrix,
    /// The pattern `U·M·V` must match: only `B₃, A₃, Ã₂, C₂, B₂, D₂, D₅` survive.
    pub target: Matrix,
    /// `‖U·M_coords·V − target‖_F`.
    pub residual: f64,
    pub reduced_form: FullBlockForm,
}

fn inv(m: &Matrix, what: &str) -> Result<Matrix> {
    matrix::inverse(m).ok_or_else(|| Error::PreconditionViolated(format!("{what} is singular")))
}

fn umv_from_blocks(full: FullBlockForm) -> Result<UmvReduction> {
    let g = Grid::new(full.row_dims, full.col_dims);
    let size = full.coordinates.nrows();
    let b3_inv = inv(&full.b3, "B3")?;
    let a3_inv = inv(&full.a3, "A3")?;
    let d5_inv = inv(&full.d5, "D5")?;

    let mut u = identity(size);
    g_set_rows(&g, &mut u, 2, 0, &(-(&full.b0 * &b3_inv)));
    g_set_rows(&g, &mut u, 2, 1, &(-(&full.a0 * &a3_inv)));
    g_set_rows(&g, &mut u, 3, 0, &(-(&full.d1 * &b3_inv)));
    g_set_rows(&g, &mut u, 3, 1, &(-(&full.c3 * &a3_inv)));

    let mut v = identity(size);
    for (k, blk) in [&full.c4, &full.c5, &full.d3, &full.d4].into_iter().enumerate() {
        g_set_cols(&g, &mut v, 4, k, &(-(&d5_inv * blk)));
    }

    let mut target = matrix::zeros(size, size);
    for &(r, k) in &KEPT {
        g.set(&mut target, r, k, &g.get(&full.coordinates, r, k));
    }
    let residual = frobenius(&(&u * &full.coordinates * &v - &target));
    Ok(UmvReduction {
        u,
        v,
        target,
        residual,
        reduced_form: full,
    })
}

// U acts on codomain blocks (rows × rows), V on domain blocks (cols × cols).
fn g_set_rows(g: &Grid, m: &mut Matrix, r: usize, k: usize, value: &Matrix) {
    m.view_mut((g.row_at[r], g.row_at[k]), (g.row_dims[r], g.row_dims[k]))
        .copy_from(value);
}

fn g_set_cols(g: &Grid, m: &mut Matrix, r: usize, k: usize, value: &Matrix) {
    m.view_mut((g.col_at[r], g.col_at[k]), (g.col_dims[r], g.col_dims[k]))
        .copy_from(value);
}

fn reduction_with_cond_i(inst: &Instance) -> Result<Reduction> {
    if row_verdict(inst) == Verdict::Singular {
        return Err(Error::PreconditionViolated("row (A B) is not right invertible".into()));
    }
    let red = reduce(inst)?;
    if !red.cond_i.holds {
        return Err(Error::PreconditionViolated(
            "D restricted to N(B) is not left invertible".into(),
        ));
    }
    Ok(red)
}

/// Builds `U`, `V` with `U·M·V` block diagonal up to the `Δ` core.
pub fn umv_reduce(inst: &Instance) -> Result<UmvReduction> {
    let red = reduction_with_cond_i(inst)?;
    umv_from_blocks(full_block_form(inst, &red)?)
}

/// `Δ = [[Ã₂, B₂], [C₂, D₂]]` from `𝒩(P_{ℛ(B)⊥}A) ⊕ Y₂` to `(ℛ(A)∩ℛ(B)) ⊕ 𝒲`.
#[derive(Debug, Clone)]
pub struct DeltaOperator {
    pub matrix: Matrix,
    /// `None` for the empty operator.
    pub sigma_min: Option<f64>,
    pub verdict: Verdict,
}

pub fn delta_operator(inst: &Instance) -> Result<DeltaOperator> {
    let red = reduction_with_cond_i(inst)?;
    let full = full_block_form(inst, &red)?;
    let top = hstack(full.a_t2.nrows(), &[&full.a_t2, &full.b2]);
    let bottom = hstack(full.c2.nrows(), &[&full.c2, &full.d2]);
    let delta = matrix::vstack(top.ncols(), &[&top, &bottom]);
    let (rows, cols) = delta.shape();
    if rows != cols {
        return Ok(DeltaOperator {
            matrix: delta,
            sigma_min: None,
            verdict: Verdict::Singular,
        });
    }
    if rows == 0 {
        return Ok(DeltaOperator {
            matrix: delta,
            sigma_min: None,
            verdict: Verdict::Invertible,
        });
    }
    let sigma = singular_values(&delta);
    let smin = sigma[rows - 1];
    let scale = sigma[0].max(inst.norm());
    let tau = inst.tol.threshold(inst.n() + inst.p(), inst.n() + inst.p(), scale);
    Ok(DeltaOperator {
        matrix: delta,
        sigma_min: Some(smin),
        verdict: inst.tol.band(smin, tau),
    })
}

/// Certificate for the disjoint-range case: `ℛ(A) = X′ = 𝒩(B)`,
/// `𝒩(A) = X″ = ℛ(B)`, `X = X′ ⊕ X″`. Invertibility reduces to
/// `C₂ = P_{ℛ(D|X′)⊥} C|X″` being an isomorphism.
pub fn special_certify(
    a: &Matrix,
    b: &Matrix,
    c: &Matrix,
    d: &Matrix,
    x_prime: &Subspace,
    x_dprime: &Subspace,
    tol: &ToleranceConfig,
) -> Result<Certificate> {
    let inst = Instance::new(a.clone(), b.clone(), c.clone(), d.clone(), *tol)?;
    let n = inst.n();
    if inst.p() != n {
        return Err(Error::StructureViolated(format!(
            "all blocks must act on one space (n = {n}, p = {})",
            inst.p()
        )));
    }
    let checks: [(&str, Subspace, &Subspace); 5] = [
        ("R(A) = X'", range_of(a, tol), x_prime),
        ("N(A) = X''", crate::subspace::kernel_of(a, tol), x_dprime),
        ("R(B) = X''", range_of(b, tol), x_dprime),
        ("N(B) = X'", crate::subspace::kernel_of(b, tol), x_prime),
        ("X'' = X' perp", complement(x_prime), x_dprime),
    ];
    for (label, computed, given) in checks.iter() {
        let cmp = subspace_equals(computed, given, tol)?;
        if !cmp.equal {
            return Err(Error::StructureViolated(format!(
                "{label} fails (residual {:.3e})",
                cmp.residual
            )));
        }
    }

    let restriction = d * x_prime.basis();
    let k = x_prime.dim();
    let cond_i = if k == 0 {
        ConditionI {
            holds: true,
            sigma_min: None,
        }
    } else {
        let sigma = singular_values(&restriction);
        let smin = sigma[k - 1];
        let tau = tol.threshold(2 * n, 2 * n, sigma[0].max(inst.norm()));
        if tol.band(smin, tau) != Verdict::Invertible {
            return Err(Error::DLeftInvertibilityFailed);
        }
        ConditionI {
            holds: true,
            sigma_min: Some(smin),
        }
    };
    let (u, _) = left_singular_basis(&restriction);
    let w = Subspace::from_orthonormal(columns(&u, k, n))?;
    let c2 = w.coordinates(&(c * x_dprime.basis()));

    let m = inst.assemble();
    let oracle = oracle_invertible(&m, tol)?;
    let mut cert = Certificate::pending(oracle);
    if oracle.verdict == Verdict::Singular {
        cert.witness = oracle_witness(&m);
    }
    cert.cond_i = Some(cond_i);
    cert.reduced = Some(c2.clone());
    let (rows, cols) = c2.shape();
    if rows != cols {
        return Ok(cert.finish(Verdict::Singular, Reason::ReducedNotSquare));
    }
    if rows == 0 {
        return Ok(cert.finish(Verdict::Invertible, Reason::ReducedInvertible));
    }
    let sigma = singular_values(&c2);
    let smin = sigma[rows - 1];
    cert.reduced_sigma_min = Some(smin);
    let tau = tol.threshold(2 * n, 2 * n, sigma[0].max(inst.norm()));
    Ok(match tol.band(smin, tau) {
        Verdict::Invertible => cert.finish(Verdict::Invertible, Reason::ReducedInvertible),
        Verdict::Singular => cert.finish(Verdict::Singular, Reason::ReducedSingular),
        Verdict::Indeterminate => cert.finish(Verdict::Indeterminate, Reason::ReducedBorderline),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, diag_real, from_real, zeros};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn f2(c1: f64, c2: f64, d: f64) -> Instance {
        Instance::new(
            identity(2),
            from_real(2, 1, &[1.0, 0.0]),
            from_real(1, 2, &[c1, c2]),
            from_real(1, 1, &[d]),
            tol(),
        )
        .unwrap()
    }

    fn f1(cm: Matrix, d: Matrix) -> Instance {
        Instance::new(diag_real(&[1.0, 0.0]), diag_real(&[0.0, 1.0]), cm, d, tol()).unwrap()
    }

    #[test]
    fn instance_rejects_bad_shapes_and_values() {
        let r = Instance::new(identity(2), zeros(2, 1), zeros(2, 2), zeros(1, 1), tol());
        assert!(matches!(r, Err(Error::ShapeMismatch { context: "C", .. })));
        let mut a = identity(2);
        a[(0, 1)] = c(f64::NAN, 0.0);
        let r = Instance::new(a, zeros(2, 0), zeros(0, 2), zeros(0, 0), tol());
        assert!(matches!(r, Err(Error::NonFinite("A"))));
    }

    #[test]
    fn f2_singular_line() {
        let cert = certify(&f2(1.0, 5.0, 1.0));
        assert_eq!(cert.verdict, Verdict::Singular);
        assert_eq!(cert.reason, Reason::ReducedSingular);
        assert_eq!(cert.oracle.verdict, Verdict::Singular);
        assert!(cert.agreement);
        assert!(cert.witness.is_some());
    }

    #[test]
    fn f2_invertible_point() {
        let cert = certify(&f2(0.0, 0.0, 1.0));
        assert_eq!(cert.verdict, Verdict::Invertible);
        assert!(cert.agreement);
        let r = cert.reduced.unwrap();
        assert_eq!(r.shape(), (1, 1));
        // R = c₁ − d·1 up to the phase of the 𝒲 basis vector
        assert!((r[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trivial_y_reduces_to_a() {
        let inst = Instance::new(identity(3), zeros(3, 0), zeros(0, 3), zeros(0, 0), tol()).unwrap();
        let cert = certify(&inst);
        assert_eq!(cert.verdict, Verdict::Invertible);
        assert_eq!(cert.reduced_shape(), Some((0, 0)));
    }

    #[test]
    fn zero_row_of_m_fails_condition_i() {
        let inst =
            Instance::new(identity(2), zeros(2, 1), zeros(1, 2), zeros(1, 1), tol()).unwrap();
        let cert = certify(&inst);
        assert_eq!(cert.verdict, Verdict::Singular);
        assert_eq!(cert.reason, Reason::RestrictionNotLeftInvertible);
        assert!(!cert.cond_i.unwrap().holds);
    }

    #[test]
    fn non_surjective_row() {
        let inst = Instance::new(
            diag_real(&[1.0, 0.0]),
            zeros(2, 1),
            zeros(1, 2),
            identity(1),
            tol(),
        )
        .unwrap();
        let cert = certify(&inst);
        assert_eq!(cert.reason, Reason::RowNotSurjective);
        assert!(cert.agreement);
    }

    #[test]
    fn umv_on_f2_and_trivial_y() {
        let u = umv_reduce(&f2(0.3, -2.0, 1.7)).unwrap();
        assert_eq!(u.u.shape(), (3, 3));
        assert!(u.residual < 1e-12);
        assert!(u.reduced_form.zero_residual < 1e-12);

        let inst = Instance::new(identity(2), zeros(2, 0), zeros(0, 2), zeros(0, 0), tol()).unwrap();
        let u = umv_reduce(&inst).unwrap();
        assert!(frobenius(&(&u.u - identity(2))) == 0.0);
        assert!(frobenius(&(&u.v - identity(2))) == 0.0);
    }

    #[test]
    fn umv_on_block_diagonal() {
        let a = from_real(2, 2, &[2.0, 1.0, 0.0, 1.0]);
        let d = from_real(2, 2, &[1.0, 0.0, 3.0, 1.0]);
        let inst = Instance::new(a, zeros(2, 2), zeros(2, 2), d, tol()).unwrap();
        let u = umv_reduce(&inst).unwrap();
        assert!(u.residual < 1e-12);
        // all coupling blocks vanish, so U = V = I
        assert!(frobenius(&(&u.u - identity(4))) < 1e-12);
        assert!(frobenius(&(&u.v - identity(4))) < 1e-12);
    }

    #[test]
    fn delta_on_f2() {
        for (c1, c2, d) in [(0.0, 0.0, 1.0), (1.0, 5.0, 1.0), (2.0, -1.0, 0.5)] {
            let delta = delta_operator(&f2(c1, c2, d)).unwrap();
            assert_eq!(delta.matrix.shape(), (2, 2));
            // |det Δ| = |d − c₁| since every basis vector is a unit-modulus
            // multiple of a standard one
            let det = delta.matrix.determinant();
            assert!((det.norm() - (d - c1).abs()).abs() < 1e-13);
        }
        let inst = Instance::new(identity(2), zeros(2, 0), zeros(0, 2), zeros(0, 0), tol()).unwrap();
        let delta = delta_operator(&inst).unwrap();
        assert_eq!(delta.matrix.shape(), (0, 0));
        assert_eq!(delta.verdict, Verdict::Invertible);
    }

    #[test]
    fn delta_on_f1() {
        for c22 in [0.0, 3.0] {
            let cm = from_real(2, 2, &[0.4, -1.0, 2.0, c22]);
            let delta = delta_operator(&f1(cm, identity(2))).unwrap();
            assert_eq!(delta.matrix.shape(), (1, 1));
            assert!((delta.matrix[(0, 0)].norm() - c22).abs() < 1e-14);
        }
    }

    #[test]
    fn special_case_examples() {
        let a = diag_real(&[1.0, 0.0]);
        let b = diag_real(&[0.0, 1.0]);
        let xp = Subspace::coordinate(2, &[0]);
        let xpp = Subspace::coordinate(2, &[1]);
        let cm = from_real(2, 2, &[0.0, 0.0, 0.0, 3.0]);
        let cert = special_certify(&a, &b, &cm, &identity(2), &xp, &xpp, &tol()).unwrap();
        assert_eq!(cert.verdict, Verdict::Invertible);
        assert!(cert.agreement);
        assert_eq!(certify(&f1(cm.clone(), identity(2))).verdict, Verdict::Invertible);

        let cm = from_real(2, 2, &[7.0, 7.0, 7.0, 0.0]);
        let cert = special_certify(&a, &b, &cm, &identity(2), &xp, &xpp, &tol()).unwrap();
        assert_eq!(cert.verdict, Verdict::Singular);
        assert!(cert.agreement);
        assert_eq!(certify(&f1(cm.clone(), identity(2))).verdict, Verdict::Singular);

        let r = special_certify(&a, &a, &cm, &identity(2), &xp, &xpp, &tol());
        assert!(matches!(r, Err(Error::StructureViolated(_))));

        let r = special_certify(&a, &b, &cm, &zeros(2, 2), &xp, &xpp, &tol());
        assert!(matches!(r, Err(Error::DLeftInvertibilityFailed)));
    }
}
