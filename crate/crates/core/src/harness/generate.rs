//! Seeded instance generators.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, which is
//! platform-stable, so a seed replays the same instance everywhere. Complex
//! entries are `(x + iy)/√2` with `x, y` standard normal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::certificate::{reduce, Instance};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianInstance;
use crate::harness::oracle::oracle_invertible;
use crate::matrix::{self, c, columns, hstack, identity, singular_values, Matrix};
use crate::subspace::Subspace;
use crate::tolerance::ToleranceConfig;

/// Attempts before a singular plant is reported as unattainable.
const PLANT_ATTEMPTS: usize = 16;

/// A plant counts only if the oracle's `σ_min` is at most this fraction of
/// `τ`; plants that land within rounding of `τ` are redrawn.
pub const PLANT_MARGIN: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Dense,
    RankStructured,
    Hamiltonian,
    Special,
    SingularPlanted,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Dense,
        GeneratorKind::RankStructured,
        GeneratorKind::Hamiltonian,
        GeneratorKind::Special,
        GeneratorKind::SingularPlanted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Dense => "dense",
            GeneratorKind::RankStructured => "rank_structured",
            GeneratorKind::Hamiltonian => "hamiltonian",
            GeneratorKind::Special => "special",
            GeneratorKind::SingularPlanted => "singular_planted",
        }
    }
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::SpecInconsistent(format!("unknown generator kind {s:?}")))
    }
}

/// What to generate.
///
/// The rank fields are required for `rank_structured`. `hamiltonian` and
/// `singular_planted` use them when present and otherwise draw a consistent
/// triple. For `special`, `rank_a = n′` and `rank_b = n″`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub p: usize,
    #[serde(default)]
    pub rank_a: Option<usize>,
    #[serde(default)]
    pub rank_b: Option<usize>,
    #[serde(default)]
    pub dim_intersection: Option<usize>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, p: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            p,
            rank_a: None,
            rank_b: None,
            dim_intersection: None,
            seed,
        }
    }

    pub fn with_ranks(mut self, rank_a: usize, rank_b: usize, dim_intersection: usize) -> Self {
        self.rank_a = Some(rank_a);
        self.rank_b = Some(rank_b);
        self.dim_intersection = Some(dim_intersection);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::SpecInconsistent(msg));
        match self.kind {
            GeneratorKind::RankStructured => match self.ranks() {
                Some(r) => check_ranks(self.n, self.p, r),
                None => bad("rank_structured needs rank_a, rank_b and dim_intersection".into()),
            },
            GeneratorKind::Hamiltonian | GeneratorKind::SingularPlanted => {
                if self.kind == GeneratorKind::Hamiltonian && self.p != self.n {
                    return bad(format!("hamiltonian needs p = n, got n={} p={}", self.n, self.p));
                }
                match self.ranks() {
                    Some(r) => check_ranks(self.n, self.p, r),
                    None if self.rank_a.is_some()
                        || self.rank_b.is_some()
                        || self.dim_intersection.is_some() =>
                    {
                        bad("give all of rank_a, rank_b, dim_intersection or none".into())
                    }
                    None => Ok(()),
                }
            }
            GeneratorKind::Special => {
                if self.p != self.n {
                    return bad(format!("special needs p = n, got n={} p={}", self.n, self.p));
                }
                let (np, npp) = self.special_split();
                if np + npp != self.n {
                    return bad(format!("n' + n'' = {} must equal n = {}", np + npp, self.n));
                }
                Ok(())
            }
            GeneratorKind::Dense => Ok(()),
        }
    }

    fn ranks(&self) -> Option<(usize, usize, usize)> {
        Some((self.rank_a?, self.rank_b?, self.dim_intersection?))
    }

    fn special_split(&self) -> (usize, usize) {
        match (self.rank_a, self.rank_b) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, self.n.saturating_sub(a)),
            (None, Some(b)) => (self.n.saturating_sub(b), b),
            (None, None) => (self.n - self.n / 2, self.n / 2),
        }
    }
}

fn check_ranks(n: usize, p: usize, (ra, rb, int): (usize, usize, usize)) -> Result<()> {
    let msg = if ra > n {
        format!("rank_a = {ra} exceeds n = {n}")
    } else if rb > n.min(p) {
        format!("rank_b = {rb} exceeds min(n, p) = {}", n.min(p))
    } else if int > ra.min(rb) {
        format!("dim_intersection = {int} exceeds min(rank_a, rank_b)")
    } else if ra + rb != n + int {
        format!("rank_a + rank_b - dim_intersection = {} must equal n = {n}", ra + rb - int)
    } else {
        return Ok(());
    };
    Err(Error::SpecInconsistent(msg))
}

/// SplitMix64 finalizer; decorrelates per-instance seeds derived from one base.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * s, im * s)
    })
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let g = gaussian(rng, n, n);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Haar-distributed unitary of order `n`.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let (q, r) = gaussian(rng, n, n).qr().unpack();
    // fix the phases of R's diagonal so the distribution is uniform
    let mut q = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Orthonormal basis of the column span of a full-column-rank matrix.
fn orth(m: &Matrix) -> Matrix {
    if m.ncols() == 0 {
        return matrix::zeros(m.nrows(), 0);
    }
    m.clone().qr().q()
}

fn invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    // well away from singular so the structure, not conditioning, drives verdicts
    gaussian(rng, n, n) + identity(n) * c(2.0 * (n as f64).sqrt(), 0.0)
}

/// Ranges with `dim(ℛ(A) ∩ ℛ(B)) = int` and `ℛ(A) + ℛ(B) = ℂⁿ`. The parts
/// outside the intersection are tilted so the ranges are not orthogonal
/// complements of each other inside the sum.
fn range_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, ra: usize, rb: usize, int: usize) -> (Matrix, Matrix) {
    let q = unitary(rng, n);
    let s = columns(&q, 0, int);
    let ea = columns(&q, int, ra);
    let eb = columns(&q, ra, n);
    let tilt = &ea * gaussian(rng, ra - int, rb - int);
    let eb = eb + tilt;
    (orth(&hstack(n, &[&s, &ea])), orth(&hstack(n, &[&s, &eb])))
}

fn consistent_ranks<R: Rng + ?Sized>(rng: &mut R, n: usize, p: usize) -> (usize, usize, usize) {
    let rb = rng.gen_range(0..=n.min(p));
    let ra = rng.gen_range(n - rb..=n);
    (ra, rb, ra + rb - n)
}

fn rank_structured_parts<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: usize,
    (ra, rb, int): (usize, usize, usize),
) -> (Matrix, Matrix) {
    let (qa, qb) = range_pair(rng, n, ra, rb, int);
    let a = &qa * gaussian(rng, ra, n);
    let b = &qb * gaussian(rng, rb, p);
    (a, b)
}

/// Deterministic instance for `spec`; Hamiltonian specs give `D = −Aᴴ`.
pub fn generate(spec: &GeneratorSpec, tol: &ToleranceConfig) -> Result<Instance> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let (n, p) = (spec.n, spec.p);
    match spec.kind {
        GeneratorKind::Dense => Instance::new(
            gaussian(&mut rng, n, n),
            gaussian(&mut rng, n, p),
            gaussian(&mut rng, p, n),
            gaussian(&mut rng, p, p),
            *tol,
        ),
        GeneratorKind::RankStructured => {
            let ranks = spec.ranks().expect("validated");
            let (a, b) = rank_structured_parts(&mut rng, n, p, ranks);
            Instance::new(a, b, gaussian(&mut rng, p, n), gaussian(&mut rng, p, p), *tol)
        }
        GeneratorKind::Hamiltonian => Ok(generate_hamiltonian(spec, tol)?.to_instance()),
        GeneratorKind::Special => Ok(generate_special(spec, tol)?.0),
        GeneratorKind::SingularPlanted => plant(spec, &mut rng, tol),
    }
}

/// Hamiltonian instance with Hermitian `B = Q_B Λ Q_Bᴴ` and Hermitian `C`.
pub fn generate_hamiltonian(spec: &GeneratorSpec, tol: &ToleranceConfig) -> Result<HamiltonianInstance> {
    let spec = GeneratorSpec {
        kind: GeneratorKind::Hamiltonian,
        ..*spec
    };
    spec.validate()?;
    let n = spec.n;
    let mut rng = rng_from_seed(spec.seed);
    let ranks = match spec.ranks() {
        Some(r) => r,
        None => consistent_ranks(&mut rng, n, n),
    };
    let (ra, rb, int) = ranks;
    let (qa, qb) = range_pair(&mut rng, n, ra, rb, int);
    let a = &qa * gaussian(&mut rng, ra, n);
    let lambda: Vec<f64> = (0..rb)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            x.signum() * (0.5 + x.abs())
        })
        .collect();
    let b = &qb * matrix::diag_real(&lambda) * qb.adjoint();
    let cm = hermitian(&mut rng, n);
    HamiltonianInstance::symmetrized(a, b, cm, *tol)
}

/// Instance in the disjoint-range configuration with its splitting `(X′, X″)`.
pub fn generate_special(spec: &GeneratorSpec, tol: &ToleranceConfig) -> Result<(Instance, Subspace, Subspace)> {
    let spec = GeneratorSpec {
        kind: GeneratorKind::Special,
        ..*spec
    };
    spec.validate()?;
    let n = spec.n;
    let (np, _) = spec.special_split();
    let mut rng = rng_from_seed(spec.seed);
    let q = unitary(&mut rng, n);
    let xp = columns(&q, 0, np);
    let xpp = columns(&q, np, n);
    let a = &xp * invertible(&mut rng, np) * xp.adjoint();
    let b = &xpp * invertible(&mut rng, n - np) * xpp.adjoint();
    let inst = Instance::new(a, b, gaussian(&mut rng, n, n), gaussian(&mut rng, n, n), *tol)?;
    Ok((
        inst,
        Subspace::from_orthonormal(xp)?,
        Subspace::from_orthonormal(xpp)?,
    ))
}

/// Ways to make `M` singular, one per condition of the certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PlantMode {
    /// Project `(A B)` off a random direction.
    RowDrop,
    /// Kill `D` on a vector of `𝒩(B)`.
    RestrictionDefect,
    /// Subtract the smallest singular triple of the reduced operator from `C`.
    ReducedZero,
}

fn plant_once<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: usize,
    ranks: (usize, usize, usize),
    tol: &ToleranceConfig,
) -> Result<Instance> {
    let (mut a, mut b) = rank_structured_parts(rng, n, p, ranks);
    let mut cm = gaussian(rng, p, n);
    let mut d = gaussian(rng, p, p);
    let kernel_b_dim = p - ranks.1;

    // weights favour the reduced operator, the only mode with real structure
    let mode = match rng.gen_range(0..6) {
        0 => PlantMode::RowDrop,
        1 if kernel_b_dim > 0 => PlantMode::RestrictionDefect,
        _ => PlantMode::ReducedZero,
    };
    match mode {
        PlantMode::RowDrop => {
            let z = orth(&gaussian(rng, n, 1));
            let proj = identity(n) - &z * z.adjoint();
            a = &proj * a;
            b = &proj * b;
        }
        PlantMode::RestrictionDefect => {
            let inst = Instance::new(a.clone(), b.clone(), cm.clone(), d.clone(), *tol)?;
            let red = reduce(&inst)?;
            let y1 = red.dec.y1.basis();
            let x = orth(&(y1 * gaussian(rng, y1.ncols(), 1)));
            d = &d - &d * &x * x.adjoint();
        }
        PlantMode::ReducedZero => {
            let inst = Instance::new(a.clone(), b.clone(), cm.clone(), d.clone(), *tol)?;
            let red = reduce(&inst)?;
            let qpk = red.transfer.domain.basis();
            let qw = red.w.basis();
            if qw.ncols() != qpk.ncols() || qpk.ncols() == 0 {
                return Err(Error::SpecInconsistent(
                    "reduced operator is empty or not square".into(),
                ));
            }
            let c2 = qw.adjoint() * &cm * qpk;
            let d2 = qw.adjoint() * &d * red.dec.y2.basis();
            let r = c2 - d2 * &red.transfer.map;
            let (u, sigma, v) = matrix::thin_svd(&r);
            let k = sigma.len() - 1;
            let rank_one = columns(&u, k, k + 1) * columns(&v, k, k + 1).adjoint() * c(sigma[k], 0.0);
            cm = &cm - qw * rank_one * qpk.adjoint();
        }
    }
    Instance::new(a, b, cm, d, *tol)
}

fn plant<R: Rng + ?Sized>(spec: &GeneratorSpec, rng: &mut R, tol: &ToleranceConfig) -> Result<Instance> {
    let (n, p) = (spec.n, spec.p);
    for _ in 0..PLANT_ATTEMPTS {
        let ranks = match spec.ranks() {
            Some(r) => r,
            None => consistent_ranks(rng, n, p),
        };
        let Ok(inst) = plant_once(rng, n, p, ranks, tol) else {
            continue;
        };
        let oracle = oracle_invertible(&inst.assemble(), tol)?;
        if oracle.sigma_min.is_some_and(|s| s <= PLANT_MARGIN * oracle.tau) {
            return Ok(inst);
        }
    }
    Err(Error::SpecInconsistent(format!(
        "no oracle-singular plant found in {PLANT_ATTEMPTS} attempts (n={n}, p={p})"
    )))
}

/// Subtracts the smallest-magnitude eigenpair of the (Hermitian) reduced
/// operator from `C`, keeping `C` Hermitian.
pub fn plant_singular_hamiltonian(inst: &HamiltonianInstance) -> Result<HamiltonianInstance> {
    let general = inst.to_instance();
    let red = reduce(&general)?;
    let k = red.dec.kernel_pa.basis();
    if k.ncols() == 0 {
        return Err(Error::PreconditionViolated(
            "projected kernel is trivial; nothing to plant".into(),
        ));
    }
    let qpk = red.transfer.domain.basis();
    // express both sides in the kernel_pa basis so the operator is Hermitian
    let g = qpk.adjoint() * k;
    let c2 = k.adjoint() * inst.c() * qpk;
    let d2 = k.adjoint() * general.d() * red.dec.y2.basis();
    let r = (c2 - d2 * &red.transfer.map) * g;
    let r = (&r + r.adjoint()) * c(0.5, 0.0);
    let (values, vectors) = matrix::hermitian_eigen(&r);
    let (j, lambda) = values
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .expect("nonempty");
    let u = columns(&vectors, j, j + 1);
    let shift = k * (&u * u.adjoint()) * k.adjoint() * c(lambda, 0.0);
    HamiltonianInstance::symmetrized(
        inst.a().clone(),
        inst.b().clone(),
        inst.c() - shift,
        *inst.tol(),
    )
}

/// Random spec of `kind` with `1 ≤ n, p ≤ max_dim` (`p = n` where required).
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, kind: GeneratorKind, max_dim: usize) -> GeneratorSpec {
    let max_dim = max_dim.max(1);
    let n = rng.gen_range(1..=max_dim);
    let p = match kind {
        GeneratorKind::Hamiltonian | GeneratorKind::Special => n,
        _ => rng.gen_range(1..=max_dim),
    };
    let seed = rng.gen();
    let spec = GeneratorSpec::new(kind, n, p, seed);
    match kind {
        GeneratorKind::RankStructured => {
            let (ra, rb, int) = consistent_ranks(rng, n, p);
            spec.with_ranks(ra, rb, int)
        }
        GeneratorKind::Special => {
            let np = rng.gen_range(0..=n);
            GeneratorSpec {
                rank_a: Some(np),
                rank_b: Some(n - np),
                ..spec
            }
        }
        _ => spec,
    }
}

/// Smallest singular value of `(A B)` relative to its largest.
pub fn row_conditioning(inst: &Instance) -> f64 {
    let s = singular_values(&inst.row());
    match (s.first(), s.get(inst.n().saturating_sub(1))) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}
