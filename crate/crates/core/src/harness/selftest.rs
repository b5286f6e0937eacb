//! Fixture families plus a short randomized pass over every module's invariants.

use serde::{Deserialize, Serialize};

use crate::certificate::{certify, delta_operator, special_certify, umv_reduce, Instance};
use crate::decomposition::{decompose_row, projected_kernel};
use crate::error::Result;
use crate::hamiltonian::{certify_hamiltonian, verify_range_identity};
use crate::harness::batch::{run_batch, BatchConfig};
use crate::harness::fixtures::{f1, f1_row, f1_special, f1_split, f2, f3, f4};
use crate::harness::generate::{gaussian, generate, rng_from_seed, GeneratorKind, GeneratorSpec};
use crate::invertibility::{
    kernel_necessity_check, left_inverse, right_inverse, row_isomorphism_check, schur_certify, SchurPivot,
};
use crate::matrix::{diag_real, identity};
use crate::subspace::{complement, range_of, subspace_equals, subspace_intersect, subspace_sum, Subspace};
use crate::tolerance::{ToleranceConfig, Verdict};

const SEED: u64 = 0x5e1f_7e57;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestCase {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SelftestReport {
    pub cases: Vec<SelftestCase>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.passed).count()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.cases {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} {:<34} {}\n", c.name, c.detail));
        }
        s.push_str(&format!(
            "{} of {} checks passed\n",
            self.cases.len() - self.failures(),
            self.cases.len()
        ));
        s
    }

    fn record(&mut self, name: &str, check: impl FnOnce() -> Result<(bool, String)>) {
        let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        self.cases.push(SelftestCase {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

fn verdict_is(inst: &Instance, want: Verdict) -> (bool, String) {
    let cert = certify(inst);
    (
        cert.verdict == want && cert.agreement,
        format!("{} ({}), oracle {}", cert.verdict, cert.reason, cert.oracle.verdict),
    )
}

fn fixtures(report: &mut SelftestReport, tol: ToleranceConfig) {
    let (a1, b1) = f1_row();

    report.record("f1 decomposition dims", || {
        decompose_row(&a1, &b1, &tol).map(|dec| {
            let d = dec.dims();
            let ok = (d.X1, d.X2, d.X3, d.Y1, d.Y2, d.Y3, d.R_int) == (1, 0, 1, 1, 0, 1, 0);
            (ok, format!("{d:?}"))
        })
    });
    report.record("f1 special case", || {
        let (xp, xpp) = f1_split();
        let mut out = Ok((true, String::new()));
        for (c22, want) in [(3.0, Verdict::Invertible), (0.0, Verdict::Singular)] {
            let inst = f1_special(7.0, 7.0, 7.0, c22, tol);
            let r = special_certify(inst.a(), inst.b(), inst.c(), inst.d(), &xp, &xpp, &tol)
                .map(|cert| cert.verdict == want && certify(&inst).verdict == want);
            match r {
                Ok(true) => {}
                Ok(false) => {
                    out = Ok((false, format!("c22 = {c22}: expected {want}")));
                    break;
                }
                Err(e) => {
                    out = Err(e);
                    break;
                }
            }
        }
        out.map(|(ok, d)| (ok, if ok { "c22 = 3 / 0".into() } else { d }))
    });
    report.record("f1 schur pivot on A", || {
        let inst = f1(identity(2), identity(2), tol);
        let r = schur_certify(inst.a(), inst.b(), inst.c(), inst.d(), SchurPivot::UseA, &tol);
        Ok((r.is_err(), "singular pivot rejected".into()))
    });

    report.record("f2 closed form", || {
        let (s, s_detail) = verdict_is(&f2(1.0, 5.0, 1.0, tol), Verdict::Singular);
        let (i, i_detail) = verdict_is(&f2(0.0, 0.0, 1.0, tol), Verdict::Invertible);
        Ok((s && i, format!("(1,5,1): {s_detail}; (0,0,1): {i_detail}")))
    });
    report.record("f2 projected kernel", || {
        let inst = f2(0.0, 0.0, 1.0, tol);
        projected_kernel(inst.a(), inst.b(), &tol).and_then(|k| {
            let cmp = subspace_equals(&k, &Subspace::coordinate(2, &[0]), &tol)?;
            Ok((cmp.equal, format!("residual {:.1e}", cmp.residual)))
        })
    });
    report.record("f2 umv and delta", || {
        let inst = f2(0.5, 2.0, 3.0, tol);
        umv_reduce(&inst).and_then(|umv| {
            let delta = delta_operator(&inst)?;
            let det = delta.matrix.determinant().norm();
            let ok = umv.residual < 1e-12 && (det - 2.5).abs() < 1e-12 && delta.verdict == Verdict::Invertible;
            Ok((ok, format!("umv {:.1e}, |det delta| {det:.6}", umv.residual)))
        })
    });
    report.record("f2 finite-dimension vacuity", || {
        let inst = f2(0.0, 0.0, 1.0, tol);
        row_isomorphism_check(inst.a(), inst.b(), &tol).map(|iso| {
            let kn = kernel_necessity_check(inst.a(), inst.b(), &tol);
            (
                !iso.is_iso && kn.m_possible && kn.row_kernel_dim == 1,
                format!("row iso {}, kernel dim {}", iso.is_iso, kn.row_kernel_dim),
            )
        })
    });

    report.record("f3 hamiltonian", || {
        let mut ok = true;
        let mut detail = Vec::new();
        for (c22, want) in [(2.0, Verdict::Invertible), (0.0, Verdict::Singular)] {
            let h = f3(0.7, (1.5, -0.25), c22, tol);
            let cert = certify_hamiltonian(&h);
            ok &= cert.verdict == want && cert.agreement && certify(&h.to_instance()).verdict == want;
            detail.push(format!("c22 = {c22}: {}", cert.verdict));
        }
        Ok((ok, detail.join("; ")))
    });
    report.record("f3 range identity", || {
        verify_range_identity(&a1, &b1, &tol).map(|cmp| (cmp.equal, format!("residual {:.1e}", cmp.residual)))
    });

    report.record("f4 trivial Y", || {
        let (i, i_detail) = verdict_is(&f4(identity(3), tol), Verdict::Invertible);
        let (s, s_detail) = verdict_is(&f4(diag_real(&[1.0, 1.0, 0.0]), tol), Verdict::Singular);
        Ok((i && s, format!("I: {i_detail}; diag(1,1,0): {s_detail}")))
    });
}

fn invariants(report: &mut SelftestReport, tol: ToleranceConfig) {
    let mut rng = rng_from_seed(SEED);

    report.record("one-sided inverses", || {
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for k in 0..40usize {
            let (r, c) = (1 + k % 5, 1 + k % 5 + k % 3);
            let wide = gaussian(&mut rng, r, c);
            let right = right_inverse(&wide, &tol)?;
            let left = left_inverse(&wide.adjoint(), &tol)?;
            worst = worst
                .max(right.residual)
                .max(right.range_check_residual)
                .max(left.residual)
                .max(left.range_check_residual);
        }
        ok &= worst <= 1e-8;
        Ok((ok, format!("worst residual {worst:.1e}")))
    });

    report.record("subspace duality", || {
        let mut worst: f64 = 0.0;
        let mut dims_ok = true;
        for k in 0..40usize {
            let n = 2 + k % 7;
            let s1 = range_of(&gaussian(&mut rng, n, k % n), &tol);
            let s2 = range_of(&gaussian(&mut rng, n, (k / 2) % n), &tol);
            let sum = subspace_sum(&s1, &s2, &tol)?;
            let int = subspace_intersect(&s1, &s2, &tol)?;
            let lhs1 = complement(&sum);
            let rhs1 = subspace_intersect(&complement(&s1), &complement(&s2), &tol)?;
            let lhs2 = complement(&int);
            let rhs2 = subspace_sum(&complement(&s1), &complement(&s2), &tol)?;
            worst = worst
                .max(subspace_equals(&lhs1, &rhs1, &tol)?.residual)
                .max(subspace_equals(&lhs2, &rhs2, &tol)?.residual);
            dims_ok &= sum.dim() + int.dim() == s1.dim() + s2.dim();
        }
        Ok((worst <= 1e-8 && dims_ok, format!("worst residual {worst:.1e}")))
    });

    report.record("generator determinism", || {
        let spec = GeneratorSpec::new(GeneratorKind::Dense, 3, 2, 7);
        Ok((generate(&spec, &tol)? == generate(&spec, &tol)?, "dense n=3 p=2 seed=7".into()))
    });

    for kind in GeneratorKind::ALL {
        let name = format!("batch {kind}");
        let out = run_batch(&BatchConfig {
            kind,
            count: 40,
            seed: SEED,
            max_dim: 6,
            tol,
        });
        let s = &out.summary;
        report.record(
            &name,
            || Ok((
                s.passed(),
                format!("{}/{} agree, {} in band", s.agreements, s.decided, s.oracle_indeterminate),
            )),
        );
    }
}

/// Runs every fixture and invariant check.
pub fn selftest(tol: ToleranceConfig) -> SelftestReport {
    let mut report = SelftestReport::default();
    fixtures(&mut report, tol);
    invariants(&mut report, tol);
    report
}
