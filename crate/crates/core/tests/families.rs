use opmat_core::certificate::{certify, delta_operator, special_certify, umv_reduce};
use opmat_core::decomposition::{block_form, decompose_row, projected_kernel, reduced_transfer};
use opmat_core::hamiltonian::{certify_hamiltonian, verify_range_identity};
use opmat_core::harness::fixtures::{f1, f1_row, f1_special, f1_split, f2, f3, f4};
use opmat_core::harness::generate::{generate, generate_special, GeneratorKind, GeneratorSpec};
use opmat_core::harness::oracle::oracle_invertible;
use opmat_core::invertibility::{is_right_invertible, schur_certify, SchurPivot};
use opmat_core::matrix::{diag_real, hstack, identity};
use opmat_core::subspace::{range_of, subspace_equals, subspace_intersect, Subspace};
use opmat_core::tolerance::{ToleranceConfig, Verdict};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn f2_determinant_is_d_minus_c1() {
    for (c1, c2, d) in [(1.0, 5.0, 1.0), (0.0, 0.0, 1.0), (-2.5, 3.0, 4.0), (1e-3, -7.0, 0.0)] {
        let inst = f2(c1, c2, d, tol());
        let det = inst.assemble().determinant();
        assert!((det.re - (d - c1)).abs() < 1e-12 && det.im.abs() < 1e-12);
        let want = if d == c1 { Verdict::Singular } else { Verdict::Invertible };
        let cert = certify(&inst);
        assert_eq!(cert.verdict, want, "({c1}, {c2}, {d})");
        assert!(cert.agreement);
        assert_eq!(cert.witness.is_some(), want == Verdict::Singular);

        let delta = delta_operator(&inst).unwrap();
        assert!((delta.matrix.determinant().norm() - (d - c1).abs()).abs() < 1e-12);
        assert!(umv_reduce(&inst).unwrap().residual < 1e-12);
    }
}

#[test]
fn f2_geometry() {
    let inst = f2(0.0, 0.0, 1.0, tol());
    let dec = decompose_row(inst.a(), inst.b(), &tol()).unwrap();
    let d = dec.dims();
    assert_eq!((d.X1, d.X2, d.X3, d.Y1, d.Y2, d.Y3), (0, 1, 1, 0, 1, 0));
    assert_eq!((d.RA_perp, d.RB_perp, d.R_int), (0, 1, 1));
    let k = projected_kernel(inst.a(), inst.b(), &tol()).unwrap();
    assert!(subspace_equals(&k, &Subspace::coordinate(2, &[0]), &tol()).unwrap().equal);
    let blocks = block_form(inst.a(), inst.b(), &dec).unwrap();
    let t = reduced_transfer(inst.a(), inst.b(), &dec, &blocks, &tol()).unwrap();
    assert_eq!(t.map.shape(), (1, 1));
    assert!((t.map[(0, 0)].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn f1_geometry_and_special_case() {
    let (a, b) = f1_row();
    let d = decompose_row(&a, &b, &tol()).unwrap().dims();
    assert_eq!((d.X1, d.X2, d.X3, d.Y1, d.Y2, d.Y3, d.R_int), (1, 0, 1, 1, 0, 1, 0));

    let (xp, xpp) = f1_split();
    for (c22, want) in [(3.0, Verdict::Invertible), (0.0, Verdict::Singular), (-1e-3, Verdict::Invertible)] {
        let inst = f1_special(7.0, 7.0, 7.0, c22, tol());
        let special = special_certify(inst.a(), inst.b(), inst.c(), inst.d(), &xp, &xpp, &tol()).unwrap();
        assert_eq!(special.verdict, want);
        assert_eq!(certify(&inst).verdict, want);
        assert_eq!(oracle_invertible(&inst.assemble(), &tol()).unwrap().verdict, want);
    }

    let inst = f1(identity(2), identity(2), tol());
    assert!(schur_certify(inst.a(), inst.b(), inst.c(), inst.d(), SchurPivot::UseA, &tol()).is_err());
}

#[test]
fn f3_follows_c22() {
    for (c22, want) in [(2.0, Verdict::Invertible), (0.0, Verdict::Singular), (-1e3, Verdict::Invertible)] {
        let h = f3(-0.4, (0.3, 0.9), c22, tol());
        let cert = certify_hamiltonian(&h);
        assert_eq!(cert.verdict, want);
        assert!(cert.agreement);
    }
    let (a, b) = f1_row();
    assert!(verify_range_identity(&a, &b, &tol()).unwrap().equal);
}

#[test]
fn f4_is_just_a() {
    assert_eq!(certify(&f4(identity(4), tol())).verdict, Verdict::Invertible);
    let cert = certify(&f4(diag_real(&[2.0, 0.0, 1.0]), tol()));
    assert_eq!(cert.verdict, Verdict::Singular);
    assert!(cert.agreement);
    let umv = umv_reduce(&f4(identity(3), tol())).unwrap();
    assert_eq!(umv.u, identity(3));
    assert_eq!(umv.v, identity(3));
    assert_eq!(delta_operator(&f4(identity(2), tol())).unwrap().matrix.shape(), (0, 0));
}

#[test]
fn generator_examples() {
    let spec = GeneratorSpec::new(GeneratorKind::RankStructured, 4, 3, 9).with_ranks(3, 2, 1);
    let inst = generate(&spec, &tol()).unwrap();
    assert!(is_right_invertible(&hstack(4, &[inst.a(), inst.b()]), &tol()));
    let int = subspace_intersect(&range_of(inst.a(), &tol()), &range_of(inst.b(), &tol()), &tol()).unwrap();
    assert_eq!(int.dim(), 1);

    let spec = GeneratorSpec {
        rank_a: Some(1),
        rank_b: Some(1),
        ..GeneratorSpec::new(GeneratorKind::Special, 2, 2, 3)
    };
    let (inst, xp, xpp) = generate_special(&spec, &tol()).unwrap();
    let cert = special_certify(inst.a(), inst.b(), inst.c(), inst.d(), &xp, &xpp, &tol()).unwrap();
    assert_eq!(cert.verdict, certify(&inst).verdict);
}

#[test]
fn intersection_matches_rank_formula() {
    let spec = GeneratorSpec::new(GeneratorKind::Dense, 6, 4, 1);
    let inst = generate(&spec, &tol()).unwrap();
    let s1 = range_of(&inst.a().columns(0, 4).into_owned(), &tol());
    // shares columns 2, 3 of A with s1; the six columns together span C⁶
    let s2 = range_of(
        &hstack(6, &[&inst.a().columns(2, 2).into_owned(), &inst.b().columns(0, 2).into_owned()]),
        &tol(),
    );
    let int = subspace_intersect(&s1, &s2, &tol()).unwrap();
    let joint = hstack(6, &[s1.basis(), s2.basis()]);
    let rank = range_of(&joint, &tol()).dim();
    assert_eq!(int.dim(), s1.dim() + s2.dim() - rank);
    assert_eq!(int.dim(), 2);
    assert_eq!(subspace_intersect(&s1, &Subspace::zero(6), &tol()).unwrap().dim(), 0);
}
