use hv_core::classifier::matrix::{
    build_matrix_system, constant_matrix_family, satisfies_all, verify_coupling_obstruction, Fixture,
};
use hv_core::classifier::{
    build_scalar_system, check_family, eliminated_quadratic, i_torsion, quadratic_obstruction, solve_scalar,
    support_shape, FamilyKind, SupportShape,
};
use hv_core::linalg::Matrix;
use hv_core::modules::{build_window, IntermediateParams, ModuleSpec, ModuleWindow};
use hv_core::rational::{int, rat, Rational, RationalSampler};
use num_traits::{One, Zero};

fn kinds(a: &Rational, b: &Rational) -> Vec<FamilyKind> {
    solve_scalar(a, b, 6).unwrap().iter().map(|f| f.kind).collect()
}

#[test]
fn generic_parameters_give_only_the_constant_family() {
    let mut s = RationalSampler::with_bounds(5, 30, 12);
    for _ in 0..4 {
        let a = s.sample_non_integer();
        let b = s.sample_avoiding(&[int(0), rat(1, 2), int(1)]);
        let fams = solve_scalar(&a, &b, 6).unwrap();
        assert_eq!(fams.len(), 1, "alpha {a} beta {b}");
        assert_eq!(fams[0].kind, FamilyKind::Constant);
        assert!(fams[0].c_i.is_zero() && fams[0].c_di.is_zero());
    }
}

#[test]
fn boundary_beta_adds_a_rescaled_family() {
    let a = rat(2, 5);
    assert_eq!(
        kinds(&a, &int(0)),
        vec![FamilyKind::Constant, FamilyKind::RescaledBeta0]
    );
    assert_eq!(
        kinds(&a, &int(1)),
        vec![FamilyKind::Constant, FamilyKind::RescaledBeta1]
    );
}

fn family_window(a: &Rational, b: &Rational, kind: FamilyKind, f: &Rational) -> ModuleWindow {
    let fam = solve_scalar(a, b, 6)
        .unwrap()
        .into_iter()
        .find(|x| x.kind == kind)
        .unwrap();
    ModuleWindow::from_coefficients(a, b, 6, |j, n| fam.closed_form(j, n).unwrap() * f)
}

#[test]
fn rescaled_families_are_intermediate_modules_in_another_basis() {
    let (a, f) = (rat(-3, 7), rat(5, 2));
    let w0 = family_window(&a, &int(0), FamilyKind::RescaledBeta0, &f);
    let target = build_window(
        &ModuleSpec::Intermediate(IntermediateParams::new(a.clone(), int(1), f.clone())),
        6,
    )
    .unwrap();
    assert_eq!(w0.rescale(|k| (&a + int(k)).recip()), target);
    let w1 = family_window(&a, &int(1), FamilyKind::RescaledBeta1, &f);
    let target = build_window(
        &ModuleSpec::Intermediate(IntermediateParams::new(a.clone(), int(0), f.clone())),
        6,
    )
    .unwrap();
    assert_eq!(w1.rescale(|k| &a + int(k)), target);
}

#[test]
fn families_satisfy_every_relation() {
    for (a, b) in [(rat(1, 3), int(2)), (rat(1, 4), int(0)), (rat(-5, 3), int(1))] {
        let s = build_scalar_system(&a, &b, 6, false).unwrap();
        for fam in solve_scalar(&a, &b, 6).unwrap() {
            assert!(check_family(&s, &fam, &rat(7, 3)), "{a} {b} {:?}", fam.kind);
        }
    }
}

#[test]
fn eliminated_quadratic_matches_closed_form() {
    let mut s = RationalSampler::new(21);
    for _ in 0..3 {
        let (a, b) = (s.sample_non_integer(), s.sample());
        let sys = build_scalar_system(&a, &b, 6, false).unwrap();
        let n = s.sample_index(2);
        if let Some(q) = eliminated_quadratic(&sys, n) {
            assert_eq!(q, quadratic_obstruction(&a, &b, n));
        }
    }
}

#[test]
fn coupling_is_forced_to_vanish_for_extensions() {
    for a in [rat(1, 3), rat(-7, 4)] {
        for fx in [Fixture::ExtCaseA, Fixture::ExtCaseB] {
            let m = build_matrix_system(2, fx.clone(), &a, 6).unwrap();
            assert!(m.fixture_consistent());
            assert!(verify_coupling_obstruction(&m), "{fx:?} at {a}");
        }
    }
}

#[test]
fn decomposable_pair_carries_a_nilpotent_family() {
    let a = rat(2, 9);
    let m = build_matrix_system(2, Fixture::DiagonalPair(int(0), int(0)), &a, 6).unwrap();
    assert!(!verify_coupling_obstruction(&m));
    let nil = Matrix::from_rows(vec![vec![int(0), int(0)], vec![int(1), int(0)]]);
    let z = Rational::zero();
    assert!(satisfies_all(
        &m,
        |j, n| constant_matrix_family(&a, &nil, j, n),
        &z,
        &z,
        &z
    ));
    // a non-nilpotent constant matrix is not a solution
    let id = Matrix::identity(2);
    assert!(!satisfies_all(
        &m,
        |j, n| constant_matrix_family(&a, &id, j, n),
        &z,
        &z,
        &z
    ));
}

#[test]
fn intermediate_windows_are_uniformly_bounded() {
    let p = IntermediateParams::new(rat(1, 2), int(3), Rational::one());
    let w = build_window(&ModuleSpec::Intermediate(p), 6).unwrap();
    assert_eq!(support_shape(w.dims()), SupportShape::UniformlyBounded(1));
    assert!(i_torsion(&w, 2).values().all(|&d| d == 0));
}
