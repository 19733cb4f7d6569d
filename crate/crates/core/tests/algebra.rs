use hv_core::algebra::{bracket, bracket_generators, jacobiator, vir_embed, Generator, LieElement};
use hv_core::rational::{int, rat, Rational, RationalSampler};
use proptest::prelude::*;

fn g(x: Generator) -> LieElement {
    x.into()
}

#[test]
fn antisymmetry_and_jacobi_on_small_indices() {
    let basis = Generator::basis(4);
    for &a in &basis {
        for &b in &basis {
            let ab = bracket_generators(a, b);
            let ba = bracket_generators(b, a);
            assert!((&ab + &ba).is_zero(), "[{a},{b}]");
            for &c in &basis {
                assert!(jacobiator(&g(a), &g(b), &g(c)).is_zero(), "{a} {b} {c}");
            }
        }
    }
}

#[test]
fn heisenberg_part_is_central_extension_only() {
    for n in -5..=5 {
        for m in -5..=5 {
            let b = bracket_generators(Generator::I(n), Generator::I(m));
            if n + m == 0 && n != 0 {
                assert_eq!(b, LieElement::term(Generator::CI, int(n)));
            } else {
                assert!(b.is_zero());
            }
        }
    }
}

#[test]
fn vir_copies_close() {
    let mut s = RationalSampler::new(11);
    for _ in 0..5 {
        let e = s.sample();
        for n in -5..=5 {
            for m in -5..=5 {
                let lhs = bracket(&vir_embed(&e, n), &vir_embed(&e, m));
                let mut rhs = vir_embed(&e, n + m).scale(&int(m - n));
                if n + m == 0 {
                    rhs = rhs + LieElement::term(Generator::CD, rat(n * n * n - n, 12));
                }
                assert_eq!(lhs, rhs, "e={e} n={n} m={m}");
            }
        }
    }
}

fn generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        (-6i64..=6).prop_map(Generator::X),
        (-6i64..=6).prop_map(Generator::I),
        Just(Generator::CD),
        Just(Generator::CDI),
        Just(Generator::CI),
    ]
}

fn element() -> impl Strategy<Value = LieElement> {
    prop::collection::vec((generator(), -5i64..=5, 1i64..=4), 0..4).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(g, p, q)| (g, rat(p, q)))
            .collect::<LieElement>()
    })
}

proptest! {
    #[test]
    fn jacobi_on_random_elements(a in element(), b in element(), c in element()) {
        prop_assert!(jacobiator(&a, &b, &c).is_zero());
    }

    #[test]
    fn bracket_is_bilinear(a in element(), b in element(), c in element(), p in -4i64..=4) {
        let k: Rational = int(p);
        let lhs = bracket(&(&a.scale(&k) + &b), &c);
        let rhs = bracket(&a, &c).scale(&k) + bracket(&b, &c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_parses_back(a in element()) {
        prop_assume!(!a.is_zero());
        let back: LieElement = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }
}
