use proptest::prelude::*;
use superquant::grassmann::{
    blade_product, complex, i_power_reduced, real, joint_derivation_kernel, parse_element, rational, star,
    Blade, Coeff, GrassmannElement, Naming, Parity, Sign,
};

fn arb_coeff() -> impl Strategy<Value = Coeff> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4)
        .prop_map(|(a, b, c, d)| complex(rational(a, b), rational(c, d)))
}

fn arb_element(k: usize, max_terms: usize) -> impl Strategy<Value = GrassmannElement> {
    let blades = 1u32 << (2 * k);
    prop::collection::vec((0..blades, arb_coeff()), 0..=max_terms).prop_map(move |terms| {
        GrassmannElement::from_terms(
            k,
            terms.into_iter().map(|(m, c)| {
                let slots: Vec<usize> = (0..2 * k).filter(|b| m & (1 << b) != 0).map(|b| b + 1).collect();
                (Blade::new(k, &slots).unwrap(), c)
            }),
        )
        .unwrap()
    })
}

fn all_blades(k: usize) -> Vec<Blade> {
    (0u32..1 << (2 * k))
        .map(|m| {
            let slots: Vec<usize> = (0..2 * k).filter(|b| m & (1 << b) != 0).map(|b| b + 1).collect();
            Blade::new(k, &slots).unwrap()
        })
        .collect()
}

fn mono(b: Blade) -> GrassmannElement {
    GrassmannElement::monomial(real(1), b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn associativity(
        (a, b, c) in (1usize..=3).prop_flat_map(|k| (arb_element(k, 6), arb_element(k, 6), arb_element(k, 6)))
    ) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn associativity_k4(a in arb_element(4, 8), b in arb_element(4, 8), c in arb_element(4, 8)) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn degree_one_squares_vanish(coeffs in prop::collection::vec(arb_coeff(), 6)) {
        let k = 3;
        let z = GrassmannElement::from_terms(
            k,
            coeffs.into_iter().enumerate().map(|(i, c)| (Blade::generator(k, i + 1).unwrap(), c)),
        ).unwrap();
        prop_assert!(z.multiply(&z).unwrap().is_zero());
    }

    #[test]
    fn derivations_square_to_zero(f in arb_element(3, 12), slot in 1usize..=6) {
        prop_assert!(f.derivation(slot).unwrap().derivation(slot).unwrap().is_zero());
    }

    #[test]
    fn derivative_has_no_top_term(f in arb_element(3, 16), slot in 1usize..=6) {
        prop_assert!(f.derivation(slot).unwrap().berezin_top() == real(0));
    }

    #[test]
    fn text_round_trip(f in (0usize..=3).prop_flat_map(|k| arb_element(k, 8)), xi in any::<bool>()) {
        let naming = if xi { Naming::XiEta } else { Naming::Zeta };
        let text = f.to_text(naming);
        prop_assert_eq!(parse_element(&text, f.pairs()).unwrap(), f);
    }
}

#[test]
fn super_commutativity_exhaustive() {
    for k in 0..=3 {
        let blades = all_blades(k);
        for &a in &blades {
            for &b in &blades {
                let ab = mono(a).multiply(&mono(b)).unwrap();
                let ba = mono(b).multiply(&mono(a)).unwrap();
                let sign = Sign::from_parity(a.degree() * b.degree() % 2 == 1);
                let expect = if sign == Sign::Minus { -ba } else { ba };
                assert_eq!(ab, expect, "k={k} a={a:?} b={b:?}");
            }
        }
    }
}

#[test]
fn star_relation_exhaustive() {
    for k in 0..=4 {
        let top = Blade::top(k).unwrap();
        for b in all_blades(k) {
            let lhs = mono(b).multiply(&star(b)).unwrap();
            let rhs = GrassmannElement::monomial(i_power_reduced(b.degree()), top);
            assert_eq!(lhs, rhs, "k={k} b={b:?}");
            // the star lands on the complementary monomial
            assert_eq!(star(b).terms().next().unwrap().0, &b.complement());
        }
    }
}

#[test]
fn berezin_kills_derivatives_exhaustive() {
    for k in 0..=3 {
        for b in all_blades(k) {
            for slot in 1..=2 * k {
                assert!(mono(b).derivation(slot).unwrap().berezin_top() == real(0));
            }
        }
    }
}

#[test]
fn joint_kernel_is_constants_up_to_k4() {
    for k in 0..=4 {
        let basis = joint_derivation_kernel(k).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0], GrassmannElement::one(k).unwrap());
    }
}

#[test]
fn blade_parity_law() {
    for k in 0..=3 {
        for a in all_blades(k) {
            for b in all_blades(k) {
                if let Some((_, c)) = blade_product(a, b).unwrap() {
                    assert_eq!(
                        Parity::of_degree(a.degree()).combine(Parity::of_degree(b.degree())),
                        Parity::of_degree(c.degree())
                    );
                }
            }
        }
    }
}
