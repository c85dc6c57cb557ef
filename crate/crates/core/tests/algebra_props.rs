use proptest::prelude::*;
use std::collections::{BTreeSet, HashMap};
use stream_logic::algebra::{
    count_roots_bisection, isolate_roots, rat, ratio, sign_at_root, sturm_count, Monomial, MultiPoly, Rational, Sign,
    UniPoly, Var,
};

fn small_rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn multipoly() -> impl Strategy<Value = MultiPoly> {
    let term = (small_rat(), 0u32..=2, 0u32..=2, 0u32..=1);
    prop::collection::vec(term, 0..5).prop_map(|ts| {
        MultiPoly::from_terms(ts.into_iter().map(|(c, a, b, e)| {
            let m = Monomial::from_pairs(vec![(Var(1), a), (Var(2), b), (Var(3), e)]);
            (m, c)
        }))
    })
}

fn point() -> impl Strategy<Value = HashMap<Var, Rational>> {
    (small_rat(), small_rat(), small_rat())
        .prop_map(|(a, b, c)| [(Var(1), a), (Var(2), b), (Var(3), c)].into_iter().collect())
}

/// Distinct rational roots with denominators dividing 4, and a factor
/// `x^2 + c` without real roots.
fn known_roots() -> impl Strategy<Value = (BTreeSet<Rational>, UniPoly)> {
    (prop::collection::btree_set(-16i64..=16, 0..5), 0i64..=3).prop_map(|(quarters, c)| {
        let roots: BTreeSet<Rational> = quarters.into_iter().map(|q| ratio(q, 4)).collect();
        let mut p = roots
            .iter()
            .fold(UniPoly::one(), |acc, r| &acc * &UniPoly::from_coeffs(vec![-r.clone(), rat(1)]));
        if c > 0 {
            p = &p * &UniPoly::from_ints(&[c, 0, 1]);
        }
        (roots, p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(p in multipoly(), q in multipoly(), r in multipoly()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&p - &p, MultiPoly::zero());
        prop_assert_eq!(&p * &MultiPoly::one(), p.clone());
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in multipoly(), q in multipoly(), at in point()) {
        let (ep, eq) = (p.eval(&at).unwrap(), q.eval(&at).unwrap());
        prop_assert_eq!((&p * &q).eval(&at).unwrap(), &ep * &eq);
        prop_assert_eq!((&p + &q).eval(&at).unwrap(), &ep + &eq);
        prop_assert_eq!(p.eval_sign(&at).unwrap(), Sign::of(&ep));
    }

    #[test]
    fn pseudo_division_identity(p in multipoly(), d in multipoly()) {
        let v = Var(1);
        prop_assume!(d.degree_in(v) > 0);
        let (q, r, m) = p.pseudo_division(&d, v).unwrap();
        prop_assert_eq!(&m * &p, &(&q * &d) + &r);
        prop_assert!(r.is_zero() || r.degree_in(v) < d.degree_in(v));
    }

    #[test]
    fn sturm_counts_known_roots((roots, p) in known_roots(), a in -20i64..=20, w in 1i64..=40) {
        // endpoints on the eighth grid never hit a quarter root exactly
        let (lo, hi) = (ratio(8 * a + 1, 8), ratio(8 * (a + w) + 1, 8));
        let want = roots.iter().filter(|r| &lo < *r && *r < &hi).count();
        prop_assert_eq!(sturm_count(&p, &lo, &hi).unwrap(), want);
        prop_assert_eq!(count_roots_bisection(&p, &lo, &hi, &ratio(1, 16)), want);
    }

    #[test]
    fn isolation_finds_each_root_once((roots, p) in known_roots()) {
        let ivs = isolate_roots(&p);
        prop_assert_eq!(ivs.len(), roots.len());
        for (iv, r) in ivs.iter().zip(&roots) {
            prop_assert!(&iv.lo <= r && r <= &iv.hi);
            let linear = UniPoly::from_coeffs(vec![-r.clone(), rat(1)]);
            prop_assert_eq!(sign_at_root(&p.square_free(), iv, &linear), Sign::Zero);
        }
    }

    #[test]
    fn univariate_division(p in prop::collection::vec(-5i64..=5, 0..6), d in prop::collection::vec(-5i64..=5, 1..4)) {
        let (p, d) = (UniPoly::from_ints(&p), UniPoly::from_ints(&d));
        prop_assume!(!d.is_zero());
        let (q, r) = p.div_rem(&d);
        prop_assert_eq!(&(&q * &d) + &r, p);
        prop_assert!(r.is_zero() || r.degree() < d.degree());
    }
}
