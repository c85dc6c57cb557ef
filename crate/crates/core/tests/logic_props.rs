use proptest::prelude::*;
use proptest::strategy::Union;
use stream_logic::algebra::ratio;
use stream_logic::logic::{desugar_iff, parse, prenex, Formula, Quant, Rel, Sort, Term};
use stream_logic::streams::parse_stream;

const VARS: [&str; 4] = ["x", "y", "z", "w"];
const STREAMS: [&str; 4] = ["1/(1-X)", "X/(1-X-X^2)", "1/(1-X)^2", "(1+X)/(2-X)"];

fn leaf_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(&VARS[..]).prop_map(Term::var),
        (0i64..=20, 1i64..=5).prop_map(|(n, d)| Term::Rat(ratio(n, d))),
        Just(Term::X),
        prop::sample::select(&STREAMS[..]).prop_map(|s| Term::Stream(parse_stream(s).unwrap())),
    ]
}

fn term() -> impl Strategy<Value = Term> {
    leaf_term().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(a, b)),
            inner.clone().prop_map(Term::neg),
            inner.clone().prop_map(Term::hd),
            inner.clone().prop_map(Term::tl),
            (inner.clone(), inner).prop_map(|(a, b)| Term::cons(a, b)),
        ]
    })
}

fn atom() -> impl Strategy<Value = Formula> {
    let rel = prop::sample::select(&[Rel::Eq, Rel::Le, Rel::Lt, Rel::Divides][..]);
    prop_oneof![
        8 => (term(), rel, term()).prop_map(|(a, r, b)| Formula::atom(a, r, b)),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ]
}

/// Formulas of nesting depth at most 6.
fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(6, 24, 2, |inner| {
        let sort = prop::sample::select(&[Sort::S, Sort::L][..]);
        let q = prop::sample::select(&[Quant::Forall, Quant::Exists][..]);
        Union::new(vec![
            inner.clone().prop_map(Formula::not).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)).boxed(),
            (q, prop::sample::select(&VARS[..]), sort, inner)
                .prop_map(|(q, v, s, b)| Formula::quant(q, v, s, b))
                .boxed(),
        ])
    })
}

fn depth(f: &Formula) -> usize {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => 0,
        Formula::Not(a) | Formula::Forall(_, _, a) | Formula::Exists(_, _, a) => 1 + depth(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            1 + depth(a).max(depth(b))
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_alpha_equivalent(f in formula()) {
        prop_assert!(depth(&f) <= 6);
        let text = f.to_string();
        let g = parse(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert!(g.alpha_eq(&f), "{}", text);
        prop_assert_eq!(parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn substituting_a_variable_for_itself_changes_nothing(f in formula(), v in prop::sample::select(&VARS[..])) {
        prop_assert_eq!(f.substitute(v, &Term::var(v)), f);
    }

    #[test]
    fn alpha_renaming_preserves_meaning_and_free_variables(f in formula()) {
        let g = f.alpha_rename();
        prop_assert!(g.alpha_eq(&f));
        prop_assert_eq!(g.free_vars(), f.free_vars());
    }

    #[test]
    fn prenex_form_has_the_same_free_variables_and_a_plain_matrix(f in formula()) {
        let p = prenex(&f);
        prop_assert_eq!(p.free_vars(), f.free_vars());
        let mut body = &p;
        while let Some((_, _, _, b)) = body.as_quant() {
            body = b;
        }
        prop_assert!(body.is_quantifier_free());
        let plain = desugar_iff(&f);
        prop_assert!(prenex(&plain).quantifier_count() <= plain.quantifier_count());
    }
}
