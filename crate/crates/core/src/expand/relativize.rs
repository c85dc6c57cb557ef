use super::ExpansionReport;
use crate::algebra::{rat, Rational};
use crate::logic::{fresh_name, prenex_parts, Formula, Quant, Rel, Sort, Term};
use num_traits::Signed;
use std::collections::BTreeSet;

/// Membership in the power-series ring: `X * t * t < 1`.
pub fn s_bar(t: Term) -> Formula {
    Formula::atom(Term::mul(Term::mul(Term::X, t.clone()), t), Rel::Lt, Term::int(1))
}

/// Turns every `S`-sorted quantifier into an `L`-sorted one guarded by
/// [`s_bar`].
pub fn relativize(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(relativize(a)),
        Formula::And(a, b) => Formula::and(relativize(a), relativize(b)),
        Formula::Or(a, b) => Formula::or(relativize(a), relativize(b)),
        Formula::Implies(a, b) => Formula::implies(relativize(a), relativize(b)),
        Formula::Iff(a, b) => Formula::iff(relativize(a), relativize(b)),
        Formula::Forall(v, s, b) => {
            let body = relativize(b);
            let body = match s {
                Sort::S => Formula::implies(s_bar(Term::var(v)), body),
                Sort::L => body,
            };
            Formula::forall(v, Sort::L, body)
        }
        Formula::Exists(v, s, b) => {
            let body = relativize(b);
            let body = match s {
                Sort::S => Formula::and(s_bar(Term::var(v)), body),
                Sort::L => body,
            };
            Formula::exists(v, Sort::L, body)
        }
    }
}

/// Which verdict a bounded relativization can certify.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Existential witnesses come from a bounded part of the ring and
    /// universal ranges cover all of it, so truth carries over.
    Valid,
    /// The dual guards, so falsity carries over.
    Invalid,
}

/// How the bounded guard inside the ring grows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Growth {
    /// `|x| <= h`.
    Constant,
    /// `|x| <= h*(1 + y1*y1 + ...)` over the `S` variables quantified
    /// before `x`.
    Polynomial,
}

/// Relativizes every `S` quantifier of the prenex form to one side of the
/// power-series ring.
///
/// Existential quantifiers get a bounded guard inside the ring on
/// [`Side::Valid`] and the outer guard [`s_bar`] on [`Side::Invalid`];
/// universal ones get the opposite. A bounded guard stays inside the ring
/// whenever the variables it mentions do.
pub fn relativize_bounded(f: &Formula, side: Side, growth: Growth, h: &Rational) -> Formula {
    let (prefix, matrix) = prenex_parts(f);
    let mut outer: Vec<&str> = Vec::new();
    let mut guards = Vec::with_capacity(prefix.len());
    for (q, v, s) in &prefix {
        guards.push(match s {
            Sort::L => None,
            Sort::S if (*q == Quant::Exists) == (side == Side::Valid) => Some(ring_bound(v, &outer, growth, h)),
            Sort::S => Some(s_bar(Term::var(v))),
        });
        if *s == Sort::S {
            outer.push(v);
        }
    }
    prefix.iter().zip(guards).rev().fold(matrix, |body, ((q, v, _), g)| {
        let (hoisted, body) = hoist_hypotheses(body, v);
        let body = match (g, q) {
            (None, _) => body,
            (Some(g), Quant::Exists) => Formula::and(g, body),
            (Some(g), Quant::Forall) => Formula::implies(g, body),
        };
        let body = Formula::quant(*q, v, Sort::L, body);
        match hoisted {
            Some(h) => Formula::implies(h, body),
            None => body,
        }
    })
}

/// Splits off antecedent conjuncts that do not mention `v`. Both guards hold
/// at `v = 0`, so the hypotheses commute with the guarded quantifier.
fn hoist_hypotheses(body: Formula, v: &str) -> (Option<Formula>, Formula) {
    let Formula::Implies(hyp, rest) = body else {
        return (None, body);
    };
    let mut parts = Vec::new();
    flatten_and(*hyp, &mut parts);
    let (out, keep): (Vec<Formula>, Vec<Formula>) = parts.into_iter().partition(|p| !p.free_vars().contains(v));
    if out.is_empty() {
        return (None, Formula::implies(Formula::and_all(keep), *rest));
    }
    let inner = if keep.is_empty() {
        *rest
    } else {
        Formula::implies(Formula::and_all(keep), *rest)
    };
    (Some(Formula::and_all(out)), inner)
}

fn flatten_and(f: Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten_and(*a, out);
            flatten_and(*b, out);
        }
        f => out.push(f),
    }
}

fn ring_bound(v: &str, outer: &[&str], growth: Growth, h: &Rational) -> Formula {
    let vars = if growth == Growth::Constant { &[][..] } else { outer };
    let size = vars
        .iter()
        .fold(Term::int(1), |acc, y| Term::add(acc, Term::mul(Term::var(y), Term::var(y))));
    let b = Term::mul(Term::Rat(h.clone()), size);
    Formula::and(
        Formula::atom(Term::neg(b.clone()), Rel::Le, Term::var(v)),
        Formula::atom(Term::var(v), Rel::Le, b),
    )
}

/// `10*(1 + sum(|p| + |q|))` over the rational constants `p/q` of a formula.
pub fn constant_height(f: &Formula) -> Rational {
    fn walk(t: &Term, acc: &mut Rational) {
        match t {
            Term::Rat(q) => *acc += Rational::from(q.numer().abs() + q.denom().abs()),
            Term::Var(_) | Term::X | Term::Stream(_) => {}
            Term::Neg(a) | Term::Hd(a) | Term::Tl(a) => walk(a, acc),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Cons(a, b) => {
                walk(a, acc);
                walk(b, acc);
            }
        }
    }
    let mut acc = rat(1);
    f.visit(&mut |g| {
        if let Formula::Atom(a) = g {
            walk(&a.lhs, &mut acc);
            walk(&a.rhs, &mut acc);
        }
    });
    acc * rat(10)
}

/// Rewrites `s divides t` as `exists h:S. t = s*h`.
pub fn expand_divides(f: &Formula) -> Formula {
    expand_divides_with(f, &mut ExpansionReport::default())
}

pub(crate) fn expand_divides_with(f: &Formula, report: &mut ExpansionReport) -> Formula {
    let mut avoid = f.all_names();
    walk(f, false, &mut avoid, report)
}

fn walk(f: &Formula, in_l: bool, avoid: &mut BTreeSet<String>, report: &mut ExpansionReport) -> Formula {
    let mut go = |g: &Formula, in_l: bool| walk(g, in_l, avoid, report);
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) if a.rel == Rel::Divides => {
            let h = fresh_name("h", avoid);
            avoid.insert(h.clone());
            report.rule("divides");
            if in_l {
                report.rule("divides-under-L");
            }
            report.introduced_vars.push(h.clone());
            let body = Formula::eq(a.rhs.clone(), Term::mul(a.lhs.clone(), Term::var(&h)));
            Formula::exists(&h, Sort::S, body)
        }
        Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(go(a, in_l)),
        Formula::And(a, b) => {
            let x = go(a, in_l);
            Formula::and(x, go(b, in_l))
        }
        Formula::Or(a, b) => {
            let x = go(a, in_l);
            Formula::or(x, go(b, in_l))
        }
        Formula::Implies(a, b) => {
            let x = go(a, in_l);
            Formula::implies(x, go(b, in_l))
        }
        Formula::Iff(a, b) => {
            let x = go(a, in_l);
            Formula::iff(x, go(b, in_l))
        }
        Formula::Forall(v, s, b) | Formula::Exists(v, s, b) => {
            let q = f.as_quant().unwrap().0;
            Formula::quant(q, v, *s, go(b, in_l || *s == Sort::L))
        }
    }
}
