use crate::algebra::{MultiPoly, UniPoly};
use crate::logic::{Atom, Formula, Rel, Term};
use crate::qe::{poly_to_term_with, XBAR};
use num_traits::One;

/// Replaces rational-stream constants by polynomials in `X`, clearing
/// denominators atom by atom.
///
/// Equations are multiplied by the least common denominator; inequalities by
/// its square, which keeps their direction.
pub fn expand_constants(f: &Formula) -> Formula {
    f.map_atoms(&mut |a| Formula::Atom(expand_atom(a)))
}

fn expand_atom(a: &Atom) -> Atom {
    let skip = a.rel == Rel::Divides
        || a.lhs.has_stream_ops()
        || a.rhs.has_stream_ops()
        || !(a.lhs.has_stream_const() || a.rhs.has_stream_const());
    if skip {
        return a.clone();
    }
    let (ln, ld) = fraction(&a.lhs);
    let (rn, rd) = fraction(&a.rhs);
    let (l, ml, mr) = common(&ld, &rd);
    let (lhs, rhs) = match a.rel {
        Rel::Eq => (scale(ln, &ml), scale(rn, &mr)),
        _ => (scale(ln, &(&ml * &l)), scale(rn, &(&mr * &l))),
    };
    Atom { lhs, rel: a.rel, rhs }
}

/// Least common multiple of `a` and `b` with the cofactors `l/a`, `l/b`.
fn common(a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
    let g = a.gcd(b);
    let (ca, _) = b.div_rem(&g);
    let l = a * &ca;
    let (cb, _) = l.div_rem(b);
    (l, ca, cb)
}

/// `t` as numerator term over a denominator in `X`.
fn fraction(t: &Term) -> (Term, UniPoly) {
    match t {
        Term::Stream(s) => (poly_term(s.num()), s.den().clone()),
        Term::Add(a, b) | Term::Sub(a, b) => {
            let ((an, ad), (bn, bd)) = (fraction(a), fraction(b));
            let (l, ma, mb) = common(&ad, &bd);
            let (x, y) = (scale(an, &ma), scale(bn, &mb));
            let n = match t {
                Term::Add(..) => Term::add(x, y),
                _ => Term::sub(x, y),
            };
            (n, l)
        }
        Term::Mul(a, b) => {
            let ((an, ad), (bn, bd)) = (fraction(a), fraction(b));
            (product(an, bn), &ad * &bd)
        }
        Term::Neg(a) => {
            let (n, d) = fraction(a);
            (Term::neg(n), d)
        }
        _ => (t.clone(), UniPoly::one()),
    }
}

fn scale(t: Term, u: &UniPoly) -> Term {
    if u.is_constant() {
        let c = u.coeff(0);
        if c.is_one() {
            return t;
        }
        return product(Term::Rat(c), t);
    }
    product(poly_term(u), t)
}

fn product(a: Term, b: Term) -> Term {
    match (&a, &b) {
        (Term::Rat(c), _) if c.is_one() => b,
        (_, Term::Rat(c)) if c.is_one() => a,
        _ => Term::mul(a, b),
    }
}

pub(crate) fn poly_term(u: &UniPoly) -> Term {
    poly_to_term_with(&MultiPoly::from_unipoly(u, XBAR), &|_| Term::X)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;
    use crate::qe::evaluate_qf;

    #[test]
    fn clears_a_geometric_denominator() {
        let f = parse("y = [[1/(1-X)]] * z").unwrap();
        let g = expand_constants(&f);
        assert!(!g.any_term(&|t| t.has_stream_const()));
        assert_eq!(g.to_string(), "(-X + 1)*y = z");
    }

    #[test]
    fn constant_free_is_unchanged() {
        let f = parse(r"forall x. x*x >= 0 /\ X < 1").unwrap();
        assert_eq!(expand_constants(&f), f);
    }

    #[test]
    fn ground_atoms_keep_their_truth() {
        for (s, v) in [
            ("[[X/1]] = X", true),
            ("[[1/(1-X)]] > 1", true),
            ("[[1/(1-X)]] < 1", false),
            ("[[-1/(1-X)]] < [[1/(1+X)]]", true),
            ("[[X/(1-X-X^2)]] - X = [[X^2/(1-X-X^2)]]", false),
            ("[[X/(1-X-X^2)]] * (1 - X - X^2) = X", true),
        ] {
            assert_eq!(evaluate_qf(&expand_constants(&parse(s).unwrap())), Ok(v), "{s}");
        }
    }
}
