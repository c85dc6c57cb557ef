//! Removal of `hd`, `tl` and `cons`.
//!
//! Terms are first normalized to polynomials whose indeterminates are `X`,
//! variables, stream constants, heads `hd(tl^j v)` and tails `tl^k v`. A tail
//! unfolds to `(v - sum_{m<k} X^m hd(tl^m v)) / X^k`, so after clearing powers
//! of `X` only heads remain. Heads are real numbers, which the field language
//! cannot quantify over; they are removed by affine equations known in scope
//! (conjuncts and antecedents), and a remaining affine head constraint
//! `a = 0` on `hd(M)` becomes `exists z:S. X^J M = X^(J+1) z`.

use super::ExpansionReport;
use crate::algebra::{Monomial, MultiPoly, Rational, Var};
use crate::error::{Error, Result};
use crate::logic::{fresh_name, Atom, Formula, Rel, Sort, Term};
use crate::qe::{poly_to_term_with, XBAR};
use crate::streams::LaurentRational;
use num_traits::One;
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Leaf {
    X,
    Var(String),
    Head(String, u32),
    Tail(String, u32),
    Const(LaurentRational),
}

struct Expander {
    leaves: Vec<Leaf>,
    index: HashMap<Leaf, Var>,
    avoid: BTreeSet<String>,
    report: ExpansionReport,
}

/// Affine equations among heads, solved for one pivot head each.
#[derive(Clone, Default)]
struct Facts {
    rows: Vec<(Var, MultiPoly)>,
}

impl Facts {
    fn apply(&self, p: &MultiPoly) -> MultiPoly {
        self.rows.iter().fold(p.clone(), |acc, (v, e)| acc.substitute(*v, e))
    }

    /// Adds `p = 0`; nonlinear or inconsistent equations are ignored.
    fn add(&mut self, p: &MultiPoly) {
        let p = self.apply(p);
        if p.total_degree() != 1 {
            return;
        }
        let pivot = *p.vars().iter().next_back().expect("linear");
        let u = p.to_univariate(pivot);
        let Some(c) = u[1].as_constant() else { return };
        let e = u[0].scale(&(-Rational::one() / c));
        for (_, row) in &mut self.rows {
            *row = row.substitute(pivot, &e);
        }
        self.rows.push((pivot, e));
    }
}

/// Removes `hd`, `tl` and `cons`, leaving stream constants in place.
pub fn eliminate_hd_tl(f: &Formula) -> Result<(Formula, ExpansionReport)> {
    let mut ex = Expander {
        leaves: vec![Leaf::X],
        index: HashMap::from([(Leaf::X, XBAR)]),
        avoid: f.all_names(),
        report: ExpansionReport::default(),
    };
    let g = ex.walk(f, &Facts::default())?;
    Ok((g, ex.report))
}

/// The bisimulation condition for a relation `b` on the free variables `x`
/// and `y`, with `hd` and `tl` already eliminated.
pub fn bisim_formula(b: &Formula) -> Result<Formula> {
    let (x, y) = (Term::var("x"), Term::var("y"));
    let step = b.substitute("x", &Term::tl(x.clone())).substitute("y", &Term::tl(y.clone()));
    let body = Formula::implies(b.clone(), Formula::and(Formula::eq(Term::hd(x), Term::hd(y)), step));
    let f = Formula::forall("x", Sort::S, Formula::forall("y", Sort::S, body));
    eliminate_hd_tl(&f).map(|(g, _)| g)
}

impl Expander {
    fn leaf(&mut self, l: Leaf) -> MultiPoly {
        if let Leaf::Const(s) = &l {
            if let Some(c) = s.as_rational() {
                return MultiPoly::constant(c);
            }
        }
        let next = Var(self.leaves.len() as u32);
        let v = *self.index.entry(l.clone()).or_insert(next);
        if v == next {
            self.leaves.push(l);
        }
        MultiPoly::var(v)
    }

    fn kind(&self, v: Var) -> &Leaf {
        &self.leaves[v.0 as usize]
    }

    fn leaf_term(&self, v: Var) -> Term {
        match self.kind(v) {
            Leaf::X => Term::X,
            Leaf::Var(n) => Term::var(n),
            Leaf::Const(s) => Term::Stream(s.clone()),
            Leaf::Head(n, j) => Term::hd(tails(Term::var(n), *j)),
            Leaf::Tail(n, k) => tails(Term::var(n), *k),
        }
    }

    fn to_term(&self, p: &MultiPoly) -> Term {
        poly_to_term_with(p, &|v| self.leaf_term(v))
    }

    fn norm(&mut self, t: &Term) -> Result<MultiPoly> {
        Ok(match t {
            Term::Var(v) => self.leaf(Leaf::Var(v.clone())),
            Term::Rat(c) => MultiPoly::constant(c.clone()),
            Term::X => MultiPoly::var(XBAR),
            Term::Stream(s) => self.leaf(Leaf::Const(s.clone())),
            Term::Add(a, b) => &self.norm(a)? + &self.norm(b)?,
            Term::Sub(a, b) => &self.norm(a)? - &self.norm(b)?,
            Term::Mul(a, b) => &self.norm(a)? * &self.norm(b)?,
            Term::Neg(a) => -&self.norm(a)?,
            Term::Cons(r, s) => {
                self.report.rule("cons");
                &self.norm(r)? + &(&MultiPoly::var(XBAR) * &self.norm(s)?)
            }
            Term::Hd(a) => {
                self.report.rule("hd");
                let p = self.norm(a)?;
                self.head(&p)?
            }
            Term::Tl(a) => {
                self.report.rule("tl");
                let p = self.norm(a)?;
                self.tail(&p)?
            }
        })
    }

    fn map_monomials(&mut self, p: &MultiPoly, f: &mut dyn FnMut(&mut Self, &Monomial) -> Result<MultiPoly>) -> Result<MultiPoly> {
        let mut acc = MultiPoly::zero();
        for (m, c) in p.terms() {
            acc = &acc + &f(self, m)?.scale(c);
        }
        Ok(acc)
    }

    /// `hd` is a ring homomorphism to the reals.
    fn head(&mut self, p: &MultiPoly) -> Result<MultiPoly> {
        self.map_monomials(p, &mut |ex, m| {
            let mut acc = MultiPoly::one();
            for &(v, e) in m.pairs() {
                let h = ex.head_leaf(v)?;
                acc = &acc * &h.pow(e);
            }
            Ok(acc)
        })
    }

    fn head_leaf(&mut self, v: Var) -> Result<MultiPoly> {
        Ok(match self.kind(v).clone() {
            Leaf::X => MultiPoly::zero(),
            Leaf::Var(n) => self.leaf(Leaf::Head(n, 0)),
            Leaf::Head(..) => MultiPoly::var(v),
            Leaf::Tail(n, k) => self.leaf(Leaf::Head(n, k)),
            Leaf::Const(s) => MultiPoly::constant(s.hd()?),
        })
    }

    /// `tl` is linear with `tl(ab) = hd(a) tl(b) + tl(a) b`.
    fn tail(&mut self, p: &MultiPoly) -> Result<MultiPoly> {
        self.map_monomials(p, &mut |ex, m| ex.tail_monomial(m))
    }

    fn tail_monomial(&mut self, m: &Monomial) -> Result<MultiPoly> {
        let Some(&(v, e)) = m.pairs().first() else {
            return Ok(MultiPoly::zero());
        };
        let mut rest_pairs = m.pairs().to_vec();
        if e == 1 {
            rest_pairs.remove(0);
        } else {
            rest_pairs[0].1 -= 1;
        }
        let rest = Monomial::from_pairs(rest_pairs);
        let rest_poly = MultiPoly::term(Rational::one(), rest.clone());
        let h = self.head_leaf(v)?;
        let t = self.tail_leaf(v)?;
        let tr = self.tail_monomial(&rest)?;
        Ok(&(&h * &tr) + &(&t * &rest_poly))
    }

    fn tail_leaf(&mut self, v: Var) -> Result<MultiPoly> {
        Ok(match self.kind(v).clone() {
            Leaf::X => MultiPoly::one(),
            Leaf::Var(n) => self.leaf(Leaf::Tail(n, 1)),
            Leaf::Head(..) => MultiPoly::zero(),
            Leaf::Tail(n, k) => self.leaf(Leaf::Tail(n, k + 1)),
            Leaf::Const(s) => self.leaf(Leaf::Const(s.tl()?)),
        })
    }

    /// `v - sum_{m<k} X^m hd(tl^m v)`, which equals `X^k tl^k v`.
    fn unfolded(&mut self, n: &str, k: u32) -> MultiPoly {
        let mut acc = self.leaf(Leaf::Var(n.to_string()));
        for m in 0..k {
            let h = self.leaf(Leaf::Head(n.to_string(), m));
            acc = &acc - &(&MultiPoly::var(XBAR).pow(m) * &h);
        }
        acc
    }

    /// Replaces every tail by its unfolding, multiplied through by the
    /// smallest power of `X` that clears all of them.
    fn clear_tails(&mut self, p: &MultiPoly) -> MultiPoly {
        let shift = |ex: &Self, m: &Monomial| -> u32 {
            m.pairs()
                .iter()
                .map(|&(v, e)| match ex.kind(v) {
                    Leaf::Tail(_, k) => k * e,
                    _ => 0,
                })
                .sum()
        };
        let top = p.terms().map(|(m, _)| shift(self, m)).max().unwrap_or(0);
        if top == 0 {
            return p.clone();
        }
        self.report.rule("tail-unfold");
        let terms: Vec<(Monomial, Rational)> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        let mut acc = MultiPoly::zero();
        for (m, c) in terms {
            let mut t = MultiPoly::constant(c).mul_monomial(&Monomial::from_pairs(vec![(XBAR, top - shift(self, &m))]));
            for &(v, e) in m.pairs() {
                let factor = match self.kind(v).clone() {
                    Leaf::Tail(n, k) => self.unfolded(&n, k),
                    _ => MultiPoly::var(v),
                };
                t = &t * &factor.pow(e);
            }
            acc = &acc + &t;
        }
        acc
    }

    fn heads_of(&self, p: &MultiPoly) -> Vec<Var> {
        p.vars().into_iter().filter(|&v| matches!(self.kind(v), Leaf::Head(..))).collect()
    }

    fn is_affine_in_heads(&self, p: &MultiPoly) -> bool {
        p.total_degree() <= 1 && p.vars().iter().all(|&v| matches!(self.kind(v), Leaf::Head(..)))
    }

    /// The head equation implied by an atom, if it is affine.
    fn implied_fact(&mut self, a: &Atom) -> Option<MultiPoly> {
        if a.rel != Rel::Eq {
            return None;
        }
        let d = &self.norm(&a.lhs).ok()? - &self.norm(&a.rhs).ok()?;
        let h = self.head(&d).ok()?;
        self.is_affine_in_heads(&h).then_some(h)
    }

    fn facts_of(&mut self, f: &Formula, out: &mut Facts) {
        match f {
            Formula::Atom(a) => {
                if let Some(p) = self.implied_fact(a) {
                    out.add(&p);
                }
            }
            Formula::And(a, b) => {
                self.facts_of(a, out);
                self.facts_of(b, out);
            }
            _ => {}
        }
    }

    /// Processing order inside a conjunction: plain atoms, then head
    /// equations by increasing depth, then the rest.
    fn rank(&mut self, f: &Formula) -> (u8, u32) {
        let Formula::Atom(a) = f else { return (2, 0) };
        if !a.lhs.has_stream_ops() && !a.rhs.has_stream_ops() {
            return (0, 0);
        }
        if a.rel != Rel::Eq {
            return (2, 0);
        }
        let (Ok(l), Ok(r)) = (self.norm(&a.lhs), self.norm(&a.rhs)) else { return (2, 0) };
        let d = &l - &r;
        if !self.is_affine_in_heads(&d) {
            return (2, 0);
        }
        let depth = self
            .heads_of(&d)
            .iter()
            .map(|&v| match self.kind(v) {
                Leaf::Head(_, j) => *j,
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        (1, depth)
    }

    fn walk(&mut self, f: &Formula, ctx: &Facts) -> Result<Formula> {
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(a) => self.atom(a, ctx)?,
            Formula::Not(a) => Formula::not(self.walk(a, ctx)?),
            Formula::And(..) => {
                let mut items = Vec::new();
                flatten_and(f, &mut items);
                let mut order: Vec<usize> = (0..items.len()).collect();
                let ranks: Vec<_> = items.iter().map(|g| self.rank(g)).collect();
                order.sort_by_key(|&i| ranks[i]);
                let mut local = ctx.clone();
                let mut out: Vec<Option<Formula>> = vec![None; items.len()];
                for i in order {
                    out[i] = Some(self.walk(items[i], &local)?);
                    self.facts_of(items[i], &mut local);
                }
                Formula::and_all(out.into_iter().map(|g| g.expect("filled")))
            }
            Formula::Or(a, b) => Formula::or(self.walk(a, ctx)?, self.walk(b, ctx)?),
            Formula::Implies(a, b) => {
                let lhs = self.walk(a, ctx)?;
                let mut inner = ctx.clone();
                self.facts_of(a, &mut inner);
                Formula::implies(lhs, self.walk(b, &inner)?)
            }
            Formula::Iff(a, b) => Formula::iff(self.walk(a, ctx)?, self.walk(b, ctx)?),
            Formula::Forall(v, s, b) => Formula::forall(v, *s, self.walk(b, ctx)?),
            Formula::Exists(v, s, b) => Formula::exists(v, *s, self.walk(b, ctx)?),
        })
    }

    fn atom(&mut self, a: &Atom, ctx: &Facts) -> Result<Formula> {
        if !a.lhs.has_stream_ops() && !a.rhs.has_stream_ops() {
            return Ok(Formula::Atom(a.clone()));
        }
        if a.rel == Rel::Divides {
            return self.unsupported(&format!("{} divides {}", a.lhs, a.rhs));
        }
        let d = &self.norm(&a.lhs)? - &self.norm(&a.rhs)?;
        let p = ctx.apply(&self.clear_tails(&d));
        if self.heads_of(&p).is_empty() {
            return Ok(Formula::atom(self.to_term(&p), a.rel, Term::int(0)));
        }
        if !self.is_affine_in_heads(&p) {
            return self.unsupported(&Formula::Atom(a.clone()).to_string());
        }
        // a real affine constraint A on heads; A = hd(M) with X^J M = n
        let depth = |ex: &Self, v: Var| match ex.kind(v) {
            Leaf::Head(_, j) => *j,
            _ => 0,
        };
        let big_j = self.heads_of(&p).iter().map(|&v| depth(self, v)).max().unwrap_or(0);
        let mut n = MultiPoly::zero();
        for (m, c) in p.terms().map(|(m, c)| (m.clone(), c.clone())).collect::<Vec<_>>() {
            let piece = match m.pairs().first() {
                None => MultiPoly::var(XBAR).pow(big_j),
                Some(&(v, _)) => {
                    let Leaf::Head(name, j) = self.kind(v).clone() else { unreachable!() };
                    &MultiPoly::var(XBAR).pow(big_j - j) * &self.unfolded(&name, j)
                }
            };
            n = &n + &piece.scale(&c);
        }
        let n = ctx.apply(&n);
        if !self.heads_of(&n).is_empty() {
            return self.unsupported(&Formula::Atom(a.clone()).to_string());
        }
        self.report.rule("head-constraint");
        let z = fresh_name("z", &self.avoid);
        self.avoid.insert(z.clone());
        self.report.introduced_vars.push(z.clone());
        let nt = self.to_term(&n);
        let zero = Formula::exists(
            &z,
            Sort::S,
            Formula::eq(nt.clone(), Term::mul(Term::pow(Term::X, big_j + 1), Term::var(&z))),
        );
        let neg = Formula::atom(nt, Rel::Lt, Term::int(0));
        Ok(match a.rel {
            Rel::Eq => zero,
            Rel::Lt => Formula::and(neg, Formula::not(zero)),
            Rel::Le => Formula::or(neg, zero),
            Rel::Divides => unreachable!(),
        })
    }

    fn unsupported(&mut self, what: &str) -> Result<Formula> {
        self.report.residual_ops.push(what.to_string());
        Err(Error::UnsupportedFragment(what.to_string()))
    }
}

fn tails(t: Term, k: u32) -> Term {
    (0..k).fold(t, |acc, _| Term::tl(acc))
}

fn flatten_and<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        g => out.push(g),
    }
}
