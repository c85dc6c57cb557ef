use crate::algebra::{rat, Monomial, MultiPoly, Rational, Sign, Var};
use crate::error::{Error, Result};
use crate::logic::{Atom, Formula, Quant, Rel, Sort, Term};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeSet, HashMap};

/// The indeterminate `X` as a polynomial variable.
pub const XBAR: Var = Var(0);

/// Relation of a polynomial atom `p ⋈ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PRel {
    Eq,
    Lt,
    Le,
}

impl PRel {
    pub fn holds(self, s: Sign) -> bool {
        match self {
            PRel::Eq => s == Sign::Zero,
            PRel::Lt => s == Sign::Neg,
            PRel::Le => s != Sign::Pos,
        }
    }
}

/// Formula over polynomial atoms `p ⋈ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PFormula {
    True,
    False,
    Atom(MultiPoly, PRel),
    Not(Box<PFormula>),
    And(Vec<PFormula>),
    Or(Vec<PFormula>),
    Exists(Var, Box<PFormula>),
    Forall(Var, Box<PFormula>),
}

/// Sign of a polynomial in `X` alone at a positive infinitesimal: the sign
/// of its lowest-degree coefficient.
pub fn infinitesimal_sign(p: &MultiPoly) -> Option<Sign> {
    if p.vars().iter().any(|&v| v != XBAR) {
        return None;
    }
    Some(
        p.terms()
            .min_by_key(|(m, _)| m.degree_in(XBAR))
            .map_or(Sign::Zero, |(_, c)| Sign::of(c)),
    )
}

impl PFormula {
    /// Canonical atom; constant atoms fold to `True`/`False`.
    pub fn atom(p: MultiPoly, rel: PRel) -> PFormula {
        if let Some(c) = p.as_constant() {
            return PFormula::of_bool(rel.holds(Sign::of(&c)));
        }
        let lc = p.leading_term().map(|(_, c)| c.clone()).expect("nonzero");
        let scale = match rel {
            PRel::Eq => Rational::one() / lc,
            _ => Rational::one() / lc.abs(),
        };
        PFormula::Atom(p.scale(&scale), rel)
    }

    pub fn of_bool(b: bool) -> PFormula {
        if b {
            PFormula::True
        } else {
            PFormula::False
        }
    }

    pub fn not(f: PFormula) -> PFormula {
        match f {
            PFormula::True => PFormula::False,
            PFormula::False => PFormula::True,
            PFormula::Not(g) => *g,
            g => PFormula::Not(Box::new(g)),
        }
    }

    pub fn and(items: impl IntoIterator<Item = PFormula>) -> PFormula {
        let mut out: Vec<PFormula> = Vec::new();
        for f in items {
            match f {
                PFormula::True => {}
                PFormula::False => return PFormula::False,
                PFormula::And(v) => {
                    for g in v {
                        if !out.contains(&g) {
                            out.push(g);
                        }
                    }
                }
                g => {
                    if !out.contains(&g) {
                        out.push(g);
                    }
                }
            }
        }
        if out.iter().any(|g| out.contains(&PFormula::not(g.clone()))) {
            return PFormula::False;
        }
        match out.len() {
            0 => PFormula::True,
            1 => out.pop().unwrap(),
            _ => PFormula::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = PFormula>) -> PFormula {
        let mut out: Vec<PFormula> = Vec::new();
        for f in items {
            match f {
                PFormula::False => {}
                PFormula::True => return PFormula::True,
                PFormula::Or(v) => {
                    for g in v {
                        if !out.contains(&g) {
                            out.push(g);
                        }
                    }
                }
                g => {
                    if !out.contains(&g) {
                        out.push(g);
                    }
                }
            }
        }
        if out.iter().any(|g| out.contains(&PFormula::not(g.clone()))) {
            return PFormula::True;
        }
        match out.len() {
            0 => PFormula::False,
            1 => out.pop().unwrap(),
            _ => PFormula::Or(out),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            PFormula::True | PFormula::False | PFormula::Atom(..) => true,
            PFormula::Not(a) => a.is_quantifier_free(),
            PFormula::And(v) | PFormula::Or(v) => v.iter().all(PFormula::is_quantifier_free),
            PFormula::Exists(..) | PFormula::Forall(..) => false,
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    fn vars_into(&self, out: &mut BTreeSet<Var>) {
        match self {
            PFormula::True | PFormula::False => {}
            PFormula::Atom(p, _) => out.extend(p.vars()),
            PFormula::Not(a) => a.vars_into(out),
            PFormula::And(v) | PFormula::Or(v) => v.iter().for_each(|g| g.vars_into(out)),
            PFormula::Exists(x, a) | PFormula::Forall(x, a) => {
                let mut inner = BTreeSet::new();
                a.vars_into(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    pub fn mentions(&self, x: Var) -> bool {
        self.vars().contains(&x)
    }

    /// Distinct atom polynomials in order of first occurrence.
    pub fn atom_polys(&self) -> Vec<MultiPoly> {
        let mut out = Vec::new();
        self.atom_polys_into(&mut out);
        out
    }

    fn atom_polys_into(&self, out: &mut Vec<MultiPoly>) {
        match self {
            PFormula::True | PFormula::False => {}
            PFormula::Atom(p, _) => {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
            PFormula::Not(a) | PFormula::Exists(_, a) | PFormula::Forall(_, a) => a.atom_polys_into(out),
            PFormula::And(v) | PFormula::Or(v) => v.iter().for_each(|g| g.atom_polys_into(out)),
        }
    }

    /// Rebuilds with every atom mapped; connectives re-simplified.
    pub fn map_atoms(&self, f: &mut dyn FnMut(&MultiPoly, PRel) -> PFormula) -> PFormula {
        match self {
            PFormula::True | PFormula::False => self.clone(),
            PFormula::Atom(p, r) => f(p, *r),
            PFormula::Not(a) => PFormula::not(a.map_atoms(f)),
            PFormula::And(v) => PFormula::and(v.iter().map(|g| g.map_atoms(f)).collect::<Vec<_>>()),
            PFormula::Or(v) => PFormula::or(v.iter().map(|g| g.map_atoms(f)).collect::<Vec<_>>()),
            PFormula::Exists(x, a) => PFormula::Exists(*x, Box::new(a.map_atoms(f))),
            PFormula::Forall(x, a) => PFormula::Forall(*x, Box::new(a.map_atoms(f))),
        }
    }

    /// Truth value given the sign of every atom polynomial.
    pub fn eval_with(&self, sign: &dyn Fn(&MultiPoly) -> Option<Sign>) -> Option<bool> {
        Some(match self {
            PFormula::True => true,
            PFormula::False => false,
            PFormula::Atom(p, r) => r.holds(sign(p)?),
            PFormula::Not(a) => !a.eval_with(sign)?,
            PFormula::And(v) => {
                for g in v {
                    if !g.eval_with(sign)? {
                        return Some(false);
                    }
                }
                true
            }
            PFormula::Or(v) => {
                for g in v {
                    if g.eval_with(sign)? {
                        return Some(true);
                    }
                }
                false
            }
            PFormula::Exists(..) | PFormula::Forall(..) => return None,
        })
    }

    /// Negation normal form: negations only on equations.
    pub fn nnf(&self) -> PFormula {
        self.nnf_pol(true)
    }

    fn nnf_pol(&self, pos: bool) -> PFormula {
        match self {
            PFormula::True | PFormula::False => {
                if pos {
                    self.clone()
                } else {
                    PFormula::not(self.clone())
                }
            }
            PFormula::Atom(p, r) => match (pos, r) {
                (true, _) => self.clone(),
                (false, PRel::Eq) => PFormula::not(self.clone()),
                (false, PRel::Lt) => PFormula::atom(-p, PRel::Le),
                (false, PRel::Le) => PFormula::atom(-p, PRel::Lt),
            },
            PFormula::Not(a) => a.nnf_pol(!pos),
            PFormula::And(v) if pos => PFormula::and(v.iter().map(|g| g.nnf_pol(true)).collect::<Vec<_>>()),
            PFormula::And(v) => PFormula::or(v.iter().map(|g| g.nnf_pol(false)).collect::<Vec<_>>()),
            PFormula::Or(v) if pos => PFormula::or(v.iter().map(|g| g.nnf_pol(true)).collect::<Vec<_>>()),
            PFormula::Or(v) => PFormula::and(v.iter().map(|g| g.nnf_pol(false)).collect::<Vec<_>>()),
            PFormula::Exists(x, a) if pos => PFormula::Exists(*x, Box::new(a.nnf_pol(true))),
            PFormula::Exists(x, a) => PFormula::Forall(*x, Box::new(a.nnf_pol(false))),
            PFormula::Forall(x, a) if pos => PFormula::Forall(*x, Box::new(a.nnf_pol(true))),
            PFormula::Forall(x, a) => PFormula::Exists(*x, Box::new(a.nnf_pol(false))),
        }
    }

    /// Disjuncts of the disjunctive normal form of an NNF formula, or
    /// `None` if there would be more than `cap` of them.
    pub fn dnf(&self, cap: usize) -> Option<Vec<Vec<PFormula>>> {
        match self {
            PFormula::True => Some(vec![Vec::new()]),
            PFormula::False => Some(Vec::new()),
            PFormula::Or(v) => {
                let mut out = Vec::new();
                for g in v {
                    out.extend(g.dnf(cap)?);
                    if out.len() > cap {
                        return None;
                    }
                }
                Some(out)
            }
            PFormula::And(v) => {
                let mut acc: Vec<Vec<PFormula>> = vec![Vec::new()];
                for g in v {
                    let d = g.dnf(cap)?;
                    if acc.len() * d.len() > cap {
                        return None;
                    }
                    let mut next = Vec::with_capacity(acc.len() * d.len());
                    for a in &acc {
                        for b in &d {
                            let mut c = a.clone();
                            c.extend(b.iter().cloned());
                            next.push(c);
                        }
                    }
                    acc = next;
                }
                Some(acc)
            }
            g => Some(vec![vec![g.clone()]]),
        }
    }

    /// Folds atoms whose polynomial lies in `X` alone, reading `X` as a
    /// positive infinitesimal.
    pub fn fold_infinitesimal(&self) -> PFormula {
        self.map_atoms(&mut |p, r| match infinitesimal_sign(p) {
            Some(s) => PFormula::of_bool(r.holds(s)),
            None => PFormula::Atom(p.clone(), r),
        })
    }
}

/// Names of polynomial variables; index 0 is reserved for `X`.
#[derive(Clone, Debug, Default)]
pub struct VarTable {
    names: Vec<String>,
    index: HashMap<String, Var>,
}

impl VarTable {
    pub fn new() -> Self {
        VarTable {
            names: vec!["X".into()],
            index: HashMap::new(),
        }
    }

    pub fn intern(&mut self, name: &str) -> Var {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = Var(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        v
    }

    /// Always allocates a new variable, shadowing any previous binding.
    pub fn fresh(&mut self, name: &str) -> Var {
        let v = Var(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        v
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Converts a pure ordered-field term to a polynomial.
pub fn term_to_poly(t: &Term, vars: &mut VarTable) -> Result<MultiPoly> {
    Ok(match t {
        Term::Var(v) => MultiPoly::var(vars.intern(v)),
        Term::Rat(c) => MultiPoly::constant(c.clone()),
        Term::X => MultiPoly::var(XBAR),
        Term::Add(a, b) => &term_to_poly(a, vars)? + &term_to_poly(b, vars)?,
        Term::Sub(a, b) => &term_to_poly(a, vars)? - &term_to_poly(b, vars)?,
        Term::Mul(a, b) => &term_to_poly(a, vars)? * &term_to_poly(b, vars)?,
        Term::Neg(a) => -&term_to_poly(a, vars)?,
        Term::Stream(_) | Term::Hd(_) | Term::Tl(_) | Term::Cons(..) => {
            return Err(Error::NotPure(t.to_string()))
        }
    })
}

pub fn atom_to_pformula(a: &Atom, vars: &mut VarTable) -> Result<PFormula> {
    let p = &term_to_poly(&a.lhs, vars)? - &term_to_poly(&a.rhs, vars)?;
    Ok(match a.rel {
        Rel::Eq => PFormula::atom(p, PRel::Eq),
        Rel::Lt => PFormula::atom(p, PRel::Lt),
        Rel::Le => PFormula::atom(p, PRel::Le),
        Rel::Divides => return Err(Error::NotPure(format!("{} divides {}", a.lhs, a.rhs))),
    })
}

/// Converts a pure formula; quantifiers must be sort `L`.
pub fn to_pformula(f: &Formula, vars: &mut VarTable) -> Result<PFormula> {
    Ok(match f {
        Formula::True => PFormula::True,
        Formula::False => PFormula::False,
        Formula::Atom(a) => atom_to_pformula(a, vars)?,
        Formula::Not(a) => PFormula::not(to_pformula(a, vars)?),
        Formula::And(a, b) => PFormula::and([to_pformula(a, vars)?, to_pformula(b, vars)?]),
        Formula::Or(a, b) => PFormula::or([to_pformula(a, vars)?, to_pformula(b, vars)?]),
        Formula::Implies(a, b) => {
            PFormula::or([PFormula::not(to_pformula(a, vars)?), to_pformula(b, vars)?])
        }
        Formula::Iff(a, b) => {
            let (a, b) = (to_pformula(a, vars)?, to_pformula(b, vars)?);
            PFormula::and([
                PFormula::or([PFormula::not(a.clone()), b.clone()]),
                PFormula::or([PFormula::not(b), a]),
            ])
        }
        Formula::Forall(v, s, a) | Formula::Exists(v, s, a) => {
            if *s != Sort::L {
                return Err(Error::NotPure(format!("quantifier over `{v}` has sort S")));
            }
            let saved = vars.lookup(v);
            let x = vars.fresh(v);
            let body = to_pformula(a, vars)?;
            if let Some(old) = saved {
                vars.index.insert(v.clone(), old);
            } else {
                vars.index.remove(v);
            }
            match f.as_quant().unwrap().0 {
                Quant::Forall => PFormula::Forall(x, Box::new(body)),
                Quant::Exists => PFormula::Exists(x, Box::new(body)),
            }
        }
    })
}

/// Renders a polynomial as a term, highest monomials first.
pub fn poly_to_term(p: &MultiPoly, vars: &VarTable) -> Term {
    poly_to_term_with(p, &|v| if v == XBAR { Term::X } else { Term::var(vars.name(v)) })
}

/// As [`poly_to_term`], with each variable rendered by `leaf`.
pub fn poly_to_term_with(p: &MultiPoly, leaf: &dyn Fn(Var) -> Term) -> Term {
    let mut acc: Option<Term> = None;
    for (m, c) in p.terms().rev() {
        let neg = c.is_negative();
        let mag = c.abs();
        let mono = monomial_term(m, leaf);
        let t = match mono {
            None => Term::Rat(mag.clone()),
            Some(t) if mag.is_one() => t,
            Some(t) => Term::mul(Term::Rat(mag.clone()), t),
        };
        acc = Some(match acc {
            None if neg => Term::neg(t),
            None => t,
            Some(a) if neg => Term::sub(a, t),
            Some(a) => Term::add(a, t),
        });
    }
    acc.unwrap_or_else(|| Term::Rat(Rational::zero()))
}

fn monomial_term(m: &Monomial, leaf: &dyn Fn(Var) -> Term) -> Option<Term> {
    let mut acc: Option<Term> = None;
    for &(v, e) in m.pairs() {
        let base = leaf(v);
        for _ in 0..e {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => Term::mul(a, base.clone()),
            });
        }
    }
    acc
}

pub fn from_pformula(f: &PFormula, vars: &VarTable) -> Formula {
    let zero = || Term::Rat(rat(0));
    match f {
        PFormula::True => Formula::True,
        PFormula::False => Formula::False,
        PFormula::Atom(p, r) => {
            let rel = match r {
                PRel::Eq => Rel::Eq,
                PRel::Lt => Rel::Lt,
                PRel::Le => Rel::Le,
            };
            Formula::atom(poly_to_term(p, vars), rel, zero())
        }
        PFormula::Not(a) => Formula::not(from_pformula(a, vars)),
        PFormula::And(v) => Formula::and_all(v.iter().map(|g| from_pformula(g, vars))),
        PFormula::Or(v) => Formula::or_all(v.iter().map(|g| from_pformula(g, vars))),
        PFormula::Exists(x, a) => Formula::exists(vars.name(*x), Sort::L, from_pformula(a, vars)),
        PFormula::Forall(x, a) => Formula::forall(vars.name(*x), Sort::L, from_pformula(a, vars)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    #[test]
    fn infinitesimal_signs() {
        let x = MultiPoly::var(XBAR);
        let p = &MultiPoly::constant(rat(3)) - &x;
        assert_eq!(infinitesimal_sign(&p), Some(Sign::Pos));
        let q = &(&x * &MultiPoly::constant(rat(-2))) + &x.pow(3).scale(&rat(5));
        assert_eq!(infinitesimal_sign(&q), Some(Sign::Neg));
        assert_eq!(infinitesimal_sign(&MultiPoly::zero()), Some(Sign::Zero));
        assert_eq!(infinitesimal_sign(&MultiPoly::var(Var(1))), None);
    }

    #[test]
    fn round_trip_through_polynomials() {
        let f = parse(r"exists y:L. y*y + 2*b*y - c = 0 /\ X < y").unwrap();
        let mut vt = VarTable::new();
        let p = to_pformula(&f, &mut vt).unwrap();
        let back = from_pformula(&p, &vt);
        let mut vt2 = VarTable::new();
        assert_eq!(to_pformula(&back, &mut vt2).unwrap().vars().len(), 3);
    }

    #[test]
    fn rejects_impure_input() {
        let mut vt = VarTable::new();
        let f = parse("exists y. y = 0").unwrap();
        assert!(matches!(to_pformula(&f, &mut vt), Err(Error::NotPure(_))));
        let g = parse("hd(y) = 0").unwrap();
        assert!(matches!(to_pformula(&g, &mut vt), Err(Error::NotPure(_))));
    }

    #[test]
    fn dnf_and_nnf() {
        let a = PFormula::atom(MultiPoly::var(Var(1)), PRel::Lt);
        let b = PFormula::atom(MultiPoly::var(Var(2)), PRel::Eq);
        let f = PFormula::not(PFormula::or([a.clone(), b.clone()]));
        let n = f.nnf();
        assert_eq!(n.dnf(10).unwrap().len(), 1);
        let c = PFormula::atom(MultiPoly::var(Var(3)), PRel::Le);
        let g = PFormula::and([PFormula::or([a.clone(), b.clone()]), PFormula::or([a, c])]);
        assert_eq!(g.dnf(3), None);
    }
}
