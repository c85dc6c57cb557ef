use crate::algebra::Rational;
use crate::streams::LaurentRational;
use num_traits::{One, Zero};
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Rat(Rational),
    /// The indeterminate `X`.
    X,
    Stream(LaurentRational),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Hd(Box<Term>),
    Tl(Box<Term>),
    Cons(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn int(n: i64) -> Term {
        Term::Rat(crate::algebra::rat(n))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    /// Negation, folded into rational literals.
    pub fn neg(a: Term) -> Term {
        match a {
            Term::Rat(c) => Term::Rat(-c),
            a => Term::Neg(Box::new(a)),
        }
    }

    pub fn hd(a: Term) -> Term {
        Term::Hd(Box::new(a))
    }

    pub fn tl(a: Term) -> Term {
        Term::Tl(Box::new(a))
    }

    pub fn cons(a: Term, b: Term) -> Term {
        Term::Cons(Box::new(a), Box::new(b))
    }

    /// `a^e` as repeated multiplication.
    pub fn pow(a: Term, e: u32) -> Term {
        if let Term::Rat(c) = &a {
            return Term::Rat(num_traits::pow(c.clone(), e as usize));
        }
        match e {
            0 => Term::Rat(Rational::one()),
            _ => (1..e).fold(a.clone(), |acc, _| Term::mul(acc, a.clone())),
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Term::Rat(c) if c.is_zero())
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Rat(_) | Term::X | Term::Stream(_) => {}
            Term::Neg(a) | Term::Hd(a) | Term::Tl(a) => a.vars_into(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Cons(a, b) => {
                a.vars_into(out);
                b.vars_into(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.vars_into(&mut s);
        s
    }

    /// Simultaneous replacement of variables.
    pub fn subst(&self, m: &HashMap<String, Term>) -> Term {
        self.map_vars(&|v| m.get(v).cloned())
    }

    pub fn map_vars(&self, f: &dyn Fn(&str) -> Option<Term>) -> Term {
        let r = |t: &Term| Box::new(t.map_vars(f));
        match self {
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::Rat(_) | Term::X | Term::Stream(_) => self.clone(),
            Term::Add(a, b) => Term::Add(r(a), r(b)),
            Term::Sub(a, b) => Term::Sub(r(a), r(b)),
            Term::Mul(a, b) => Term::Mul(r(a), r(b)),
            Term::Cons(a, b) => Term::Cons(r(a), r(b)),
            Term::Neg(a) => Term::Neg(r(a)),
            Term::Hd(a) => Term::Hd(r(a)),
            Term::Tl(a) => Term::Tl(r(a)),
        }
    }

    /// True if the term mentions `hd`, `tl` or `cons`.
    pub fn has_stream_ops(&self) -> bool {
        match self {
            Term::Hd(_) | Term::Tl(_) | Term::Cons(_, _) => true,
            Term::Var(_) | Term::Rat(_) | Term::X | Term::Stream(_) => false,
            Term::Neg(a) => a.has_stream_ops(),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.has_stream_ops() || b.has_stream_ops()
            }
        }
    }

    pub fn has_stream_const(&self) -> bool {
        match self {
            Term::Stream(_) => true,
            Term::Var(_) | Term::Rat(_) | Term::X => false,
            Term::Neg(a) | Term::Hd(a) | Term::Tl(a) => a.has_stream_const(),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Cons(a, b) => {
                a.has_stream_const() || b.has_stream_const()
            }
        }
    }
}

/// Primitive relations; `!=`, `>=` and `>` are desugared by the parser.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Le,
    Lt,
    Divides,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Divides => "divides",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: Term,
    pub rel: Rel,
    pub rhs: Term,
}

/// Quantifier domain: power series `S` or Laurent series `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Sort {
    #[default]
    S,
    L,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
}

impl Quant {
    pub fn dual(self) -> Quant {
        match self {
            Quant::Forall => Quant::Exists,
            Quant::Exists => Quant::Forall,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Sort, Box<Formula>),
    Exists(String, Sort, Box<Formula>),
}

impl Formula {
    pub fn atom(lhs: Term, rel: Rel, rhs: Term) -> Formula {
        Formula::Atom(Atom { lhs, rel, rhs })
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Self::atom(lhs, Rel::Eq, rhs)
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn quant(q: Quant, v: &str, s: Sort, body: Formula) -> Formula {
        match q {
            Quant::Forall => Formula::Forall(v.to_string(), s, Box::new(body)),
            Quant::Exists => Formula::Exists(v.to_string(), s, Box::new(body)),
        }
    }

    pub fn forall(v: &str, s: Sort, body: Formula) -> Formula {
        Self::quant(Quant::Forall, v, s, body)
    }

    pub fn exists(v: &str, s: Sort, body: Formula) -> Formula {
        Self::quant(Quant::Exists, v, s, body)
    }

    /// Right-nested conjunction; `true` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut v: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = v.pop() else {
            return Formula::True;
        };
        while let Some(f) = v.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut v: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = v.pop() else {
            return Formula::False;
        };
        while let Some(f) = v.pop() {
            acc = Formula::or(f, acc);
        }
        acc
    }

    pub fn as_quant(&self) -> Option<(Quant, &str, Sort, &Formula)> {
        match self {
            Formula::Forall(v, s, b) => Some((Quant::Forall, v, *s, b)),
            Formula::Exists(v, s, b) => Some((Quant::Exists, v, *s, b)),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                for v in a.lhs.vars().into_iter().chain(a.rhs.vars()) {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::Not(a) => a.free_into(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.free_into(bound, out);
                b.free_into(bound, out);
            }
            Formula::Forall(v, _, b) | Formula::Exists(v, _, b) => {
                bound.push(v.clone());
                b.free_into(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(a) => {
                a.lhs.vars_into(&mut out);
                a.rhs.vars_into(&mut out);
            }
            Formula::Forall(v, _, _) | Formula::Exists(v, _, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(a) | Formula::Forall(_, _, a) | Formula::Exists(_, _, a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Rebuilds the formula with every atom replaced by `f(atom)`.
    pub fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => f(a),
            Formula::Not(a) => Formula::not(a.map_atoms(f)),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
            Formula::Forall(v, s, a) => Formula::Forall(v.clone(), *s, Box::new(a.map_atoms(f))),
            Formula::Exists(v, s, a) => Formula::Exists(v.clone(), *s, Box::new(a.map_atoms(f))),
        }
    }

    pub fn quantifier_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if f.as_quant().is_some() {
                n += 1;
            }
        });
        n
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.quantifier_count() == 0
    }

    pub fn any_term(&self, p: &dyn Fn(&Term) -> bool) -> bool {
        let mut hit = false;
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                hit |= p(&a.lhs) || p(&a.rhs);
            }
        });
        hit
    }

    pub fn any_atom(&self, p: &dyn Fn(&Atom) -> bool) -> bool {
        let mut hit = false;
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                hit |= p(a);
            }
        });
        hit
    }

    /// Capture-avoiding substitution of `t` for free `x`.
    pub fn substitute(&self, x: &str, t: &Term) -> Formula {
        let mut avoid = t.vars();
        avoid.extend(self.all_names());
        avoid.insert(x.to_string());
        self.subst_rec(x, t, &t.vars(), &mut avoid)
    }

    fn subst_rec(&self, x: &str, t: &Term, tv: &BTreeSet<String>, avoid: &mut BTreeSet<String>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => {
                let f = |v: &str| (v == x).then(|| t.clone());
                Formula::Atom(Atom {
                    lhs: a.lhs.map_vars(&f),
                    rel: a.rel,
                    rhs: a.rhs.map_vars(&f),
                })
            }
            Formula::Not(a) => Formula::not(a.subst_rec(x, t, tv, avoid)),
            Formula::And(a, b) => Formula::and(a.subst_rec(x, t, tv, avoid), b.subst_rec(x, t, tv, avoid)),
            Formula::Or(a, b) => Formula::or(a.subst_rec(x, t, tv, avoid), b.subst_rec(x, t, tv, avoid)),
            Formula::Implies(a, b) => {
                Formula::implies(a.subst_rec(x, t, tv, avoid), b.subst_rec(x, t, tv, avoid))
            }
            Formula::Iff(a, b) => Formula::iff(a.subst_rec(x, t, tv, avoid), b.subst_rec(x, t, tv, avoid)),
            Formula::Forall(v, s, b) | Formula::Exists(v, s, b) => {
                let q = self.as_quant().unwrap().0;
                if v == x {
                    return self.clone();
                }
                if tv.contains(v) {
                    let fresh = fresh_name(v, avoid);
                    avoid.insert(fresh.clone());
                    let renamed = b.substitute(v, &Term::Var(fresh.clone()));
                    Formula::quant(q, &fresh, *s, renamed.subst_rec(x, t, tv, avoid))
                } else {
                    Formula::quant(q, v, *s, b.subst_rec(x, t, tv, avoid))
                }
            }
        }
    }

    /// Renames bound variables so that every binder is distinct and no bound
    /// name clashes with a free one.
    pub fn alpha_rename(&self) -> Formula {
        let mut used = self.free_vars();
        let mut avoid = self.all_names();
        self.rename_rec(&mut HashMap::new(), &mut used, &mut avoid)
    }

    fn rename_rec(
        &self,
        env: &mut HashMap<String, String>,
        used: &mut BTreeSet<String>,
        avoid: &mut BTreeSet<String>,
    ) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => {
                let f = |v: &str| env.get(v).map(|n| Term::Var(n.clone()));
                Formula::Atom(Atom {
                    lhs: a.lhs.map_vars(&f),
                    rel: a.rel,
                    rhs: a.rhs.map_vars(&f),
                })
            }
            Formula::Not(a) => Formula::not(a.rename_rec(env, used, avoid)),
            Formula::And(a, b) => Formula::and(a.rename_rec(env, used, avoid), b.rename_rec(env, used, avoid)),
            Formula::Or(a, b) => Formula::or(a.rename_rec(env, used, avoid), b.rename_rec(env, used, avoid)),
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_rec(env, used, avoid), b.rename_rec(env, used, avoid))
            }
            Formula::Iff(a, b) => Formula::iff(a.rename_rec(env, used, avoid), b.rename_rec(env, used, avoid)),
            Formula::Forall(v, s, b) | Formula::Exists(v, s, b) => {
                let q = self.as_quant().unwrap().0;
                let name = if used.contains(v) {
                    let n = fresh_name(v, avoid);
                    avoid.insert(n.clone());
                    n
                } else {
                    v.clone()
                };
                used.insert(name.clone());
                let prev = env.insert(v.clone(), name.clone());
                let body = b.rename_rec(env, used, avoid);
                match prev {
                    Some(p) => env.insert(v.clone(), p),
                    None => env.remove(v),
                };
                Formula::quant(q, &name, *s, body)
            }
        }
    }

    /// Equality up to consistent renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_eq_rec(self, other, &mut Vec::new())
    }
}

fn alpha_eq_rec(a: &Formula, b: &Formula, env: &mut Vec<(String, String)>) -> bool {
    match (a, b) {
        (Formula::True, Formula::True) | (Formula::False, Formula::False) => true,
        (Formula::Atom(x), Formula::Atom(y)) => {
            x.rel == y.rel && term_alpha_eq(&x.lhs, &y.lhs, env) && term_alpha_eq(&x.rhs, &y.rhs, env)
        }
        (Formula::Not(x), Formula::Not(y)) => alpha_eq_rec(x, y, env),
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Implies(a1, a2), Formula::Implies(b1, b2))
        | (Formula::Iff(a1, a2), Formula::Iff(b1, b2)) => {
            alpha_eq_rec(a1, b1, env) && alpha_eq_rec(a2, b2, env)
        }
        (Formula::Forall(v, s, x), Formula::Forall(w, t, y)) | (Formula::Exists(v, s, x), Formula::Exists(w, t, y)) => {
            if s != t {
                return false;
            }
            env.push((v.clone(), w.clone()));
            let r = alpha_eq_rec(x, y, env);
            env.pop();
            r
        }
        _ => false,
    }
}

fn term_alpha_eq(a: &Term, b: &Term, env: &[(String, String)]) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            for (l, r) in env.iter().rev() {
                if l == x || r == y {
                    return l == x && r == y;
                }
            }
            x == y
        }
        (Term::Add(a1, a2), Term::Add(b1, b2))
        | (Term::Sub(a1, a2), Term::Sub(b1, b2))
        | (Term::Mul(a1, a2), Term::Mul(b1, b2))
        | (Term::Cons(a1, a2), Term::Cons(b1, b2)) => {
            term_alpha_eq(a1, b1, env) && term_alpha_eq(a2, b2, env)
        }
        (Term::Neg(x), Term::Neg(y)) | (Term::Hd(x), Term::Hd(y)) | (Term::Tl(x), Term::Tl(y)) => {
            term_alpha_eq(x, y, env)
        }
        _ => a == b,
    }
}

/// `base_k` for the smallest `k >= 1` not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.split('_').next().filter(|s| !s.is_empty()).unwrap_or(base);
    (1..)
        .map(|k| format!("{stem}_{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply")
}
