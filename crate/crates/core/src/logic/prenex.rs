use super::ast::{fresh_name, Formula, Quant, Sort, Term};
use std::collections::BTreeSet;

pub type Prefix = Vec<(Quant, String, Sort)>;

/// Replaces `a <-> b` by `(a -> b) /\ (b -> a)`.
pub fn desugar_iff(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(desugar_iff(a)),
        Formula::And(a, b) => Formula::and(desugar_iff(a), desugar_iff(b)),
        Formula::Or(a, b) => Formula::or(desugar_iff(a), desugar_iff(b)),
        Formula::Implies(a, b) => Formula::implies(desugar_iff(a), desugar_iff(b)),
        Formula::Iff(a, b) => {
            let (a, b) = (desugar_iff(a), desugar_iff(b));
            Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
        }
        Formula::Forall(v, s, a) => Formula::Forall(v.clone(), *s, Box::new(desugar_iff(a))),
        Formula::Exists(v, s, a) => Formula::Exists(v.clone(), *s, Box::new(desugar_iff(a))),
    }
}

/// Prenex normal form.
pub fn prenex(f: &Formula) -> Formula {
    let f = desugar_iff(f);
    let mut avoid = f.all_names();
    let (prefix, matrix) = split(&f, &mut avoid);
    rebuild(&prefix, matrix)
}

/// Prenex form as an explicit prefix and quantifier-free matrix.
pub fn prenex_parts(f: &Formula) -> (Prefix, Formula) {
    let f = desugar_iff(f);
    let mut avoid = f.all_names();
    split(&f, &mut avoid)
}

pub fn rebuild(prefix: &[(Quant, String, Sort)], matrix: Formula) -> Formula {
    prefix
        .iter()
        .rev()
        .fold(matrix, |acc, (q, v, s)| Formula::quant(*q, v, *s, acc))
}

fn dualize(p: Prefix) -> Prefix {
    p.into_iter().map(|(q, v, s)| (q.dual(), v, s)).collect()
}

/// Renames prefix variables of one side that occur free on the other side.
fn separate(prefix: &mut Prefix, matrix: &mut Formula, other_free: &BTreeSet<String>, avoid: &mut BTreeSet<String>) {
    for (_, v, _) in prefix.iter_mut() {
        if other_free.contains(v.as_str()) {
            let n = fresh_name(v, avoid);
            avoid.insert(n.clone());
            *matrix = matrix.substitute(v, &Term::Var(n.clone()));
            *v = n;
        }
    }
}

fn split(f: &Formula, avoid: &mut BTreeSet<String>) -> (Prefix, Formula) {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => (Vec::new(), f.clone()),
        Formula::Not(a) => {
            let (p, m) = split(a, avoid);
            (dualize(p), Formula::not(m))
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let (mut pa, mut ma) = split(a, avoid);
            let (mut pb, mut mb) = split(b, avoid);
            let fb = rebuild(&pb, mb.clone()).free_vars();
            separate(&mut pa, &mut ma, &fb, avoid);
            let fa = rebuild(&pa, ma.clone()).free_vars();
            separate(&mut pb, &mut mb, &fa, avoid);
            let (pa, m) = match f {
                Formula::And(..) => (pa, Formula::and(ma, mb)),
                Formula::Or(..) => (pa, Formula::or(ma, mb)),
                _ => (dualize(pa), Formula::implies(ma, mb)),
            };
            let mut prefix = pa;
            prefix.extend(pb);
            (prefix, m)
        }
        Formula::Iff(..) => split(&desugar_iff(f), avoid),
        Formula::Forall(v, s, a) | Formula::Exists(v, s, a) => {
            let q = f.as_quant().unwrap().0;
            let (mut p, m) = split(a, avoid);
            p.insert(0, (q, v.clone(), *s));
            (p, m)
        }
    }
}

/// Negation normal form over `/\`, `\/`, `~atom` and quantifiers.
pub fn nnf(f: &Formula) -> Formula {
    nnf_pol(f, true)
}

fn nnf_pol(f: &Formula, pos: bool) -> Formula {
    match f {
        Formula::True => if pos { Formula::True } else { Formula::False },
        Formula::False => if pos { Formula::False } else { Formula::True },
        Formula::Atom(_) => if pos { f.clone() } else { Formula::not(f.clone()) },
        Formula::Not(a) => nnf_pol(a, !pos),
        Formula::And(a, b) if pos => Formula::and(nnf_pol(a, true), nnf_pol(b, true)),
        Formula::And(a, b) => Formula::or(nnf_pol(a, false), nnf_pol(b, false)),
        Formula::Or(a, b) if pos => Formula::or(nnf_pol(a, true), nnf_pol(b, true)),
        Formula::Or(a, b) => Formula::and(nnf_pol(a, false), nnf_pol(b, false)),
        Formula::Implies(a, b) if pos => Formula::or(nnf_pol(a, false), nnf_pol(b, true)),
        Formula::Implies(a, b) => Formula::and(nnf_pol(a, true), nnf_pol(b, false)),
        Formula::Iff(..) => nnf_pol(&desugar_iff(f), pos),
        Formula::Forall(v, s, a) | Formula::Exists(v, s, a) => {
            let q = f.as_quant().unwrap().0;
            let q = if pos { q } else { q.dual() };
            Formula::quant(q, v, *s, nnf_pol(a, pos))
        }
    }
}
