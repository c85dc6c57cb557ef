//! Quantifier elimination for real-closed fields, with `X` as a parameter
//! that `decide` finally reads as a positive infinitesimal.

mod cohen;
mod elim;
mod formula;

pub use cohen::sign_at_infinitesimal;
pub use elim::QeOptions;
pub use formula::{
    from_pformula, infinitesimal_sign, poly_to_term, poly_to_term_with, term_to_poly, to_pformula, PFormula, PRel,
    VarTable, XBAR,
};

use crate::algebra::{MultiPoly, Var};
use crate::error::{Error, QeStats, Result};
use crate::expand::{self, ExpansionReport};
use crate::expand::{Growth, Side};
use crate::logic::{prenex, prenex_parts, Formula, Quant, Sort};
use elim::{substitute_linear, Eliminator, Linear};

/// Outcome of [`decide_with`].
#[derive(Clone, Debug)]
pub struct Decision {
    pub valid: bool,
    pub stats: QeStats,
    pub report: ExpansionReport,
    pub trace: Vec<String>,
}

/// Quantifier-free equivalent of a formula, over every real-closed field.
///
/// The extended language is compiled away first, so sort `S` quantifiers,
/// stream constants and divisibility are accepted.
pub fn eliminate(f: &Formula) -> Result<Formula> {
    eliminate_with(f, &QeOptions::default()).map(|(g, _)| g)
}

/// Input that is already quantifier-free and in the plain ordered-ring
/// language comes back unchanged.
pub fn eliminate_with(f: &Formula, opts: &QeOptions) -> Result<(Formula, QeStats)> {
    on_deep_stack(|| eliminate_ext(f, opts))
}

fn eliminate_ext(f: &Formula, opts: &QeOptions) -> Result<(Formula, QeStats)> {
    let (ext, _) = expand::expand_operators(f)?;
    if f.is_quantifier_free() && ext == *f {
        return Ok((f.clone(), QeStats::default()));
    }
    if !quantifies_over_s(&ext) {
        return eliminate_pure(&ext, opts);
    }
    let h = expand::constant_height(&ext);
    let mut stats = QeStats::default();
    for growth in [Growth::Constant, Growth::Polynomial] {
        let (lo, s1) = eliminate_pure(&expand::relativize_bounded(&ext, Side::Valid, growth, &h), opts)?;
        let (hi, s2) = eliminate_pure(&expand::relativize_bounded(&ext, Side::Invalid, growth, &h), opts)?;
        stats = add_stats(stats, add_stats(s1, s2));
        if lo == hi {
            return Ok((lo, stats));
        }
        // lo implies f implies hi, so f is pinned down when hi implies lo
        let claim = lo
            .free_vars()
            .union(&hi.free_vars())
            .fold(Formula::implies(hi, lo.clone()), |acc, v| Formula::forall(v, Sort::L, acc));
        let (same, s3) = decide_pure(&claim, opts, &mut Vec::new())?;
        stats = add_stats(stats, s3);
        if same {
            return Ok((lo, stats));
        }
    }
    Err(Error::UnsupportedFragment(UNSETTLED.into()))
}

fn eliminate_pure(pure: &Formula, opts: &QeOptions) -> Result<(Formula, QeStats)> {
    let mut vars = VarTable::new();
    for v in pure.free_vars() {
        vars.intern(&v);
    }
    let p = to_pformula(&prenex(pure), &mut vars)?;
    let el = Eliminator::new(opts, &vars);
    let q = el.qelim(&p)?;
    let stats = *el.stats.borrow();
    Ok((from_pformula(&q, &vars), stats))
}

const UNSETTLED: &str = "quantifiers over S: inner and outer bounds on the ring disagree";

/// Truth of a sentence in the stream structure.
pub fn decide(f: &Formula) -> Result<bool> {
    decide_with(f, &QeOptions::default()).map(|d| d.valid)
}

/// Sentences quantifying over `S` are decided with the ring bounded from
/// inside and from outside (see [`expand::relativize_bounded`]), first with
/// constant and then with polynomial bounds; a verdict is returned only
/// once some run certifies it.
pub fn decide_with(f: &Formula, opts: &QeOptions) -> Result<Decision> {
    on_deep_stack(|| decide_ext(f, opts))
}

/// The sign-matrix recursion nests once per case split.
fn on_deep_stack<T: Send>(job: impl FnOnce() -> T + Send) -> T {
    const STACK: usize = 1 << 30;
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK)
            .spawn_scoped(s, job)
            .expect("spawn elimination thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

fn decide_ext(f: &Formula, opts: &QeOptions) -> Result<Decision> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(Error::NotASentence(free.into_iter().collect::<Vec<_>>().join(", ")));
    }
    let (ext, mut report) = expand::expand_operators(f)?;
    let mut trace = Vec::new();
    if opts.trace {
        trace.extend(report.applied_rules.iter().map(|r| format!("expand: {r}")));
    }
    if !quantifies_over_s(&ext) {
        let (valid, stats) = decide_pure(&ext, opts, &mut trace)?;
        return Ok(Decision {
            valid,
            stats,
            report,
            trace,
        });
    }
    report.rule("relativize");
    let h = expand::constant_height(&ext);
    let mut stats = QeStats::default();
    let mut budget = None;
    let mut tried = Vec::new();
    for growth in [Growth::Constant, Growth::Polynomial] {
        for side in [Side::Valid, Side::Invalid] {
            let g = expand::relativize_bounded(&ext, side, growth, &h);
            if tried.contains(&g) {
                continue;
            }
            let outcome = decide_pure(&g, opts, &mut trace);
            tried.push(g);
            match outcome {
                Ok((truth, s)) => {
                    stats = add_stats(stats, s);
                    if truth == (side == Side::Valid) {
                        return Ok(Decision {
                            valid: truth,
                            stats,
                            report,
                            trace,
                        });
                    }
                }
                Err(e @ Error::BudgetExceeded { .. }) => budget = Some(e),
                Err(e) => return Err(e),
            }
        }
    }
    Err(budget.unwrap_or_else(|| Error::UnsupportedFragment(UNSETTLED.into())))
}

fn decide_pure(pure: &Formula, opts: &QeOptions, trace: &mut Vec<String>) -> Result<(bool, QeStats)> {
    if opts.trace {
        trace.push(format!("pure: {pure}"));
    }
    let mut problem = PrenexProblem::from_formula(pure)?;
    if opts.presolve {
        problem = linear_presolve(&problem);
    }
    let opts = QeOptions {
        infinitesimal: true,
        ..opts.clone()
    };
    let el = Eliminator::new(&opts, &problem.vars);
    let q = el.qelim(&problem.to_pformula())?;
    let valid = evaluate_pformula(&q)?;
    let mut stats = *el.stats.borrow();
    stats.presolved_vars += problem.presolved;
    trace.extend(el.log.borrow().iter().cloned());
    Ok((valid, stats))
}

fn quantifies_over_s(f: &Formula) -> bool {
    let mut found = false;
    f.visit(&mut |g| found |= matches!(g.as_quant(), Some((_, _, Sort::S, _))));
    found
}

fn add_stats(a: QeStats, b: QeStats) -> QeStats {
    QeStats {
        polys_generated: a.polys_generated + b.polys_generated,
        case_splits: a.case_splits + b.case_splits,
        presolved_vars: a.presolved_vars + b.presolved_vars,
    }
}

fn evaluate_pformula(q: &PFormula) -> Result<bool> {
    match q.fold_infinitesimal() {
        PFormula::True => Ok(true),
        PFormula::False => Ok(false),
        other => {
            let mut vars = other.vars();
            vars.remove(&XBAR);
            match vars.into_iter().next() {
                Some(v) => Err(Error::NotGround(format!("v{}", v.0))),
                None => other
                    .eval_with(&|p| infinitesimal_sign(p))
                    .ok_or_else(|| Error::Internal("quantifier left after elimination".into())),
            }
        }
    }
}

/// Truth value of a quantifier-free formula whose only constant is `X`.
pub fn evaluate_qf(g: &Formula) -> Result<bool> {
    if let Some(v) = g.free_vars().into_iter().next() {
        return Err(Error::NotGround(v));
    }
    let g = expand::expand_constants(g);
    let mut vars = VarTable::new();
    let p = to_pformula(&g, &mut vars)?;
    if !p.is_quantifier_free() {
        return Err(Error::NotGround("formula has quantifiers".into()));
    }
    evaluate_pformula(&p)
}

/// Prenex formula over polynomial atoms.
#[derive(Clone, Debug)]
pub struct PrenexProblem {
    pub prefix: Vec<(Quant, Var)>,
    pub matrix: PFormula,
    /// Free variables; `X` is implicit.
    pub params: Vec<Var>,
    pub vars: VarTable,
    /// Variables removed by [`linear_presolve`] so far.
    pub presolved: u64,
}

impl PrenexProblem {
    /// Requires a pure formula with `L`-sorted quantifiers.
    pub fn from_formula(f: &Formula) -> Result<Self> {
        let mut vars = VarTable::new();
        let params = f.free_vars().iter().map(|v| vars.intern(v)).collect();
        let (prefix, matrix) = prenex_parts(f);
        let mut pre = Vec::new();
        for (q, name, sort) in prefix {
            if sort != crate::logic::Sort::L {
                return Err(Error::NotPure(format!("quantifier over `{name}` has sort S")));
            }
            pre.push((q, vars.fresh(&name)));
        }
        let matrix = to_pformula(&matrix, &mut vars)?;
        Ok(PrenexProblem {
            prefix: pre,
            matrix,
            params,
            vars,
            presolved: 0,
        })
    }

    pub fn to_pformula(&self) -> PFormula {
        self.prefix.iter().rev().fold(self.matrix.clone(), |acc, &(q, v)| match q {
            Quant::Forall => PFormula::Forall(v, Box::new(acc)),
            Quant::Exists => PFormula::Exists(v, Box::new(acc)),
        })
    }

    pub fn to_formula(&self) -> Formula {
        from_pformula(&self.to_pformula(), &self.vars)
    }
}

/// Removes innermost-block variables fixed by a linear equation with a
/// nonzero rational coefficient: a conjunct `c*y + r = 0` under `exists y`,
/// or a disjunct `~(c*y + r = 0)` under `forall y`.
pub fn linear_presolve(p: &PrenexProblem) -> PrenexProblem {
    let mut out = p.clone();
    loop {
        let Some(&(q, _)) = out.prefix.last() else { break };
        let start = out.prefix.iter().rposition(|&(r, _)| r != q).map_or(0, |i| i + 1);
        let block: Vec<Var> = out.prefix[start..].iter().map(|&(_, v)| v).collect();
        let matrix = out.matrix.nnf();
        let items = match (&matrix, q) {
            (PFormula::And(v), Quant::Exists) | (PFormula::Or(v), Quant::Forall) => v.clone(),
            (m, _) => vec![m.clone()],
        };
        let found = block.iter().find_map(|&v| {
            items.iter().find_map(|it| {
                let atom = match (it, q) {
                    (PFormula::Atom(a, PRel::Eq), Quant::Exists) => a,
                    (PFormula::Not(inner), Quant::Forall) => match inner.as_ref() {
                        PFormula::Atom(a, PRel::Eq) => a,
                        _ => return None,
                    },
                    _ => return None,
                };
                linear_in(atom, v).map(|sol| (v, sol))
            })
        });
        let Some((v, sol)) = found else { break };
        let rebuilt = substitute_linear(&items, v, &sol);
        out.matrix = match q {
            Quant::Exists => PFormula::and(rebuilt),
            Quant::Forall => PFormula::or(rebuilt),
        };
        out.prefix.retain(|&(_, w)| w != v);
        out.presolved += 1;
        // drop quantifiers over variables that no longer occur
        let live = out.matrix.vars();
        out.prefix.retain(|&(_, w)| live.contains(&w));
    }
    out
}

fn linear_in(p: &MultiPoly, v: Var) -> Option<Linear> {
    if p.degree_in(v) != 1 {
        return None;
    }
    let u = p.to_univariate(v);
    let c = u[1].as_constant()?;
    (c != num_traits::Zero::zero()).then(|| Linear {
        c: u[1].clone(),
        r: u[0].clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    fn valid(s: &str) -> bool {
        decide(&parse(s).unwrap()).unwrap()
    }

    #[test]
    fn small_sentences() {
        assert!(!valid("exists x:L. x*x = -1"));
        assert!(valid("forall x:L. x*x + 1 > 0"));
        assert!(valid(r"forall a:L. (exists x:L. x*x = -a) <-> a <= 0"));
        assert!(valid(r"forall b:L, c:L. (exists x:L. x*x + b*x + c = 0) <-> b*b - 4*c >= 0"));
    }

    #[test]
    fn infinitesimal_order() {
        assert!(valid("0 < X"));
        assert!(valid("X < 1/1000000"));
        assert!(valid("X*X < X"));
        assert!(!valid("X = 0"));
        assert!(valid("exists y:L. y*y = X"));
    }

    #[test]
    fn evaluation() {
        assert_eq!(evaluate_qf(&parse("X < 1/1000000").unwrap()), Ok(true));
        assert_eq!(evaluate_qf(&parse("X^2 < X").unwrap()), Ok(true));
        assert_eq!(evaluate_qf(&parse("X = 0").unwrap()), Ok(false));
        assert!(matches!(evaluate_qf(&parse("x = 0").unwrap()), Err(Error::NotGround(_))));
    }

    #[test]
    fn presolve_substitutes() {
        let f = parse(r"forall y:L. y = a + 1 -> y*y >= 0").unwrap();
        let p = PrenexProblem::from_formula(&f).unwrap();
        let q = linear_presolve(&p);
        assert!(q.prefix.is_empty());
        let g = parse(r"forall y:L. y*y = a -> y >= 0").unwrap();
        let p = PrenexProblem::from_formula(&g).unwrap();
        assert_eq!(linear_presolve(&p).prefix.len(), 1);
    }

    #[test]
    fn sign_at_infinitesimal_examples() {
        use crate::algebra::{Sign, UniPoly};
        assert_eq!(sign_at_infinitesimal(&UniPoly::from_ints(&[3, -1])), Sign::Pos);
        assert_eq!(sign_at_infinitesimal(&UniPoly::from_ints(&[0, -2, 0, 5])), Sign::Neg);
        assert_eq!(sign_at_infinitesimal(&UniPoly::zero()), Sign::Zero);
    }
}
