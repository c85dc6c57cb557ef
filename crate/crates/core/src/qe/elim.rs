use super::cohen::{Engine, Fail};
use super::formula::{infinitesimal_sign, PFormula, PRel, VarTable};
use crate::algebra::{MultiPoly, Sign, Var};
use crate::error::{Error, QeStats, Result};
use std::cell::RefCell;

/// Tuning knobs for elimination.
#[derive(Clone, Debug)]
pub struct QeOptions {
    /// Ceiling on polynomials generated by the sign-matrix core.
    pub budget: u64,
    /// Substitute away variables fixed by a linear equation first.
    pub presolve: bool,
    /// Read `X` as a positive infinitesimal while eliminating.
    pub infinitesimal: bool,
    /// Largest disjunctive normal form expanded before falling back to
    /// eliminating from the whole formula.
    pub dnf_cap: usize,
    /// Record each elimination step.
    pub trace: bool,
}

impl Default for QeOptions {
    fn default() -> Self {
        QeOptions {
            budget: 1_000_000,
            presolve: true,
            infinitesimal: false,
            dnf_cap: 256,
            trace: false,
        }
    }
}

pub(crate) struct Eliminator<'a> {
    pub opts: &'a QeOptions,
    pub names: &'a VarTable,
    pub stats: RefCell<QeStats>,
    pub log: RefCell<Vec<String>>,
}

impl<'a> Eliminator<'a> {
    pub fn new(opts: &'a QeOptions, names: &'a VarTable) -> Self {
        Eliminator {
            opts,
            names,
            stats: RefCell::new(QeStats::default()),
            log: RefCell::new(Vec::new()),
        }
    }

    fn trace(&self, msg: impl FnOnce() -> String) {
        if self.opts.trace {
            self.log.borrow_mut().push(msg());
        }
    }

    fn budget_error(&self) -> Error {
        Error::BudgetExceeded {
            budget: self.opts.budget,
            stats: *self.stats.borrow(),
        }
    }

    fn simplify(&self, f: PFormula) -> PFormula {
        if self.opts.infinitesimal {
            f.fold_infinitesimal()
        } else {
            f
        }
    }

    /// Removes every quantifier, innermost first.
    pub fn qelim(&self, f: &PFormula) -> Result<PFormula> {
        Ok(match f {
            PFormula::True | PFormula::False | PFormula::Atom(..) => self.simplify(f.clone()),
            PFormula::Not(a) => PFormula::not(self.qelim(a)?),
            PFormula::And(v) => PFormula::and(v.iter().map(|g| self.qelim(g)).collect::<Result<Vec<_>>>()?),
            PFormula::Or(v) => PFormula::or(v.iter().map(|g| self.qelim(g)).collect::<Result<Vec<_>>>()?),
            PFormula::Exists(..) | PFormula::Forall(..) => {
                let universal = matches!(f, PFormula::Forall(..));
                let mut block = Vec::new();
                let mut body = f;
                loop {
                    match (body, universal) {
                        (PFormula::Exists(x, b), false) | (PFormula::Forall(x, b), true) => {
                            block.push(*x);
                            body = b;
                        }
                        _ => break,
                    }
                }
                let inner = self.qelim(body)?;
                if universal {
                    PFormula::not(self.elim_block(block, PFormula::not(inner))?)
                } else {
                    self.elim_block(block, inner)?
                }
            }
        })
    }

    /// `exists block. f` for quantifier-free `f`.
    pub fn elim_block(&self, block: Vec<Var>, f: PFormula) -> Result<PFormula> {
        let f = self.simplify(f.nnf());
        let vars: Vec<Var> = block.into_iter().filter(|&v| f.mentions(v)).collect();
        if vars.is_empty() {
            return Ok(f);
        }
        if self.opts.presolve {
            if let PFormula::And(items) = &f {
                if let Some((v, sol)) = self.find_linear(&vars, items) {
                    self.stats.borrow_mut().presolved_vars += 1;
                    self.trace(|| format!("presolve {}", self.names.name(v)));
                    let next = substitute_linear(items, v, &sol);
                    let rest = vars.into_iter().filter(|&w| w != v).collect();
                    return self.elim_block(rest, PFormula::and(next));
                }
            }
        }
        match f.dnf(self.opts.dnf_cap) {
            Some(disjuncts) => {
                let mut out = Vec::with_capacity(disjuncts.len());
                for d in disjuncts {
                    let r = self.elim_conj(vars.clone(), d)?;
                    if r == PFormula::True {
                        return Ok(PFormula::True);
                    }
                    out.push(r);
                }
                Ok(PFormula::or(out))
            }
            None => {
                let v = self.choose(&vars, &[f.clone()]);
                let g = self.basic(v, &f)?;
                self.elim_block(vars.into_iter().filter(|&w| w != v).collect(), g)
            }
        }
    }

    fn elim_conj(&self, vars: Vec<Var>, lits: Vec<PFormula>) -> Result<PFormula> {
        let vars: Vec<Var> = vars
            .into_iter()
            .filter(|&v| lits.iter().any(|l| l.mentions(v)))
            .collect();
        if vars.is_empty() {
            return Ok(PFormula::and(lits));
        }
        if self.opts.presolve {
            if let Some((v, sol)) = self.find_linear(&vars, &lits) {
                self.stats.borrow_mut().presolved_vars += 1;
                self.trace(|| format!("presolve {}", self.names.name(v)));
                let next = substitute_linear(&lits, v, &sol);
                let rest = vars.into_iter().filter(|&w| w != v).collect();
                return self.elim_block(rest, PFormula::and(next));
            }
        }
        let v = self.choose(&vars, &lits);
        let (with, without): (Vec<_>, Vec<_>) = lits.into_iter().partition(|l| l.mentions(v));
        let g = self.basic(v, &PFormula::and(with))?;
        let rest: Vec<Var> = vars.into_iter().filter(|&w| w != v).collect();
        let mut all = without;
        all.push(g);
        self.elim_block(rest, PFormula::and(all))
    }

    fn basic(&self, v: Var, f: &PFormula) -> Result<PFormula> {
        self.trace(|| format!("eliminate {} from {} atoms", self.names.name(v), f.atom_polys().len()));
        let engine = Engine {
            x: v,
            infinitesimal: self.opts.infinitesimal,
            budget: self.opts.budget,
            stats: &self.stats,
        };
        match engine.exists(f) {
            Ok(g) => Ok(self.simplify(g)),
            Err(Fail::Budget) => Err(self.budget_error()),
            Err(Fail::Inconsistent) => Err(Error::Internal("inconsistent sign matrix".into())),
        }
    }

    /// Variable of least degree, then fewest occurrences.
    fn choose(&self, vars: &[Var], lits: &[PFormula]) -> Var {
        let key = |v: Var| {
            let polys: Vec<MultiPoly> = lits.iter().flat_map(|l| l.atom_polys()).collect();
            let deg = polys.iter().map(|p| p.degree_in(v)).max().unwrap_or(0);
            let occ = polys.iter().filter(|p| p.contains(v)).count();
            (deg, occ, v)
        };
        *vars.iter().min_by_key(|&&v| key(v)).expect("nonempty")
    }

    /// A literal `c*v + r = 0` with `c` of known nonzero sign.
    fn find_linear(&self, vars: &[Var], lits: &[PFormula]) -> Option<(Var, Linear)> {
        for &v in vars {
            for l in lits {
                if let PFormula::Atom(p, PRel::Eq) = l {
                    if p.degree_in(v) != 1 {
                        continue;
                    }
                    let u = p.to_univariate(v);
                    let c = &u[1];
                    if self.known_nonzero(c) {
                        return Some((v, Linear { c: c.clone(), r: u[0].clone() }));
                    }
                }
            }
        }
        None
    }

    fn known_nonzero(&self, c: &MultiPoly) -> bool {
        if let Some(k) = c.as_constant() {
            return k != num_traits::Zero::zero();
        }
        self.opts.infinitesimal && infinitesimal_sign(c).is_some_and(|s| s != Sign::Zero)
    }
}

/// `v = -r/c`.
pub(crate) struct Linear {
    pub c: MultiPoly,
    pub r: MultiPoly,
}

/// Substitutes `v = -r/c` into polynomial literals, clearing the denominator
/// with an even power of `c` so that every relation keeps its direction.
pub(crate) fn substitute_linear(lits: &[PFormula], v: Var, sol: &Linear) -> Vec<PFormula> {
    lits.iter()
        .map(|l| {
            l.map_atoms(&mut |p, rel| {
                if !p.contains(v) {
                    return PFormula::atom(p.clone(), rel);
                }
                let u = p.to_univariate(v);
                let d = u.len() - 1;
                let e = if rel == PRel::Eq { d } else { d + d % 2 };
                let neg_r = -&sol.r;
                let mut acc = MultiPoly::zero();
                for (k, coeff) in u.iter().enumerate() {
                    let term = &(coeff * &neg_r.pow(k as u32)) * &sol.c.pow((e - k) as u32);
                    acc = &acc + &term;
                }
                PFormula::atom(acc, rel)
            })
        })
        .collect()
}
