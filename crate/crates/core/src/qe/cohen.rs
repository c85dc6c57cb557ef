//! Sign-matrix elimination of one existential quantifier.
//!
//! For `exists x. phi` the polynomials of `phi` are closed under derivative
//! and sign-corrected pseudo-remainder in `x`; their joint sign table over
//! the real line is then assembled bottom-up, case-splitting on leading
//! coefficients whose sign is not yet known. The output is a quantifier-free
//! formula in the remaining variables.

use super::formula::{infinitesimal_sign, PFormula, PRel};
use crate::algebra::{MultiPoly, Sign, Var};
use crate::error::QeStats;
use std::cell::RefCell;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sg {
    Zero,
    Pos,
    Neg,
    Nonzero,
}

impl Sg {
    fn negate(self) -> Sg {
        match self {
            Sg::Pos => Sg::Neg,
            Sg::Neg => Sg::Pos,
            s => s,
        }
    }

    fn of(s: Sign) -> Sg {
        match s {
            Sign::Zero => Sg::Zero,
            Sign::Pos => Sg::Pos,
            Sign::Neg => Sg::Neg,
        }
    }

    fn to_sign(self) -> Option<Sign> {
        match self {
            Sg::Zero => Some(Sign::Zero),
            Sg::Pos => Some(Sign::Pos),
            Sg::Neg => Some(Sign::Neg),
            Sg::Nonzero => None,
        }
    }
}

pub(crate) enum Fail {
    /// The branch's sign assumptions are contradictory.
    Inconsistent,
    Budget,
}

type R = Result<PFormula, Fail>;
type Mat = Vec<Vec<Sg>>;
type Sgns = HashMap<MultiPoly, Sg>;

pub(crate) struct Engine<'a> {
    pub x: Var,
    pub infinitesimal: bool,
    pub budget: u64,
    pub stats: &'a RefCell<QeStats>,
}

impl Engine<'_> {
    /// Eliminates `exists x` from a quantifier-free formula.
    pub fn exists(&self, body: &PFormula) -> R {
        let pols = body.atom_polys();
        let cont = |mat: Mat| -> R {
            for row in &mat {
                let table: HashMap<&MultiPoly, Sign> = pols
                    .iter()
                    .zip(row.iter())
                    .map(|(p, s)| s.to_sign().map(|s| (p, s)).ok_or(Fail::Inconsistent))
                    .collect::<Result<_, _>>()?;
                if body.eval_with(&|p| table.get(p).copied()) == Some(true) {
                    return Ok(PFormula::True);
                }
            }
            Ok(PFormula::False)
        };
        self.casesplit(Vec::new(), &pols, &cont, &Sgns::new())
    }

    fn findsign(&self, sgns: &Sgns, p: &MultiPoly) -> Option<Sg> {
        if let Some(c) = p.as_constant() {
            return Some(Sg::of(Sign::of(&c)));
        }
        if self.infinitesimal {
            if let Some(s) = infinitesimal_sign(p) {
                return Some(Sg::of(s));
            }
        }
        let (m, flip) = p.monic();
        sgns.get(&m).map(|&s| if flip { s.negate() } else { s })
    }

    fn assertsign(&self, sgns: &Sgns, p: &MultiPoly, s: Sg) -> Sgns {
        let (m, flip) = p.monic();
        let mut out = sgns.clone();
        out.insert(m, if flip { s.negate() } else { s });
        out
    }

    fn split_zero(
        &self,
        sgns: &Sgns,
        pol: &MultiPoly,
        cont_z: &dyn Fn(&Sgns) -> R,
        cont_n: &dyn Fn(&Sgns) -> R,
    ) -> R {
        match self.findsign(sgns, pol) {
            Some(Sg::Zero) => cont_z(sgns),
            Some(_) => cont_n(sgns),
            None => {
                self.stats.borrow_mut().case_splits += 1;
                let eq = PFormula::atom(pol.clone(), PRel::Eq);
                let z = cont_z(&self.assertsign(sgns, pol, Sg::Zero))?;
                let n = cont_n(&self.assertsign(sgns, pol, Sg::Nonzero))?;
                Ok(PFormula::or([
                    PFormula::and([eq.clone(), z]),
                    PFormula::and([PFormula::not(eq), n]),
                ]))
            }
        }
    }

    fn split_sign(&self, sgns: &Sgns, pol: &MultiPoly, cont: &dyn Fn(&Sgns) -> R) -> R {
        match self.findsign(sgns, pol) {
            Some(Sg::Nonzero) => {
                self.stats.borrow_mut().case_splits += 1;
                let pos = PFormula::atom(-pol, PRel::Lt);
                let a = cont(&self.assertsign(sgns, pol, Sg::Pos))?;
                let b = cont(&self.assertsign(sgns, pol, Sg::Neg))?;
                Ok(PFormula::or([
                    PFormula::and([pos.clone(), a]),
                    PFormula::and([PFormula::not(pos), b]),
                ]))
            }
            _ => cont(sgns),
        }
    }

    fn split_trichotomy(
        &self,
        sgns: &Sgns,
        pol: &MultiPoly,
        cont_z: &dyn Fn(&Sgns) -> R,
        cont_pn: &dyn Fn(&Sgns) -> R,
    ) -> R {
        self.split_zero(sgns, pol, cont_z, &|s| self.split_sign(s, pol, cont_pn))
    }

    fn casesplit(&self, dun: Vec<MultiPoly>, pols: &[MultiPoly], cont: &dyn Fn(Mat) -> R, sgns: &Sgns) -> R {
        let Some((p, ops)) = pols.split_first() else {
            return self.matrix(dun, cont, sgns);
        };
        if !p.contains(self.x) {
            let f = |s: &Sgns| self.delconst(&dun, p, ops, cont, s);
            return self.split_trichotomy(sgns, p, &f, &f);
        }
        let head = p.head(self.x);
        self.split_trichotomy(
            sgns,
            &head,
            &|s| {
                let mut next = vec![p.behead(self.x)];
                next.extend_from_slice(ops);
                self.casesplit(dun.clone(), &next, cont, s)
            },
            &|s| {
                let mut d = dun.clone();
                d.push(p.clone());
                self.casesplit(d, ops, cont, s)
            },
        )
    }

    fn delconst(&self, dun: &[MultiPoly], p: &MultiPoly, ops: &[MultiPoly], cont: &dyn Fn(Mat) -> R, sgns: &Sgns) -> R {
        let s = self.findsign(sgns, p).ok_or(Fail::Inconsistent)?;
        let idx = dun.len();
        let cont2 = |m: Mat| {
            cont(
                m.into_iter()
                    .map(|mut row| {
                        row.insert(idx, s);
                        row
                    })
                    .collect(),
            )
        };
        self.casesplit(dun.to_vec(), ops, &cont2, sgns)
    }

    fn matrix(&self, dun: Vec<MultiPoly>, cont: &dyn Fn(Mat) -> R, sgns: &Sgns) -> R {
        if dun.is_empty() {
            return match cont(vec![Vec::new()]) {
                Err(Fail::Inconsistent) => Ok(PFormula::False),
                r => r,
            };
        }
        let x = self.x;
        let mut i = 0;
        for (k, q) in dun.iter().enumerate() {
            if q.degree_in(x) > dun[i].degree_in(x) {
                i = k;
            }
        }
        let p = &dun[i];
        let mut qs = vec![p.derivative(x)];
        qs.extend(dun[..i].iter().cloned());
        qs.extend(dun[i + 1..].iter().cloned());
        let gs: Vec<MultiPoly> = qs.iter().map(|q| self.pdivide_pos(sgns, p, q)).collect();
        {
            let mut st = self.stats.borrow_mut();
            st.polys_generated += 1 + gs.len() as u64;
            if st.polys_generated > self.budget {
                return Err(Fail::Budget);
            }
        }
        let cont2 = |m: Mat| {
            cont(
                m.into_iter()
                    .map(|l| {
                        let mut t = l[1..].to_vec();
                        t.insert(i, l[0]);
                        t
                    })
                    .collect(),
            )
        };
        let ded = |m: Mat| dedmatrix(&cont2, m);
        let mut all = qs;
        all.extend(gs);
        self.casesplit(Vec::new(), &all, &ded, sgns)
    }

    /// Remainder of `p` by `q` whose sign agrees with `p` wherever `q = 0`.
    fn pdivide_pos(&self, sgns: &Sgns, p: &MultiPoly, q: &MultiPoly) -> MultiPoly {
        let a = q.head(self.x);
        let (_, r, k) = p.pseudo_divide_raw(q, self.x);
        match self.findsign(sgns, &a) {
            Some(Sg::Pos) => r,
            _ if k % 2 == 0 => r,
            Some(Sg::Neg) => -&r,
            _ => &a * &r,
        }
    }
}

fn condense(ps: Mat) -> Mat {
    let mut out = Vec::with_capacity(ps.len());
    let mut it = ps.into_iter().peekable();
    loop {
        let Some(int) = it.next() else { break };
        match it.next() {
            None => out.push(int),
            Some(pt) => {
                if pt.contains(&Sg::Zero) {
                    out.push(int);
                    out.push(pt);
                }
            }
        }
    }
    out
}

fn inferisign(ps: Mat) -> Result<Mat, Fail> {
    let mut out = Vec::with_capacity(ps.len() * 2);
    out.push(ps[0].clone());
    let mut j = 1;
    while j + 1 < ps.len() {
        let (x, y) = (ps[j - 1][0], ps[j + 1][0]);
        let rest = &ps[j][1..];
        let with = |s: Sg| {
            let mut r = vec![s];
            r.extend_from_slice(rest);
            r
        };
        match (x, y) {
            (Sg::Pos, Sg::Neg) => {
                out.extend([with(Sg::Pos), with(Sg::Zero), with(Sg::Neg)]);
            }
            (Sg::Neg, Sg::Pos) => {
                out.extend([with(Sg::Neg), with(Sg::Zero), with(Sg::Pos)]);
            }
            (Sg::Pos, Sg::Pos | Sg::Zero) | (Sg::Zero, Sg::Pos) => out.push(with(Sg::Pos)),
            (Sg::Neg, Sg::Neg | Sg::Zero) | (Sg::Zero, Sg::Neg) => out.push(with(Sg::Neg)),
            _ => return Err(Fail::Inconsistent),
        }
        out.push(ps[j + 1].clone());
        j += 2;
    }
    Ok(out)
}

fn dedmatrix(cont: &dyn Fn(Mat) -> R, mat: Mat) -> R {
    let l = mat[0].len() / 2;
    let mat1 = condense(
        mat.into_iter()
            .map(|row| {
                let (pd, qd) = row.split_at(l);
                let s = pd.iter().position(|&s| s == Sg::Zero).map_or(Sg::Nonzero, |i| qd[i]);
                let mut r = vec![s];
                r.extend_from_slice(pd);
                r
            })
            .collect(),
    );
    let first = mat1[0][1].negate();
    let last = mat1[mat1.len() - 1][1];
    let mut mat2 = vec![vec![first]];
    mat2.extend(mat1);
    mat2.push(vec![last]);
    let mut mat3 = inferisign(mat2)?;
    mat3.pop();
    mat3.remove(0);
    let mat4 = mat3
        .into_iter()
        .map(|mut row| {
            row.remove(1);
            row
        })
        .collect();
    cont(condense(mat4))
}

/// Sign of `p` when `X` is read as a positive infinitesimal.
pub fn sign_at_infinitesimal(p: &crate::algebra::UniPoly) -> Sign {
    Sign::of(&p.lowest())
}
