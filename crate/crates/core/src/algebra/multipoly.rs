use super::{Rational, Sign, UniPoly};
use crate::error::{Error, Result};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

/// Index of a polynomial variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

/// Power product: `(variable, exponent)` pairs sorted by variable, all
/// exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Same power product with `v` removed.
    pub fn without(&self, v: Var) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic by variable index.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let (mut i, mut j) = (0, 0);
                loop {
                    match (self.0.get(i), other.0.get(j)) {
                        (None, None) => return Ordering::Equal,
                        (Some(_), None) => return Ordering::Greater,
                        (None, Some(_)) => return Ordering::Less,
                        (Some(&(a, ea)), Some(&(b, eb))) => match a.cmp(&b) {
                            Ordering::Less => return Ordering::Greater,
                            Ordering::Greater => return Ordering::Less,
                            Ordering::Equal => match ea.cmp(&eb) {
                                Ordering::Equal => {
                                    i += 1;
                                    j += 1;
                                }
                                o => return o,
                            },
                        },
                    }
                }
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        MultiPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = MultiPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.degree_in(v) > 0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Leading term under the graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients in `v`, indexed by the power of `v`.
    pub fn to_univariate(&self, v: Var) -> Vec<MultiPoly> {
        let mut out = vec![MultiPoly::zero(); self.degree_in(v) as usize + 1];
        if self.is_zero() {
            return Vec::new();
        }
        for (m, c) in &self.terms {
            out[m.degree_in(v) as usize].add_term(m.without(v), c.clone());
        }
        out
    }

    pub fn from_univariate(v: Var, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let m = Monomial::from_pairs(vec![(v, k as u32)]);
            for (cm, cc) in &c.terms {
                out.add_term(cm.mul(&m), cc.clone());
            }
        }
        out
    }

    /// Coefficient of the highest power of `v`.
    pub fn head(&self, v: Var) -> MultiPoly {
        self.to_univariate(v).pop().unwrap_or_default()
    }

    /// Drops the highest power of `v`.
    pub fn behead(&self, v: Var) -> MultiPoly {
        let mut u = self.to_univariate(v);
        u.pop();
        MultiPoly::from_univariate(v, &u)
    }

    pub fn derivative(&self, v: Var) -> MultiPoly {
        MultiPoly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let e = m.degree_in(v);
            (e > 0).then(|| {
                let pairs = m
                    .0
                    .iter()
                    .map(|&(w, k)| if w == v { (w, k - 1) } else { (w, k) })
                    .collect();
                (Monomial::from_pairs(pairs), c * Rational::from_integer(e.into()))
            })
        }))
    }

    /// Pseudo-division in `v`: returns `(quotient, remainder, multiplier)` with
    /// `multiplier * self = quotient * divisor + remainder`, where
    /// `deg_v(remainder) < deg_v(divisor)` and the multiplier is
    /// `lc_v(divisor)^(deg_v(self) - deg_v(divisor) + 1)` (or 1 if the
    /// dividend already has lower degree).
    pub fn pseudo_division(&self, divisor: &MultiPoly, v: Var) -> Result<(MultiPoly, MultiPoly, MultiPoly)> {
        let dq = divisor.degree_in(v);
        if dq == 0 {
            return Err(Error::DegenerateDivisor);
        }
        let (quot, rem, k) = self.pseudo_divide_raw(divisor, v);
        let dp = self.degree_in(v);
        let delta = if dp >= dq { dp - dq + 1 } else { 0 };
        let lc = divisor.head(v);
        let extra = lc.pow(delta - k);
        Ok((&quot * &extra, &rem * &extra, lc.pow(delta)))
    }

    /// Pseudo-division stopping as soon as the remainder degree drops; returns
    /// the number `k` of multiplications by the divisor's leading coefficient.
    pub fn pseudo_divide_raw(&self, divisor: &MultiPoly, v: Var) -> (MultiPoly, MultiPoly, u32) {
        let dq = divisor.degree_in(v);
        let lc = divisor.head(v);
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        let mut k = 0;
        while !rem.is_zero() && rem.degree_in(v) >= dq {
            let dr = rem.degree_in(v);
            let c = rem.head(v);
            let shift = Monomial::from_pairs(vec![(v, dr - dq)]);
            let cx = c.mul_monomial(&shift);
            rem = &(&rem * &lc) - &(&cx * divisor);
            quot = &(&quot * &lc) + &cx;
            k += 1;
        }
        (quot, rem, k)
    }

    /// Substitutes `v := p`.
    pub fn substitute(&self, v: Var, p: &MultiPoly) -> MultiPoly {
        if !self.contains(v) {
            return self.clone();
        }
        let u = self.to_univariate(v);
        // Horner in p
        let mut acc = MultiPoly::zero();
        for c in u.iter().rev() {
            acc = &(&acc * p) + c;
        }
        acc
    }

    pub fn eval(&self, assignment: &HashMap<Var, Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let x = assignment
                    .get(&v)
                    .ok_or_else(|| Error::UnboundVariable(format!("v{}", v.0)))?;
                t *= num_traits::pow(x.clone(), e as usize);
            }
            total += t;
        }
        Ok(total)
    }

    pub fn eval_sign(&self, assignment: &HashMap<Var, Rational>) -> Result<Sign> {
        Ok(Sign::of(&self.eval(assignment)?))
    }

    /// Partial evaluation: substitutes rationals for the assigned variables.
    pub fn eval_partial(&self, assignment: &HashMap<Var, Rational>) -> MultiPoly {
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in &m.0 {
                match assignment.get(&v) {
                    Some(x) => coeff *= num_traits::pow(x.clone(), e as usize),
                    None => rest.push((v, e)),
                }
            }
            (Monomial(rest), coeff)
        }))
    }

    /// Views a polynomial in the single variable `v` as a `UniPoly`.
    pub fn to_unipoly(&self, v: Var) -> Option<UniPoly> {
        if self.vars().iter().any(|&w| w != v) {
            return None;
        }
        Some(UniPoly::from_coeffs(
            self.to_univariate(v)
                .iter()
                .map(|c| c.as_constant().unwrap_or_default())
                .collect(),
        ))
    }

    pub fn from_unipoly(p: &UniPoly, v: Var) -> MultiPoly {
        MultiPoly::from_terms(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| (Monomial::from_pairs(vec![(v, k as u32)]), c.clone())),
        )
    }

    /// Divides by the leading (graded-lex) coefficient. Returns the monic
    /// polynomial and whether the sign flipped.
    pub fn monic(&self) -> (MultiPoly, bool) {
        match self.leading_term() {
            None => (self.clone(), false),
            Some((_, lc)) => {
                let neg = lc < &Rational::zero();
                (self.scale(&(Rational::one() / lc)), neg)
            }
        }
    }

    /// Renames variables.
    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> MultiPoly {
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            (
                Monomial::from_pairs(m.0.iter().map(|&(v, e)| (f(v), e)).collect()),
                c.clone(),
            )
        }))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}
