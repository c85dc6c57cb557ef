use crate::algebra::{fmt_rational, rational_sqrt, Rational};
use crate::error::{Error, Result};
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Series known modulo `X^(start + order)`: the coefficients of
/// `X^start, ..., X^(start + order - 1)` are exact, the rest unknown.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    start: i64,
    coeffs: Vec<Rational>,
}

impl TruncSeries {
    pub fn new(start: i64, coeffs: Vec<Rational>) -> Self {
        TruncSeries { start, coeffs }
    }

    pub fn from_ints(start: i64, coeffs: &[i64]) -> Self {
        Self::new(start, coeffs.iter().map(|&c| crate::algebra::rat(c)).collect())
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// First index whose coefficient is unknown.
    pub fn end(&self) -> i64 {
        self.start + self.coeffs.len() as i64
    }

    /// Coefficient of `X^k`; `None` beyond the trusted window.
    pub fn coeff(&self, k: i64) -> Option<Rational> {
        if k >= self.end() {
            None
        } else if k < self.start {
            Some(Rational::zero())
        } else {
            Some(self.coeffs[(k - self.start) as usize].clone())
        }
    }

    fn window(&self, start: i64, end: i64) -> Vec<Rational> {
        (start..end).map(|k| self.coeff(k).unwrap_or_default()).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        let start = self.start.min(o.start);
        let end = self.end().min(o.end()).max(start);
        let coeffs = (start..end)
            .map(|k| self.coeff(k).unwrap_or_default() + o.coeff(k).unwrap_or_default())
            .collect();
        Self::new(start, coeffs)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.start, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.start, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Discrete convolution on the trusted window.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut out = vec![Rational::zero(); n];
        for (k, slot) in out.iter_mut().enumerate() {
            for i in 0..=k {
                *slot += &self.coeffs[i] * &o.coeffs[k - i];
            }
        }
        Self::new(self.start + o.start, out)
    }

    /// Drops known-zero leading coefficients.
    pub fn strip(&self) -> Self {
        let z = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        Self::new(self.start + z as i64, self.coeffs[z..].to_vec())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let b = o.strip();
        if b.coeffs.is_empty() {
            return Err(Error::InsufficientOrder);
        }
        let n = self.order().min(b.order());
        let b0 = &b.coeffs[0];
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = self.coeffs[k].clone();
            for i in 1..=k {
                c -= &b.coeffs[i] * &out[k - i];
            }
            out.push(c / b0);
        }
        Ok(Self::new(self.start - b.start, out))
    }

    /// Square root to `n` coefficients by equating coefficients in `g*g = f`.
    pub fn sqrt_prefix(&self, n: usize) -> Result<Self> {
        let f = self.strip();
        let Some(f0) = f.coeffs.first() else {
            return Err(Error::InsufficientOrder);
        };
        if !f0.is_positive() || f.start % 2 != 0 {
            return Err(Error::NoRealRoot);
        }
        let g0 = rational_sqrt(f0).ok_or_else(|| Error::IrrationalHead(fmt_rational(f0)))?;
        if f.order() < n {
            return Err(Error::InsufficientOrder);
        }
        let two_g0 = &g0 + &g0;
        let mut g = vec![g0];
        for k in 1..n {
            let mut c = f.coeffs[k].clone();
            for i in 1..k {
                c -= &g[i] * &g[k - i];
            }
            g.push(c / &two_g0);
        }
        Ok(Self::new(f.start / 2, g))
    }

    /// Restricts to the first `n` trusted coefficients.
    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.start, self.coeffs.iter().take(n).cloned().collect())
    }

    /// Coefficients re-based at `start` (zeros before the current start).
    pub fn rebase(&self, start: i64) -> Self {
        assert!(start <= self.start);
        Self::new(start, self.window(start, self.end()))
    }
}

/// First `n` Catalan numbers from `2/(1 + sqrt(1 - 4X))`.
pub fn catalan(n: usize) -> TruncSeries {
    let mut one_minus_4x = vec![Rational::zero(); n];
    one_minus_4x[0] = Rational::one();
    if n > 1 {
        one_minus_4x[1] = Rational::from_integer((-4).into());
    }
    let root = TruncSeries::new(0, one_minus_4x)
        .sqrt_prefix(n)
        .expect("head is 1");
    let mut one = vec![Rational::zero(); n];
    one[0] = Rational::one();
    let den = root.add(&TruncSeries::new(0, one.clone()));
    TruncSeries::new(0, one)
        .scale(&Rational::from_integer(2.into()))
        .div(&den)
        .expect("head is 2")
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.coeffs.iter().map(fmt_rational).collect();
        parts.push("...".into());
        write!(f, "({}) @ start={}", parts.join(", "), self.start)
    }
}
