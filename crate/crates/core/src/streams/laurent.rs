use super::TruncSeries;
use crate::algebra::{pow2, Rational, Sign, UniPoly};
use crate::error::{Error, Result};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

/// `v(f)`: index of the first nonzero coefficient, infinite for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

/// A rational function `num/den` read as a formal Laurent series in `X`.
///
/// Canonical: coprime, and the lowest nonzero coefficient of `den` is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentRational {
    num: UniPoly,
    den: UniPoly,
}

impl LaurentRational {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let lo = den.lowest();
        if !lo.is_one() {
            let inv = Rational::one() / lo;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(LaurentRational { num, den })
    }

    pub fn zero() -> Self {
        LaurentRational {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn x() -> Self {
        Self::from_poly(UniPoly::x())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }

    pub fn from_poly(p: UniPoly) -> Self {
        LaurentRational {
            num: p,
            den: UniPoly::one(),
        }
    }

    /// `X^k` for any integer `k`.
    pub fn x_pow(k: i64) -> Self {
        if k >= 0 {
            Self::from_poly(UniPoly::monomial(Rational::one(), k as usize))
        } else {
            LaurentRational {
                num: UniPoly::one(),
                den: UniPoly::monomial(Rational::one(), k.unsigned_abs() as usize),
            }
        }
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The value as a rational when the stream is constant.
    pub fn as_rational(&self) -> Option<Rational> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(&self.num + &o.num, self.den.clone()).expect("nonzero den");
        }
        Self::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
        .expect("nonzero den")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentRational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero den")
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivByZero);
        }
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.mul(&Self::constant(c.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        Self::new(self.num.pow(e), self.den.pow(e)).expect("nonzero den")
    }

    pub fn valuation(&self) -> Valuation {
        match (self.num.low_degree(), self.den.low_degree()) {
            (Some(a), Some(b)) => Valuation::Finite(a as i64 - b as i64),
            _ => Valuation::Infinity,
        }
    }

    /// Coefficient at the valuation index; zero for the zero stream.
    pub fn lead_coeff(&self) -> Rational {
        self.num.lowest()
    }

    /// Sign in the positive-cone order.
    pub fn sign(&self) -> Sign {
        Sign::of(&self.lead_coeff())
    }

    /// `|f| = 2^(-v(f))`, and 0 for the zero stream.
    pub fn abs_val(&self) -> Rational {
        match self.valuation() {
            Valuation::Finite(v) => pow2(-v),
            Valuation::Infinity => Rational::zero(),
        }
    }

    pub fn metric_d(&self, o: &Self) -> Rational {
        self.sub(o).abs_val()
    }

    /// Total order with positive cone "lowest coefficient positive".
    pub fn compare(&self, o: &Self) -> Ordering {
        match o.sub(self).sign() {
            Sign::Pos => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Neg => Ordering::Greater,
        }
    }

    pub fn is_power_series(&self) -> bool {
        self.valuation() >= Valuation::Finite(0)
    }

    /// First `n` coefficients from index `v(f)` (from 0 for the zero stream).
    pub fn coeffs(&self, n: usize) -> TruncSeries {
        let (a, b) = match (self.num.low_degree(), self.den.low_degree()) {
            (Some(a), Some(b)) => (a, b),
            _ => return TruncSeries::new(0, vec![Rational::zero(); n]),
        };
        let nn = self.num.unshift(a);
        let dd = self.den.unshift(b);
        let d0 = dd.coeff(0);
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = nn.coeff(k);
            for i in 1..=k.min(dd.degree().unwrap_or(0)) {
                c -= dd.coeff(i) * &out[k - i];
            }
            out.push(c / &d0);
        }
        TruncSeries::new(a as i64 - b as i64, out)
    }

    /// Coefficient of `X^k`.
    pub fn coeff(&self, k: i64) -> Rational {
        match self.valuation() {
            Valuation::Infinity => Rational::zero(),
            Valuation::Finite(v) if k < v => Rational::zero(),
            Valuation::Finite(v) => self.coeffs((k - v + 1) as usize).coeffs()[(k - v) as usize].clone(),
        }
    }

    pub fn hd(&self) -> Result<Rational> {
        if !self.is_power_series() {
            return Err(Error::NotAPowerSeries);
        }
        Ok(self.num.coeff(0) / self.den.coeff(0))
    }

    pub fn tl(&self) -> Result<Self> {
        let h = self.hd()?;
        self.sub(&Self::constant(h)).div(&Self::x())
    }

    /// `r + X*f`.
    pub fn cons(r: &Rational, f: &Self) -> Self {
        Self::constant(r.clone()).add(&Self::x().mul(f))
    }
}

fn paren(p: &UniPoly) -> String {
    if p.term_count() > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}

impl fmt::Display for LaurentRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return write!(f, "{}", self.num);
        }
        write!(f, "{}/{}", paren(&self.num), paren(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio};

    fn geo() -> LaurentRational {
        LaurentRational::new(UniPoly::one(), UniPoly::from_ints(&[1, -1])).unwrap()
    }

    fn fib() -> LaurentRational {
        LaurentRational::new(UniPoly::x(), UniPoly::from_ints(&[1, -1, -1])).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&i| rat(i)).collect()
    }

    #[test]
    fn field_examples() {
        assert_eq!(
            geo().add(&geo()),
            LaurentRational::new(UniPoly::from_ints(&[2]), UniPoly::from_ints(&[1, -1])).unwrap()
        );
        assert_eq!(geo().mul(&LaurentRational::from_poly(UniPoly::from_ints(&[1, -1]))), LaurentRational::one());
        assert_eq!(LaurentRational::x().mul(&geo()).to_string(), "X/(1-X)");
        assert_eq!(geo().div(&LaurentRational::zero()), Err(Error::DivByZero));
    }

    #[test]
    fn canonical_denominator() {
        let f = LaurentRational::new(UniPoly::from_ints(&[0, 4]), UniPoly::from_ints(&[0, 0, 2, -2])).unwrap();
        assert_eq!(f.den(), &UniPoly::from_ints(&[0, 1, -1]));
        assert_eq!(f.num(), &UniPoly::from_ints(&[2]));
        assert_eq!(f.to_string(), "2/(X-X^2)");
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(geo().coeffs(5).coeffs(), ints(&[1, 1, 1, 1, 1]).as_slice());
        assert_eq!(geo().pow(2).coeffs(4).coeffs(), ints(&[1, 2, 3, 4]).as_slice());
        let f = fib().coeffs(7);
        assert_eq!(f.start(), 1);
        assert_eq!(fib().coeff(0), rat(0));
        let from0: Vec<Rational> = (0..7).map(|k| fib().coeff(k)).collect();
        assert_eq!(from0, ints(&[0, 1, 1, 2, 3, 5, 8]));
    }

    #[test]
    fn valuation_examples() {
        let f = LaurentRational::x_pow(2).mul(&geo());
        assert_eq!(f.valuation(), Valuation::Finite(2));
        assert_eq!(LaurentRational::zero().valuation(), Valuation::Infinity);
        assert_eq!(LaurentRational::x_pow(-1).valuation(), Valuation::Finite(-1));
        assert_eq!(LaurentRational::x_pow(2).abs_val(), ratio(1, 4));
        assert_eq!(LaurentRational::zero().abs_val(), rat(0));
        assert_eq!(LaurentRational::x_pow(-1).abs_val(), rat(2));
    }

    #[test]
    fn metric_examples() {
        assert_eq!(geo().metric_d(&geo()), rat(0));
        // oracle: (1/(1-X)) - 1 has coefficients (0, 1, 1, ...)
        let diff = geo().sub(&LaurentRational::one());
        assert_eq!(diff.coeff(0), rat(0));
        assert_eq!(diff.coeff(1), rat(1));
        assert_eq!(geo().metric_d(&LaurentRational::one()), ratio(1, 2));
        assert_eq!(LaurentRational::x().metric_d(&LaurentRational::x_pow(2)), ratio(1, 2));
    }

    #[test]
    fn order_examples() {
        assert_eq!(LaurentRational::zero().compare(&LaurentRational::x()), Ordering::Less);
        let eps = LaurentRational::x().div(&LaurentRational::from_poly(UniPoly::from_ints(&[1, 1]))).unwrap();
        for n in 1..=10 {
            let inv_n = LaurentRational::constant(ratio(1, n));
            assert_eq!(eps.compare(&inv_n), Ordering::Less);
        }
        assert_eq!(LaurentRational::x_pow(2).compare(&LaurentRational::x()), Ordering::Less);
    }

    #[test]
    fn head_tail_examples() {
        assert_eq!(fib().hd(), Ok(rat(0)));
        let t = fib().tl().unwrap();
        assert_eq!(t, LaurentRational::new(UniPoly::one(), UniPoly::from_ints(&[1, -1, -1])).unwrap());
        // shift oracle on 8-term prefixes
        for k in 0..8 {
            assert_eq!(t.coeff(k), fib().coeff(k + 1));
        }
        assert_eq!(LaurentRational::cons(&rat(0), &geo()), LaurentRational::x().mul(&geo()));
        assert_eq!(LaurentRational::x_pow(-1).hd(), Err(Error::NotAPowerSeries));
    }
}
