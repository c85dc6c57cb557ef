use super::{Rational, Sign, UniPoly};
use crate::error::{Error, Result};
use num_traits::{One, Zero};

/// Isolating interval for one real root: either an exact rational root
/// (`lo == hi`) or an open interval `(lo, hi)` containing exactly one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

/// Standard Sturm chain `p, p', -rem(p, p'), ...`.
pub fn sturm_sequence(p: &UniPoly) -> Vec<UniPoly> {
    let mut seq = vec![p.clone()];
    if p.is_zero() {
        return seq;
    }
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let r = -&seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r);
    }
    seq
}

fn sign_changes(seq: &[UniPoly], x: &Rational) -> usize {
    let signs: Vec<Sign> = seq
        .iter()
        .map(|q| q.sign_at(x))
        .filter(|&s| s != Sign::Zero)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of `p` in the open interval `(a, b)`.
pub fn sturm_count(p: &UniPoly, a: &Rational, b: &Rational) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::EndpointRoot);
    }
    if p.sign_at(a) == Sign::Zero || p.sign_at(b) == Sign::Zero {
        return Err(Error::EndpointRoot);
    }
    if a >= b || p.is_constant() {
        return Ok(0);
    }
    let seq = sturm_sequence(&p.square_free());
    Ok(sign_changes(&seq, a) - sign_changes(&seq, b))
}

/// Counts sign changes of `p` on a grid refined until every cell is
/// narrower than `width`. Exact for square-free `p` once `width` is below
/// the root separation, so it serves as an independent check.
pub fn count_roots_bisection(p: &UniPoly, a: &Rational, b: &Rational, width: &Rational) -> usize {
    let sf = p.square_free();
    let mut count = 0;
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((lo, hi)) = stack.pop() {
        let (sl, sh) = (sf.sign_at(&lo), sf.sign_at(&hi));
        if &(&hi - &lo) < width {
            if sl != Sign::Zero && sh != Sign::Zero && sl != sh {
                count += 1;
            }
            // an exact grid root belongs to the cell it closes on the left
            if sh == Sign::Zero && &hi != b {
                count += 1;
            }
            continue;
        }
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    count
}

/// Isolates every real root of `p` in increasing order.
pub fn isolate_roots(p: &UniPoly) -> Vec<RootInterval> {
    if p.is_zero() || p.is_constant() {
        return Vec::new();
    }
    let sf = p.square_free();
    let seq = sturm_sequence(&sf);
    let bound = sf.root_bound() + Rational::one();
    let mut out = Vec::new();
    split(&sf, &seq, -bound.clone(), bound, &mut out);
    out
}

/// Roots in the open interval `(lo, hi)`.
fn split(p: &UniPoly, seq: &[UniPoly], lo: Rational, hi: Rational, out: &mut Vec<RootInterval>) {
    let mut n = sign_changes(seq, &lo) - sign_changes(seq, &hi);
    if p.sign_at(&hi) == Sign::Zero {
        n -= 1;
    }
    if n == 0 {
        return;
    }
    if n == 1 && p.sign_at(&lo) != Sign::Zero && p.sign_at(&hi) != Sign::Zero {
        out.push(RootInterval { lo, hi });
        return;
    }
    let two = Rational::from_integer(2.into());
    let mid = (&lo + &hi) / &two;
    split(p, seq, lo, mid.clone(), out);
    if p.sign_at(&mid) == Sign::Zero {
        out.push(RootInterval {
            lo: mid.clone(),
            hi: mid.clone(),
        });
    }
    split(p, seq, mid, hi, out);
}

/// Narrows an isolating interval of the square-free `p` until it is shorter
/// than `width` or hits the root exactly.
pub fn refine(p: &UniPoly, iv: &RootInterval, width: &Rational) -> RootInterval {
    let mut iv = iv.clone();
    let s_lo = p.sign_at(&iv.lo);
    while !iv.is_exact() && &(&iv.hi - &iv.lo) >= width {
        let mid = (&iv.lo + &iv.hi) / Rational::from_integer(2.into());
        let s = p.sign_at(&mid);
        if s == Sign::Zero {
            return RootInterval {
                lo: mid.clone(),
                hi: mid,
            };
        }
        if s == s_lo {
            iv.lo = mid;
        } else {
            iv.hi = mid;
        }
    }
    iv
}

/// Sign of `q` at the root isolated by `iv` (a root of square-free `p`).
pub fn sign_at_root(p: &UniPoly, iv: &RootInterval, q: &UniPoly) -> Sign {
    if iv.is_exact() {
        return q.sign_at(&iv.lo);
    }
    let g = p.gcd(q);
    if !g.is_constant() && g.sign_at(&iv.lo) != g.sign_at(&iv.hi) {
        return Sign::Zero;
    }
    // q has no root at the isolated point; shrink until q has no root nearby
    let mut iv = iv.clone();
    let mut width = (&iv.hi - &iv.lo) / Rational::from_integer(2.into());
    loop {
        if iv.is_exact() {
            return q.sign_at(&iv.lo);
        }
        let ql = q.sign_at(&iv.lo);
        if ql != Sign::Zero && q.sign_at(&iv.hi) != Sign::Zero {
            if let Ok(0) = sturm_count(q, &iv.lo, &iv.hi) {
                return ql;
            }
        }
        iv = refine(p, &iv, &width);
        width /= Rational::from_integer(2.into());
        if width.is_zero() {
            width = Rational::one();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio};

    #[test]
    fn isolation_with_a_root_at_a_midpoint() {
        // bisection of (-4, 4) hits the root 0 first
        let p = UniPoly::from_ints(&[0, 9, -16]);
        let ivs = isolate_roots(&p);
        assert_eq!(ivs.len(), 2);
        assert!(ivs[0].is_exact() && ivs[0].lo == rat(0));
        assert!(ivs[1].lo < ratio(9, 16) && ratio(9, 16) < ivs[1].hi);
        assert_eq!(sign_at_root(&p, &ivs[1], &UniPoly::from_ints(&[-1, 2])), Sign::Pos);
    }

    #[test]
    fn count_examples() {
        let p = UniPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(sturm_count(&p, &rat(0), &rat(2)), Ok(1));
        assert_eq!(sturm_count(&UniPoly::from_ints(&[1, 0, 1]), &rat(-10), &rat(10)), Ok(0));
        assert_eq!(sturm_count(&UniPoly::from_ints(&[-1, 0, 1]), &rat(-2), &rat(2)), Ok(2));
        assert_eq!(
            sturm_count(&UniPoly::from_ints(&[-1, 0, 1]), &rat(1), &rat(2)),
            Err(Error::EndpointRoot)
        );
    }

    #[test]
    fn repeated_roots_counted_once() {
        let p = &UniPoly::from_ints(&[-1, 1]).pow(3) * &UniPoly::from_ints(&[3, 1]);
        assert_eq!(sturm_count(&p, &rat(-5), &rat(5)), Ok(2));
    }

    #[test]
    fn isolation_finds_all_roots() {
        // (x-1)(x-1/2)(x+3)(x^2-2)
        let p = &(&(&UniPoly::from_ints(&[-1, 1]) * &UniPoly::from_ints(&[-1, 2]))
            * &UniPoly::from_ints(&[3, 1]))
            * &UniPoly::from_ints(&[-2, 0, 1]);
        let roots = isolate_roots(&p);
        assert_eq!(roots.len(), 5);
        for w in roots.windows(2) {
            assert!(w[0].hi <= w[1].lo);
        }
        let sf = p.square_free();
        let sq2 = roots.iter().find(|r| r.lo > rat(1)).unwrap();
        let narrow = refine(&sf, sq2, &ratio(1, 1000));
        assert!(narrow.lo < ratio(1415, 1000) && narrow.hi > ratio(1414, 1000));
    }

    #[test]
    fn sign_at_algebraic_point() {
        let p = UniPoly::from_ints(&[-2, 0, 1]);
        let roots = isolate_roots(&p);
        let pos = roots.last().unwrap();
        assert_eq!(sign_at_root(&p, pos, &UniPoly::from_ints(&[-1, 1])), Sign::Pos);
        assert_eq!(sign_at_root(&p, pos, &UniPoly::from_ints(&[-2, 0, 1])), Sign::Zero);
        assert_eq!(sign_at_root(&p, &roots[0], &UniPoly::from_ints(&[0, 1])), Sign::Neg);
        assert_eq!(sign_at_root(&p, pos, &UniPoly::from_ints(&[-3, 0, 2])), Sign::Pos);
    }
}
