use super::ast::{Formula, Sort, Term};
use crate::algebra::fmt_rational;
use std::fmt;

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Sub(..) => 1,
        Term::Mul(..) => 2,
        Term::Neg(_) => 3,
        Term::Rat(c) if c < &num_traits::Zero::zero() => 3,
        _ => 4,
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    let p = term_prec(t);
    if p < min {
        f.write_str("(")?;
    }
    match t {
        Term::Var(v) => f.write_str(v)?,
        Term::Rat(c) => f.write_str(&fmt_rational(c))?,
        Term::X => f.write_str("X")?,
        Term::Stream(s) => write!(f, "[[{s}]]")?,
        Term::Add(a, b) => {
            write_term(f, a, 1)?;
            f.write_str(" + ")?;
            write_term(f, b, 2)?;
        }
        Term::Sub(a, b) => {
            write_term(f, a, 1)?;
            f.write_str(" - ")?;
            write_term(f, b, 2)?;
        }
        Term::Mul(a, b) => {
            write_term(f, a, 2)?;
            f.write_str("*")?;
            write_term(f, b, 3)?;
        }
        Term::Neg(a) => {
            f.write_str("-")?;
            // `--x` would not lex as two signs after a binary minus
            write_term(f, a, 4)?;
        }
        Term::Hd(a) => {
            f.write_str("hd(")?;
            write_term(f, a, 0)?;
            f.write_str(")")?;
        }
        Term::Tl(a) => {
            f.write_str("tl(")?;
            write_term(f, a, 0)?;
            f.write_str(")")?;
        }
        Term::Cons(a, b) => {
            f.write_str("cons(")?;
            write_term(f, a, 0)?;
            f.write_str(", ")?;
            write_term(f, b, 0)?;
            f.write_str(")")?;
        }
    }
    if p < min {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::S => "S",
            Sort::L => "L",
        })
    }
}

// 0: quantifier / iff, 1: implies, 2: or, 3: and, 4: negation and atoms
fn formula_prec(g: &Formula) -> u8 {
    match g {
        Formula::Forall(..) | Formula::Exists(..) | Formula::Iff(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, g: &Formula, min: u8) -> fmt::Result {
    let p = formula_prec(g);
    if p < min {
        f.write_str("(")?;
    }
    match g {
        Formula::True => f.write_str("true")?,
        Formula::False => f.write_str("false")?,
        Formula::Atom(a) => {
            write_term(f, &a.lhs, 0)?;
            write!(f, " {} ", a.rel.symbol())?;
            write_term(f, &a.rhs, 0)?;
        }
        Formula::Not(a) => {
            f.write_str("~")?;
            write_formula(f, a, 4)?;
        }
        Formula::And(a, b) => {
            write_formula(f, a, 3)?;
            f.write_str(" /\\ ")?;
            write_formula(f, b, 4)?;
        }
        Formula::Or(a, b) => {
            write_formula(f, a, 2)?;
            f.write_str(" \\/ ")?;
            write_formula(f, b, 3)?;
        }
        Formula::Implies(a, b) => {
            write_formula(f, a, 2)?;
            f.write_str(" -> ")?;
            write_formula(f, b, 1)?;
        }
        Formula::Iff(a, b) => {
            write_formula(f, a, 1)?;
            f.write_str(" <-> ")?;
            write_formula(f, b, 0)?;
        }
        Formula::Forall(v, s, b) => {
            write!(f, "forall {v}:{s}. ")?;
            write_formula(f, b, 0)?;
        }
        Formula::Exists(v, s, b) => {
            write!(f, "exists {v}:{s}. ")?;
            write_formula(f, b, 0)?;
        }
    }
    if p < min {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}
