use super::ast::{Formula, Rel, Sort, Term};
use crate::algebra::Rational;
use crate::error::{Error, Result};
use crate::streams::{parse_stream_at, LaurentRational};
use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational),
    Stream(LaurentRational),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Plus,
    Minus,
    Star,
    Caret,
    Eq,
    Neq,
    Le,
    Lt,
    Ge,
    Gt,
    And,
    Or,
    Implies,
    Iff,
    Not,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, col: &mut usize, n: usize| {
        *i += n;
        *col += n;
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(&mut i, &mut col, 1);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l0, c0) = (line, col);
        let rest = |k: usize| chars.get(i + k).copied();
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let three: String = chars[i..(i + 3).min(chars.len())].iter().collect();
        let (tok, n) = if three == "<->" {
            (Tok::Iff, 3)
        } else if two == "/\\" {
            (Tok::And, 2)
        } else if two == "\\/" {
            (Tok::Or, 2)
        } else if two == "->" {
            (Tok::Implies, 2)
        } else if two == "<=" {
            (Tok::Le, 2)
        } else if two == ">=" {
            (Tok::Ge, 2)
        } else if two == "!=" {
            (Tok::Neq, 2)
        } else if two == "[[" {
            let start = i + 2;
            let mut j = start;
            while j + 1 < chars.len() && !(chars[j] == ']' && chars[j + 1] == ']') {
                if chars[j] == '\n' {
                    return Err(syntax(l0, c0, "unterminated `[[`"));
                }
                j += 1;
            }
            if j + 1 >= chars.len() {
                return Err(syntax(l0, c0, "unterminated `[[`"));
            }
            let body: String = chars[start..j].iter().collect();
            let s = parse_stream_at(&body, l0, c0 + 2)?;
            (Tok::Stream(s), j + 2 - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while rest(j - i).is_some_and(|d| d.is_ascii_digit()) {
                j += 1;
            }
            let num: BigInt = chars[i..j].iter().collect::<String>().parse().expect("digits");
            let mut value = Rational::from_integer(num);
            if chars.get(j) == Some(&'/') && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                let k0 = j + 1;
                let mut k = k0;
                while chars.get(k).is_some_and(|d| d.is_ascii_digit()) {
                    k += 1;
                }
                let den: BigInt = chars[k0..k].iter().collect::<String>().parse().expect("digits");
                if den == BigInt::from(0) {
                    return Err(syntax(l0, c0, "zero denominator"));
                }
                value /= Rational::from_integer(den);
                j = k;
            }
            (Tok::Num(value), j - i)
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while chars
                .get(j)
                .is_some_and(|d| d.is_alphanumeric() || *d == '_' || *d == '\'')
            {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ':' => Tok::Colon,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                '=' => Tok::Eq,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '~' => Tok::Not,
                _ => return Err(syntax(l0, c0, format!("unexpected character `{c}`"))),
            };
            (t, 1)
        };
        out.push(Spanned {
            tok,
            line: l0,
            col: c0,
        });
        advance(&mut i, &mut col, n);
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const KEYWORDS: &[&str] = &["forall", "exists", "true", "false", "hd", "tl", "cons", "divides", "X"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        syntax(s.line, s.col, msg)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.is_kw("forall") || self.is_kw("exists") {
            return self.quantified();
        }
        self.iff()
    }

    fn quantified(&mut self) -> Result<Formula> {
        let forall = self.is_kw("forall");
        self.bump();
        let mut binders = Vec::new();
        loop {
            let name = match self.bump() {
                Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => s,
                _ => {
                    self.pos -= 1;
                    return Err(self.err("expected a variable name"));
                }
            };
            let mut sort = Sort::S;
            if *self.peek() == Tok::Colon {
                self.bump();
                sort = match self.bump() {
                    Tok::Ident(s) if s == "S" => Sort::S,
                    Tok::Ident(s) if s == "L" => Sort::L,
                    _ => {
                        self.pos -= 1;
                        return Err(self.err("expected sort `S` or `L`"));
                    }
                };
            }
            binders.push((name, sort));
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::Dot, "`.`")?;
        let mut body = self.formula()?;
        for (name, sort) in binders.into_iter().rev() {
            body = if forall {
                Formula::forall(&name, sort, body)
            } else {
                Formula::exists(&name, sort, body)
            };
        }
        Ok(body)
    }

    fn iff(&mut self) -> Result<Formula> {
        let a = self.implies()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let b = self.formula()?;
            return Ok(Formula::iff(a, b));
        }
        Ok(a)
    }

    fn implies(&mut self) -> Result<Formula> {
        let a = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let b = if self.is_kw("forall") || self.is_kw("exists") {
                self.quantified()?
            } else {
                self.implies()?
            };
            return Ok(Formula::implies(a, b));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut a = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            a = Formula::or(a, self.and()?);
        }
        Ok(a)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut a = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            a = Formula::and(a, self.unary()?);
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(s) if s == "forall" || s == "exists" => self.quantified(),
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                let save = self.pos;
                self.bump();
                if let Ok(f) = self.formula() {
                    if *self.peek() == Tok::RParen {
                        self.bump();
                        if !self.continues_term() {
                            return Ok(f);
                        }
                    }
                }
                self.pos = save;
                self.atom()
            }
            _ => self.atom(),
        }
    }

    /// After `( ... )`, does the input continue as a term or relation?
    fn continues_term(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Plus | Tok::Minus | Tok::Star | Tok::Caret | Tok::Eq | Tok::Neq | Tok::Le | Tok::Lt | Tok::Ge | Tok::Gt
        ) || matches!(self.peek(), Tok::Ident(s) if s == "divides")
    }

    fn atom(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        let rel = self.bump();
        let rhs = match rel {
            Tok::Eq | Tok::Neq | Tok::Le | Tok::Lt | Tok::Ge | Tok::Gt => self.term()?,
            Tok::Ident(ref s) if s == "divides" => self.term()?,
            _ => {
                self.pos -= 1;
                return Err(self.err("expected a relation"));
            }
        };
        Ok(match rel {
            Tok::Eq => Formula::atom(lhs, Rel::Eq, rhs),
            Tok::Neq => Formula::not(Formula::atom(lhs, Rel::Eq, rhs)),
            Tok::Le => Formula::atom(lhs, Rel::Le, rhs),
            Tok::Lt => Formula::atom(lhs, Rel::Lt, rhs),
            Tok::Ge => Formula::atom(rhs, Rel::Le, lhs),
            Tok::Gt => Formula::atom(rhs, Rel::Lt, lhs),
            _ => Formula::atom(lhs, Rel::Divides, rhs),
        })
    }

    fn term(&mut self) -> Result<Term> {
        let mut a = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    a = Term::add(a, self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    a = Term::sub(a, self.product()?);
                }
                _ => return Ok(a),
            }
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut a = self.signed()?;
        while *self.peek() == Tok::Star {
            self.bump();
            a = Term::mul(a, self.signed()?);
        }
        Ok(a)
    }

    fn signed(&mut self) -> Result<Term> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Term::neg(self.signed()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Term> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            return match self.bump() {
                Tok::Num(n) if n.is_integer() && n.numer() < &BigInt::from(1u32 << 16) => {
                    let e: u32 = n.numer().try_into().expect("small exponent");
                    Ok(Term::pow(base, e))
                }
                _ => {
                    self.pos -= 1;
                    Err(self.err("expected a small natural exponent"))
                }
            };
        }
        Ok(base)
    }

    fn unary_arg(&mut self) -> Result<Term> {
        self.expect(Tok::LParen, "`(`")?;
        let t = self.term()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term> {
        match self.bump() {
            Tok::Num(n) => Ok(Term::Rat(n)),
            Tok::Stream(s) => Ok(Term::Stream(s)),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(s) => match s.as_str() {
                "X" => Ok(Term::X),
                "hd" => Ok(Term::hd(self.unary_arg()?)),
                "tl" => Ok(Term::tl(self.unary_arg()?)),
                "cons" => {
                    self.expect(Tok::LParen, "`(`")?;
                    let a = self.term()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let b = self.term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Term::cons(a, b))
                }
                kw if KEYWORDS.contains(&kw) => {
                    self.pos -= 1;
                    Err(self.err(format!("unexpected keyword `{kw}`")))
                }
                _ if *self.peek() == Tok::LParen => Err(Error::UnknownIdentifier(s)),
                _ => Ok(Term::Var(s)),
            },
            _ => {
                self.pos -= 1;
                Err(self.err("expected a term"))
            }
        }
    }
}

fn parser(text: &str) -> Result<Parser> {
    Ok(Parser {
        toks: lex(text)?,
        pos: 0,
    })
}

/// Parses one formula; bound variables come back alpha-renamed apart.
pub fn parse(text: &str) -> Result<Formula> {
    let mut p = parser(text)?;
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f.alpha_rename())
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = parser(text)?;
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(t)
}
