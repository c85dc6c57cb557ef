//! Exact sample-point oracle for sentences over the reals.
//!
//! Sentences have at most two quantifiers, over `x` and then `y`, and atoms
//! `p(x, y) rel 0` with `p` of total degree at most 2. The oracle builds a
//! cylindrical decomposition from closed-form projections, isolates roots with
//! Sturm sequences, and reads signs at algebraic points exactly.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use stream_logic::algebra::{isolate_roots, rat, refine, sign_at_root, Rational, RootInterval, Sign, UniPoly};

/// `a*y^2 + (b0 + b1*x)*y + c0 + c1*x + c2*x^2`.
#[derive(Clone, Debug)]
pub struct Quad {
    pub a: i64,
    pub b: [i64; 2],
    pub c: [i64; 3],
}

impl Quad {
    fn bx(&self) -> UniPoly {
        UniPoly::from_ints(&self.b)
    }

    fn cx(&self) -> UniPoly {
        UniPoly::from_ints(&self.c)
    }

    fn disc(&self) -> UniPoly {
        let b = self.bx();
        &(&b * &b) - &self.cx().scale(&rat(4 * self.a))
    }

    fn text(&self) -> String {
        let terms = [
            (self.a, "y*y"),
            (self.b[1], "x*y"),
            (self.b[0], "y"),
            (self.c[2], "x*x"),
            (self.c[1], "x"),
            (self.c[0], ""),
        ];
        let mut out = String::new();
        for (k, m) in terms {
            if k == 0 {
                continue;
            }
            let body = match (k.abs(), m) {
                (n, "") => n.to_string(),
                (1, m) => m.to_string(),
                (n, m) => format!("{n}*{m}"),
            };
            if out.is_empty() {
                out = if k < 0 { format!("-{body}") } else { body };
            } else {
                out += if k < 0 { " - " } else { " + " };
                out += &body;
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Rel {
    Lt,
    Le,
    Eq,
}

#[derive(Clone, Debug)]
pub enum Matrix {
    Atom(usize, Rel),
    Not(Box<Matrix>),
    And(Box<Matrix>, Box<Matrix>),
    Or(Box<Matrix>, Box<Matrix>),
}

impl Matrix {
    fn holds(&self, signs: &[Sign]) -> bool {
        match self {
            Matrix::Atom(i, r) => match r {
                Rel::Lt => signs[*i] == Sign::Neg,
                Rel::Le => signs[*i] != Sign::Pos,
                Rel::Eq => signs[*i] == Sign::Zero,
            },
            Matrix::Not(a) => !a.holds(signs),
            Matrix::And(a, b) => a.holds(signs) && b.holds(signs),
            Matrix::Or(a, b) => a.holds(signs) || b.holds(signs),
        }
    }

    fn text(&self, polys: &[Quad]) -> String {
        match self {
            Matrix::Atom(i, r) => {
                let op = match r {
                    Rel::Lt => "<",
                    Rel::Le => "<=",
                    Rel::Eq => "=",
                };
                format!("{} {op} 0", polys[*i].text())
            }
            Matrix::Not(a) => format!("~({})", a.text(polys)),
            Matrix::And(a, b) => format!("({} /\\ {})", a.text(polys), b.text(polys)),
            Matrix::Or(a, b) => format!("({} \\/ {})", a.text(polys), b.text(polys)),
        }
    }
}

pub struct Sentence {
    /// `true` for exists; the first quantifier binds `x`, the second `y`.
    pub quants: Vec<bool>,
    pub polys: Vec<Quad>,
    pub matrix: Matrix,
}

impl Sentence {
    pub fn text(&self) -> String {
        let mut s = String::new();
        for (q, v) in self.quants.iter().zip(["x", "y"]) {
            s += &format!("{} {v}:L. ", if *q { "exists" } else { "forall" });
        }
        s + &self.matrix.text(&self.polys)
    }
}

pub fn gen_sentence(rng: &mut ChaCha8Rng) -> Sentence {
    let nq = if rng.gen_bool(0.3) { 1 } else { 2 };
    let quants = (0..nq).map(|_| rng.gen_bool(0.5)).collect();
    let npolys = rng.gen_range(1..=3);
    let coef = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.55) { rng.gen_range(-3..=3) } else { 0 };
    let polys: Vec<Quad> = (0..npolys)
        .map(|_| {
            let mut p = Quad {
                a: coef(rng),
                b: [coef(rng), coef(rng)],
                c: [coef(rng), coef(rng), coef(rng)],
            };
            if nq == 1 {
                p.a = 0;
                p.b = [0, 0];
            }
            p
        })
        .collect();
    let matrix = gen_matrix(rng, npolys, 2);
    Sentence { quants, polys, matrix }
}

fn gen_matrix(rng: &mut ChaCha8Rng, n: usize, depth: u32) -> Matrix {
    let atom = |rng: &mut ChaCha8Rng| {
        let rel = [Rel::Lt, Rel::Le, Rel::Eq][rng.gen_range(0..3)];
        Matrix::Atom(rng.gen_range(0..n), rel)
    };
    if depth == 0 || rng.gen_bool(0.35) {
        return atom(rng);
    }
    match rng.gen_range(0..3) {
        0 => Matrix::Not(Box::new(gen_matrix(rng, n, depth - 1))),
        1 => Matrix::And(Box::new(gen_matrix(rng, n, depth - 1)), Box::new(gen_matrix(rng, n, depth - 1))),
        _ => Matrix::Or(Box::new(gen_matrix(rng, n, depth - 1)), Box::new(gen_matrix(rng, n, depth - 1))),
    }
}

/// A real point: rational, or the root of a square-free polynomial isolated
/// by an interval.
enum Point {
    Rat(Rational),
    Root(UniPoly, RootInterval),
}

impl Point {
    fn sign(&self, q: &UniPoly) -> Sign {
        match self {
            Point::Rat(r) => q.sign_at(r),
            Point::Root(p, iv) => sign_at_root(p, iv, q),
        }
    }
}

fn neg(s: Sign) -> Sign {
    s.negate()
}

/// Sign of `u + v*sqrt(d)` at `pt`, for `d(pt) >= 0`.
fn sign_surd(pt: &Point, u: &UniPoly, v: &UniPoly, d: &UniPoly) -> Sign {
    let (su, sv) = (pt.sign(u), pt.sign(v));
    if pt.sign(d) == Sign::Zero || sv == Sign::Zero {
        return su;
    }
    if su == Sign::Zero || su == sv {
        return sv;
    }
    let norm = &(u * u) - &(&(v * v) * d);
    match pt.sign(&norm) {
        Sign::Zero => Sign::Zero,
        Sign::Pos => su,
        Sign::Neg => sv,
    }
}

fn konst(n: i64) -> UniPoly {
    UniPoly::constant(rat(n))
}

/// Sign vectors of the polynomials in `y` at every cell of the line over `x = pt`.
fn fibre_signs(pt: &Point, polys: &[Quad]) -> Vec<Vec<Sign>> {
    let minus_inf: Vec<Sign> = polys
        .iter()
        .map(|p| {
            if p.a != 0 {
                Sign::of(&rat(p.a))
            } else if pt.sign(&p.bx()) != Sign::Zero {
                neg(pt.sign(&p.bx()))
            } else {
                pt.sign(&p.cx())
            }
        })
        .collect();
    let mut out = vec![minus_inf];
    for r in polys {
        // each root rho yields the signs at rho and just to its right
        let roots: Vec<Box<dyn Fn(&Quad) -> (Sign, Sign)>> = if r.a != 0 {
            if pt.sign(&r.disc()) == Sign::Neg {
                continue;
            }
            let d = r.disc();
            [1i64, -1]
                .into_iter()
                .map(|v0| {
                    let (a, u0, d) = (r.a, -&r.bx(), d.clone());
                    let f: Box<dyn Fn(&Quad) -> (Sign, Sign)> = Box::new(move |q: &Quad| {
                        // (2a)^2 * q(rho), rho = (u0 + v0*sqrt d) / 2a
                        let two_a = konst(2 * a);
                        let val_u = &(&(&(&u0 * &u0) + &d).scale(&rat(q.a)) + &(&(&two_a * &q.bx()) * &u0))
                            + &(&q.cx() * &(&two_a * &two_a));
                        let val_v = (&(&u0.scale(&rat(2 * q.a)) + &(&two_a * &q.bx()))).scale(&rat(v0));
                        let at = sign_surd(pt, &val_u, &val_v, &d);
                        let der_u = &u0.scale(&rat(2 * q.a)) + &(&two_a * &q.bx());
                        let der_v = konst(2 * q.a * v0);
                        let der = sign_surd(pt, &der_u, &der_v, &d) * Sign::of(&rat(a));
                        (at, der)
                    });
                    f
                })
                .collect()
        } else if pt.sign(&r.bx()) != Sign::Zero {
            let (b, c) = (r.bx(), r.cx());
            let sb = pt.sign(&b);
            vec![Box::new(move |q: &Quad| {
                // b^2 * q(-c/b) and b * q'(-c/b)
                let val = &(&(&(&c * &c).scale(&rat(q.a)) - &(&(&q.bx() * &b) * &c)) + &(&q.cx() * &(&b * &b)));
                let der = &c.scale(&rat(-2 * q.a)) + &(&q.bx() * &b);
                (pt.sign(&val), pt.sign(&der) * sb)
            })]
        } else {
            continue;
        };
        for root in roots {
            let pairs: Vec<(Sign, Sign)> = polys.iter().map(|q| root(q)).collect();
            out.push(pairs.iter().map(|&(at, _)| at).collect());
            out.push(
                pairs
                    .iter()
                    .zip(polys)
                    .map(|(&(at, der), q)| match (at, der) {
                        (Sign::Zero, Sign::Zero) => Sign::of(&rat(q.a)),
                        (Sign::Zero, d) => d,
                        (s, _) => s,
                    })
                    .collect(),
            );
        }
    }
    out
}

fn projection(polys: &[Quad]) -> Vec<UniPoly> {
    let mut out = Vec::new();
    for p in polys {
        out.push(p.bx());
        out.push(p.cx());
        if p.a != 0 {
            out.push(p.disc());
        }
    }
    for (i, p) in polys.iter().enumerate() {
        for q in &polys[i + 1..] {
            let (p, q) = if p.a == 0 { (q, p) } else { (p, q) };
            let (a1, b1, c1) = (konst(p.a), p.bx(), p.cx());
            let (a2, b2, c2) = (konst(q.a), q.bx(), q.cx());
            if p.a != 0 && q.a != 0 {
                let ac = &(&a1 * &c2) - &(&a2 * &c1);
                let ab = &(&a1 * &b2) - &(&a2 * &b1);
                let bc = &(&b1 * &c2) - &(&b2 * &c1);
                out.push(&(&ac * &ac) - &(&ab * &bc));
                out.push(ab);
            } else if p.a != 0 {
                out.push(&(&(&a1 * &(&c2 * &c2)) - &(&(&b1 * &b2) * &c2)) + &(&c1 * &(&b2 * &b2)));
            } else {
                out.push(&(&b1 * &c2) - &(&b2 * &c1));
            }
        }
    }
    out.retain(|p| !p.is_zero() && !p.is_constant());
    out
}

/// One point in every cell of the line cut by the roots of `polys`.
fn line_samples(polys: &[UniPoly]) -> Vec<Point> {
    let prod = polys
        .iter()
        .filter(|p| !p.is_constant())
        .fold(UniPoly::one(), |acc, p| &acc * p)
        .square_free();
    let mut ivs = isolate_roots(&prod);
    if ivs.is_empty() {
        return vec![Point::Rat(rat(0))];
    }
    let mut out = vec![Point::Rat(&ivs[0].lo - rat(1))];
    for k in 0..ivs.len() {
        if k > 0 {
            loop {
                let left = ivs[k - 1].hi.clone();
                let right = ivs[k].lo.clone();
                let touching_root = ivs[k - 1].is_exact() || ivs[k].is_exact();
                if left < right {
                    out.push(Point::Rat((left + right) / rat(2)));
                    break;
                }
                if !touching_root {
                    out.push(Point::Rat(left));
                    break;
                }
                for j in [k - 1, k] {
                    if !ivs[j].is_exact() {
                        let w = (&ivs[j].hi - &ivs[j].lo) / rat(4);
                        ivs[j] = refine(&prod, &ivs[j], &w);
                    }
                }
            }
        }
        out.push(Point::Root(prod.clone(), ivs[k].clone()));
    }
    out.push(Point::Rat(&ivs[ivs.len() - 1].hi + rat(1)));
    out
}

fn quantify(exists: bool, mut it: impl Iterator<Item = bool>) -> bool {
    if exists {
        it.any(|b| b)
    } else {
        it.all(|b| b)
    }
}

pub fn oracle(s: &Sentence) -> bool {
    if s.quants.len() == 1 {
        let cs: Vec<UniPoly> = s.polys.iter().map(Quad::cx).collect();
        return quantify(
            s.quants[0],
            line_samples(&cs).iter().map(|pt| {
                let signs: Vec<Sign> = cs.iter().map(|c| pt.sign(c)).collect();
                s.matrix.holds(&signs)
            }),
        );
    }
    let xs = line_samples(&projection(&s.polys));
    quantify(
        s.quants[0],
        xs.iter()
            .map(|pt| quantify(s.quants[1], fibre_signs(pt, &s.polys).iter().map(|v| s.matrix.holds(v)))),
    )
}
