//! Linear stream circuits built from delays, adders, copies and scalers.
//!
//! File format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! input z
//! node h1 = delay h2
//! node h3 = add z h1
//! node h2 = copy h3
//! output y = h3
//! ```

mod solve;

pub use solve::{equiv, simulate, transfer, TransferMatrix};

use crate::algebra::{rat, Rational};
use crate::error::{Error, Result};
use crate::logic::{Formula, Sort, Term};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Input,
    Output(String),
    Delay(String),
    Add(String, String),
    Copy(String),
    Scale(Rational, String),
}

impl NodeKind {
    pub fn sources(&self) -> Vec<&str> {
        match self {
            NodeKind::Input => vec![],
            NodeKind::Output(s) | NodeKind::Delay(s) | NodeKind::Copy(s) | NodeKind::Scale(_, s) => vec![s],
            NodeKind::Add(a, b) => vec![a, b],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub nodes: Vec<Node>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Circuit {
    pub fn node(&self, name: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.name.as_str())
    }

    /// Checks names, references and the presence of inputs and outputs.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            if !seen.insert(n.name.as_str()) {
                return Err(Error::DuplicateName(n.name.clone()));
            }
        }
        for n in &self.nodes {
            for s in n.kind.sources() {
                if !seen.contains(s) {
                    return Err(Error::DanglingReference(s.to_string()));
                }
            }
        }
        if self.inputs.is_empty() {
            return Err(Error::MissingInput);
        }
        if self.outputs.is_empty() {
            return Err(Error::MissingOutput);
        }
        Ok(())
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut c = Circuit {
        nodes: Vec::new(),
        inputs: Vec::new(),
        outputs: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Syntax {
            line: i + 1,
            col: raw.len() - raw.trim_start().len() + 1,
            msg: msg.to_string(),
        };
        let node = match words.as_slice() {
            ["input", name] => {
                c.inputs.push(name.to_string());
                Node {
                    name: name.to_string(),
                    kind: NodeKind::Input,
                }
            }
            ["output", name, "=", src] => {
                c.outputs.push(name.to_string());
                Node {
                    name: name.to_string(),
                    kind: NodeKind::Output(src.to_string()),
                }
            }
            ["node", name, "=", rest @ ..] => {
                let kind = match rest {
                    ["delay", s] => NodeKind::Delay(s.to_string()),
                    ["copy", s] => NodeKind::Copy(s.to_string()),
                    ["add", a, b] => NodeKind::Add(a.to_string(), b.to_string()),
                    ["scale", q, s] => NodeKind::Scale(parse_ratio(q).ok_or_else(|| err("bad scale factor"))?, s.to_string()),
                    _ => return Err(err("expected delay, add, copy or scale")),
                };
                Node {
                    name: name.to_string(),
                    kind,
                }
            }
            _ => return Err(err("expected `input`, `node` or `output` declaration")),
        };
        c.nodes.push(node);
    }
    c.validate()?;
    Ok(c)
}

fn parse_ratio(s: &str) -> Option<Rational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let (n, d): (i64, i64) = (n.parse().ok()?, d.parse().ok()?);
    (d != 0).then(|| Rational::new(n.into(), d.into()))
}

/// A defining equation `lhs = rhs` of one non-input node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn to_formula(&self) -> Formula {
        Formula::eq(self.lhs.clone(), self.rhs.clone())
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// One equation per non-input node, in declaration order.
pub fn to_equations(c: &Circuit) -> Vec<Equation> {
    c.nodes
        .iter()
        .filter_map(|n| {
            let me = Term::var(&n.name);
            let v = |s: &str| Term::var(s);
            let (lhs, rhs) = match &n.kind {
                NodeKind::Input => return None,
                NodeKind::Output(s) | NodeKind::Copy(s) => (me, v(s)),
                NodeKind::Delay(s) => (me, Term::mul(Term::X, v(s))),
                NodeKind::Add(a, b) => (me, Term::add(v(a), v(b))),
                NodeKind::Scale(q, s) => {
                    let (num, den) = (Rational::from(q.numer().clone()), Rational::from(q.denom().clone()));
                    let lhs = if den == rat(1) { me } else { Term::mul(Term::Rat(den), me) };
                    (lhs, Term::mul(Term::Rat(num), v(s)))
                }
            };
            Some(Equation { lhs, rhs })
        })
        .collect()
}

/// `forall <streams>. <equations> -> claim`, ready for `decide`.
pub fn encode_logic(c: &Circuit, claim: &Formula) -> Result<Formula> {
    let names: BTreeSet<&str> = c.names().collect();
    if let Some(v) = claim.free_vars().into_iter().find(|v| !names.contains(v.as_str())) {
        return Err(Error::UnknownVariable(v));
    }
    let hyp = Formula::and_all(to_equations(c).iter().map(Equation::to_formula));
    let mut order: Vec<&str> = c.inputs.iter().map(String::as_str).collect();
    order.extend(c.outputs.iter().map(String::as_str));
    order.extend(c.names().filter(|n| !c.inputs.iter().chain(&c.outputs).any(|m| m == n)));
    let body = Formula::implies(hyp, claim.clone());
    Ok(order.iter().rev().fold(body, |acc, n| Formula::forall(n, Sort::S, acc)))
}

/// A node on some cycle that passes through no delay.
pub(crate) fn instantaneous_cycle(c: &Circuit) -> Option<String> {
    let idx: HashMap<&str, usize> = c.nodes.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
    let succ: Vec<Vec<usize>> = {
        let mut s = vec![Vec::new(); c.nodes.len()];
        for (i, n) in c.nodes.iter().enumerate() {
            if matches!(n.kind, NodeKind::Delay(_)) {
                continue;
            }
            for src in n.kind.sources() {
                s[idx[src]].push(i);
            }
        }
        s
    };
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; c.nodes.len()];
    fn dfs(u: usize, succ: &[Vec<usize>], state: &mut [u8]) -> Option<usize> {
        state[u] = 1;
        for &w in &succ[u] {
            match state[w] {
                1 => return Some(w),
                0 => {
                    if let Some(r) = dfs(w, succ, state) {
                        return Some(r);
                    }
                }
                _ => {}
            }
        }
        state[u] = 2;
        None
    }
    (0..c.nodes.len())
        .find_map(|u| if state[u] == 0 { dfs(u, &succ, &mut state) } else { None })
        .map(|i| c.nodes[i].name.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIG1: &str = "input z\nnode h1 = delay h2\nnode h3 = add z h1\nnode h2 = copy h3\noutput y = h3\n";

    #[test]
    fn parses_the_feedback_circuit() {
        let c = parse_circuit(FIG1).unwrap();
        assert_eq!(c.inputs, ["z"]);
        assert_eq!(c.outputs, ["y"]);
        let eqs: Vec<String> = to_equations(&c).iter().map(|e| e.to_string()).collect();
        assert_eq!(eqs, ["h1 = X*h2", "h3 = z + h1", "h2 = h3", "y = h3"]);
    }

    #[test]
    fn rejects_malformed_circuits() {
        assert_eq!(parse_circuit("input z\noutput y = w"), Err(Error::DanglingReference("w".into())));
        assert_eq!(parse_circuit("input z\ninput z\noutput y = z"), Err(Error::DuplicateName("z".into())));
        assert_eq!(parse_circuit("input z"), Err(Error::MissingOutput));
        assert!(matches!(parse_circuit("input z\nnode a = mul z z\noutput y = a"), Err(Error::Syntax { line: 2, .. })));
    }

    #[test]
    fn scale_equation_clears_the_denominator() {
        let c = parse_circuit("input z\nnode a = scale 2/3 z\noutput y = a").unwrap();
        assert_eq!(to_equations(&c)[0].to_string(), "3*a = 2*z");
        let d = parse_circuit("input z\nnode a = scale 2 z\noutput y = a").unwrap();
        assert_eq!(to_equations(&d)[0].to_string(), "a = 2*z");
    }

    #[test]
    fn finds_delay_free_loops() {
        let c = parse_circuit("input z\nnode a = add a z\noutput y = a").unwrap();
        assert_eq!(instantaneous_cycle(&c), Some("a".into()));
        assert_eq!(instantaneous_cycle(&parse_circuit(FIG1).unwrap()), None);
    }

    #[test]
    fn unknown_claim_variables_are_rejected() {
        let c = parse_circuit(FIG1).unwrap();
        let claim = crate::logic::parse("w = z").unwrap();
        assert_eq!(encode_logic(&c, &claim), Err(Error::UnknownVariable("w".into())));
    }
}
