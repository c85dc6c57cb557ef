use super::{instantaneous_cycle, Circuit, NodeKind};
use crate::algebra::{rat, Rational};
use crate::error::{Error, Result};
use crate::streams::LaurentRational;
use std::collections::HashMap;
use std::fmt;

/// Rows are outputs, columns are inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferMatrix {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub entries: Vec<Vec<LaurentRational>>,
}

impl fmt::Display for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, row) in self.entries.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Transfer functions by exact elimination over rational functions in `X`.
pub fn transfer(c: &Circuit) -> Result<TransferMatrix> {
    c.validate()?;
    if let Some(n) = instantaneous_cycle(c) {
        return Err(Error::AlgebraicLoop(n));
    }
    let unknown: Vec<&str> = c.nodes.iter().filter(|n| n.kind != NodeKind::Input).map(|n| n.name.as_str()).collect();
    let col: HashMap<&str, usize> = unknown.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let inp: HashMap<&str, usize> = c.inputs.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let (n, m) = (unknown.len(), c.inputs.len());
    // rows [A | B] of A h = B z
    let mut rows = vec![vec![LaurentRational::zero(); n + m]; n];
    for (i, name) in unknown.iter().enumerate() {
        let node = c.node(name).expect("validated");
        rows[i][i] = LaurentRational::one();
        let terms: Vec<(LaurentRational, &str)> = match &node.kind {
            NodeKind::Input => unreachable!(),
            NodeKind::Output(s) | NodeKind::Copy(s) => vec![(LaurentRational::one(), s)],
            NodeKind::Delay(s) => vec![(LaurentRational::x(), s)],
            NodeKind::Add(a, b) => vec![(LaurentRational::one(), a), (LaurentRational::one(), b)],
            NodeKind::Scale(q, s) => vec![(LaurentRational::constant(q.clone()), s)],
        };
        for (k, src) in terms {
            match (col.get(src), inp.get(src)) {
                (Some(&j), _) => rows[i][j] = rows[i][j].sub(&k),
                (None, Some(&j)) => rows[i][n + j] = rows[i][n + j].add(&k),
                (None, None) => return Err(Error::DanglingReference(src.to_string())),
            }
        }
    }
    gauss_jordan(&mut rows, n).ok_or_else(|| Error::Internal("delay-free system is singular".into()))?;
    let mut entries = Vec::new();
    for o in &c.outputs {
        let row = &rows[col[o.as_str()]];
        let r: Vec<LaurentRational> = row[n..].to_vec();
        if let Some(bad) = r.iter().find(|e| !e.is_power_series()) {
            return Err(Error::NotCausal(bad.to_string()));
        }
        entries.push(r);
    }
    Ok(TransferMatrix {
        inputs: c.inputs.clone(),
        outputs: c.outputs.clone(),
        entries,
    })
}

/// Reduces the left `n` columns to the identity; `None` if singular.
fn gauss_jordan(rows: &mut [Vec<LaurentRational>], n: usize) -> Option<()> {
    for k in 0..n {
        let p = (k..n).find(|&i| !rows[i][k].is_zero())?;
        rows.swap(k, p);
        let inv = LaurentRational::one().div(&rows[k][k]).ok()?;
        rows[k] = rows[k].iter().map(|e| e.mul(&inv)).collect();
        for i in 0..n {
            if i != k && !rows[i][k].is_zero() {
                let f = rows[i][k].clone();
                let pivot = rows[k].clone();
                for (e, p) in rows[i].iter_mut().zip(&pivot) {
                    *e = e.sub(&f.mul(p));
                }
            }
        }
    }
    Some(())
}

/// Same transfer matrix; the circuits must agree in their numbers of inputs
/// and outputs.
pub fn equiv(a: &Circuit, b: &Circuit) -> Result<bool> {
    if a.inputs.len() != b.inputs.len() || a.outputs.len() != b.outputs.len() {
        return Err(Error::ArityMismatch(format!(
            "{}x{} against {}x{}",
            a.outputs.len(),
            a.inputs.len(),
            b.outputs.len(),
            b.inputs.len()
        )));
    }
    Ok(transfer(a)?.entries == transfer(b)?.entries)
}

/// Runs the circuit step by step with registers starting at zero. Each
/// input is a sequence of the same length; returns one sequence per output.
pub fn simulate(c: &Circuit, inputs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    c.validate()?;
    if let Some(n) = instantaneous_cycle(c) {
        return Err(Error::AlgebraicLoop(n));
    }
    if inputs.len() != c.inputs.len() {
        return Err(Error::ArityMismatch(format!("{} inputs for {}", inputs.len(), c.inputs.len())));
    }
    let steps = inputs.iter().map(Vec::len).min().unwrap_or(0);
    let mut reg: HashMap<&str, Rational> = HashMap::new();
    let mut out = vec![Vec::with_capacity(steps); c.outputs.len()];
    for t in 0..steps {
        let mut val: HashMap<&str, Rational> = HashMap::new();
        for (name, seq) in c.inputs.iter().zip(inputs) {
            val.insert(name, seq[t].clone());
        }
        for node in &c.nodes {
            if let NodeKind::Delay(_) = node.kind {
                val.insert(&node.name, reg.get(node.name.as_str()).cloned().unwrap_or_else(|| rat(0)));
            }
        }
        // delay-free part is acyclic; settle it by repeated passes
        while val.len() < c.nodes.len() {
            for node in &c.nodes {
                if val.contains_key(node.name.as_str()) {
                    continue;
                }
                let srcs: Option<Vec<Rational>> = node.kind.sources().iter().map(|s| val.get(s).cloned()).collect();
                let Some(srcs) = srcs else { continue };
                let v = match &node.kind {
                    NodeKind::Add(..) => &srcs[0] + &srcs[1],
                    NodeKind::Scale(q, _) => q * &srcs[0],
                    _ => srcs[0].clone(),
                };
                val.insert(&node.name, v);
            }
        }
        for node in &c.nodes {
            if let NodeKind::Delay(s) = &node.kind {
                reg.insert(&node.name, val[s.as_str()].clone());
            }
        }
        for (k, o) in c.outputs.iter().enumerate() {
            out[k].push(val[o.as_str()].clone());
        }
    }
    Ok(out)
}
