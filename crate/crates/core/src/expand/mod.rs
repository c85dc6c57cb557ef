//! Compilation of the extended language down to ordered-field formulas whose
//! only constant is `X`.

mod constants;
mod hdtl;
mod relativize;

pub use constants::expand_constants;
pub use hdtl::{bisim_formula, eliminate_hd_tl};
pub use relativize::{constant_height, expand_divides, relativize, relativize_bounded, s_bar, Growth, Side};

use crate::error::Result;
use crate::logic::Formula;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpansionReport {
    pub introduced_vars: Vec<String>,
    /// Rule tags in order of first use.
    pub applied_rules: Vec<String>,
    /// Subterms no rule could remove; empty on success.
    pub residual_ops: Vec<String>,
}

impl ExpansionReport {
    pub fn is_success(&self) -> bool {
        self.residual_ops.is_empty()
    }

    pub(crate) fn rule(&mut self, tag: &str) {
        if !self.applied_rules.iter().any(|r| r == tag) {
            self.applied_rules.push(tag.to_string());
        }
    }

    pub fn merge(&mut self, other: ExpansionReport) {
        self.introduced_vars.extend(other.introduced_vars);
        for r in other.applied_rules {
            self.rule(&r);
        }
        self.residual_ops.extend(other.residual_ops);
    }
}

/// Every expansion step in order; the result is pure with `L`-sorted
/// quantifiers only.
pub fn expand_all(f: &Formula) -> Result<(Formula, ExpansionReport)> {
    let (g, mut report) = expand_operators(f)?;
    report.rule("relativize");
    Ok((relativize(&g), report))
}

/// Every step except relativization: the result is an ordered-field
/// formula in `X` that may still quantify over sort `S`.
pub fn expand_operators(f: &Formula) -> Result<(Formula, ExpansionReport)> {
    let mut report = ExpansionReport::default();
    let g = f.alpha_rename();
    let g = relativize::expand_divides_with(&g, &mut report);
    let g = expand_constants(&g);
    let (g, r) = eliminate_hd_tl(&g)?;
    report.merge(r);
    let g = expand_constants(&g);
    if g.any_term(&|t| t.has_stream_const()) {
        report.rule("constants");
    }
    Ok((g, report))
}
