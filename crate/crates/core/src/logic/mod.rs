//! The first-order stream language: terms, formulas, parser and printer.
//!
//! Concrete syntax, one formula per file with `#` line comments:
//!
//! ```text
//! forall x:S. 0 <= x -> exists y:S. y*y = x
//! ```
//!
//! Quantifiers default to sort `S` (power series); `L` ranges over all
//! Laurent series. Stream constants are written `[[X/(1-X-X^2)]]`.

mod ast;
mod parse;
mod prenex;
mod print;

pub use ast::{fresh_name, Atom, Formula, Quant, Rel, Sort, Term};
pub use parse::{parse, parse_term};
pub use prenex::{desugar_iff, nnf, prenex, prenex_parts, rebuild, Prefix};
