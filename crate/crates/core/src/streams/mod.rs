//! Streams as formal Laurent series over the rationals.
//!
//! Closed forms are rational functions ([`LaurentRational`]); anything else
//! lives as a finite prefix ([`TruncSeries`]).

mod expr;
mod laurent;
mod trunc;

pub use expr::{parse_stream, parse_stream_at};
pub use laurent::{LaurentRational, Valuation};
pub use trunc::{catalan, TruncSeries};
