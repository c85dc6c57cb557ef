pub mod algebra;
pub mod circuits;
pub mod error;
pub mod expand;
pub mod logic;
pub mod qe;
pub mod streams;

pub use error::{Error, QeStats, Result};
