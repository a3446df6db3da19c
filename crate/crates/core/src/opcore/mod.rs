//! Constant-coefficient matrix differential operators in `n + 1` variables.
//!
//! Slot 0 of every multi-index is time; slots `1..=n` are space.

mod dsl;
mod multi_index;
mod operator;

pub use dsl::{matrix_text, parse_operator, to_dsl};
pub use multi_index::MultiIndex;
pub use operator::Operator;
