//! Exact linear algebra over small prime fields and over the integers.

mod echelon;
mod fp;
mod int;
mod packed;

pub use echelon::Echelon;
pub use fp::{inv_mod, is_small_prime, FpMatrix, Rref};
pub use int::{IntMatrix, Snf};
pub use packed::PackedF3Rows;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{0} is not a supported prime modulus")]
    BadModulus(u32),
    #[error("ragged input: row {row} has {got} entries, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
