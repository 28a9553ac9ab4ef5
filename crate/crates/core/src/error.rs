use thiserror::Error;

/// Errors surfaced by the exact-arithmetic layers.
///
/// Structural misuse (mixing rings, out-of-range indices, shape mismatches)
/// panics instead; those conditions are programming errors and the manifest
/// layer rules them out for user input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("not divisible by p: {witness}")]
    NotDivisibleByP { witness: String },

    #[error("not a unit: {witness}")]
    NotAUnit { witness: String },

    #[error("matrix not invertible, determinant {det}")]
    NotInvertible { det: String },

    #[error("substitution image for t{var} is not invertible: {witness}")]
    NonInvertibleImage { var: usize, witness: String },

    #[error("truncation order {n} exceeds p-1 = {max}")]
    ExponentTooLarge { n: usize, max: usize },

    #[error("matrix power {order} does not vanish")]
    NotNilpotentToOrder { order: usize },

    #[error("parse error at byte {pos}: {msg}")]
    PolyParse { pos: usize, msg: String },
}
