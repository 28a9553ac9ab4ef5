//! Exact computer algebra for Čech-glued flat bundles in odd characteristic.
//!
//! Starting from affine patches equipped with Frobenius liftings over the
//! length-2 Witt vectors `W2(F_{p^e})` and a nilpotent Higgs bundle given in
//! Čech form, the crate constructs the glued flat bundle of the truncated
//! exponential construction and machine-checks every identity involved:
//!
//! * flatness of the local connections built from the descended operator
//!   `dF/[p]`,
//! * the two defining properties of the difference-of-lifts homomorphisms
//!   (derivative identity and additive cocycle),
//! * the gluing cocycle for the exponential transition matrices,
//! * the connection gluing identity across overlaps,
//! * equality of the truncated exponential with its multinomial expansion.
//!
//! All arithmetic is exact: coefficients live in `F_{p^e}` or `W2(F_{p^e})`
//! and polynomials are sparse multivariate Laurent polynomials. Every check
//! returns a structured record with a witness on failure; nothing is tested
//! numerically.

pub mod arith;
pub mod cover;
mod error;
pub mod forms;
pub mod higgs;
pub mod laurent;
pub mod report;
pub mod twist;

pub use error::Error;
