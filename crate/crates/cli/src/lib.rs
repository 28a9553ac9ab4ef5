//! Manifest ingestion and the built-in example corpus for the `flatglue`
//! binary; exposed as a library so integration tests can drive the same
//! code paths.

pub mod corpus;
pub mod manifest;
