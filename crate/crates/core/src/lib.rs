//! Exact homological algebra over Z together with the geometric front ends
//! that feed it: cubical chains with cutting/creasing, circle-equivariant
//! complexes with a degree-(-2) polynomial variable, and numerical Morse
//! theory on implicit surfaces in R^3.
//!
//! Everything algebraic is computed over arbitrary-precision integers; the
//! only floating point lives in the `morse` module's numerics, and those
//! pipelines are deterministic for fixed inputs and parameters.

pub mod complex;
pub mod cubical;
pub mod equivariant;
pub mod error;
pub mod int;
pub mod morse;
pub mod random;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
