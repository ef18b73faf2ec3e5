//! Exact computations with tropical fans: balanced weighted fans, piecewise linear
//! functions and their divisors, tropical modifications, Chow rings of fans, Bergman
//! fans of matroids, and certificates for tropical quasilinearity.

pub mod chow;
pub mod corpus;
pub mod criteria;
pub mod error;
pub mod exactlin;
pub mod format;
pub mod matroid;
pub mod modification;
pub mod plfun;
pub mod polyfan;
pub mod quasilinear;
pub mod tropcycle;

pub use error::{Error, Result};
