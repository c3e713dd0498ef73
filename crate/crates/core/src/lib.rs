pub mod arith;
pub mod action;
pub mod error;
pub mod heisenberg;
pub mod hnf;
pub mod json;
pub mod linalg;
pub mod orbit;
pub mod range;
pub mod skew;
pub mod so_nn;

pub use arith::{Rational, Scalar};
pub use error::{Error, Result};
