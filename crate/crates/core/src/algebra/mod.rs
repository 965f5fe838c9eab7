//! Exact scalars, dense univariate polynomials and small dense matrices.

mod matrix;
mod poly;
mod scalar;

pub use matrix::{bareiss_determinant, Matrix};
pub use poly::{Polynomial, RootBracket};
pub use scalar::{parse_rational, ratio_string, rational, Scalar};
