//! Exact Arboreal Gas (weighted random spanning forest) probabilities,
//! negative-correlation checks, electrical quantities and graph reductions.
//!
//! Everything is generic over a [`Scalar`]; the aliases below pin the
//! exact rational instantiation used by the CLI.

pub mod algebra;
pub mod correlation;
pub mod electrical;
pub mod error;
pub mod forest;
pub mod graph;
pub mod reduction;
pub mod sampling;

pub use algebra::{Matrix, Polynomial, Scalar};
pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, EdgeMap, Multigraph, VertexId};

pub type Rational = num_rational::BigRational;
pub type Graph = Multigraph<Rational>;
pub type GraphF64 = Multigraph<f64>;
pub type BetaPolynomial = Polynomial<Rational>;
pub type RationalMatrix = Matrix<Rational>;
