//! Scalars, matrices and integer lattices shared by the pipeline.

pub mod complex;
pub mod field;
pub mod float;
pub mod gauss;
pub mod lattice;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod relations;
pub mod symbolic;

pub use complex::FloatComplex;
pub use field::{ExactField, Field, NumericField, Scalar, Tier};
pub use float::{bits_for_digits, Float};
pub use gauss::GaussRat;
pub use linalg::Matrix;
pub use parse::{format_scalar, q_decompose};
pub use symbolic::{evaluate, ConstantBasis, SymbolicComplex, SymbolicReal};
