//! Coefficient fields, split-exponent polynomials and univariate factoring.

pub mod field;
pub mod linalg;
pub mod poly;
pub mod univariate;

pub use field::{is_integral, rat, rat_int, FieldSpec, Scalar};
pub use poly::{ExponentPair, Extended, Frame, LinearForm, Polynomial, Selector, Var};
pub use univariate::{Factorization, UPoly};
