//! Exact coefficient field: rational functions over `Q(i)` in named parameters.

mod gauss;
mod poly;
mod scalar;

pub use gauss::GaussRat;
pub use poly::{gcd, Monomial, Poly, Var};
pub use scalar::{format_combination, Scalar};
