//! Exact symbolic induction of quantum group corepresentations.

pub mod algebra;
pub mod bundle;
pub mod coalgebra;
pub mod comodule;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod hopf;
pub mod induction;
pub mod linalg;
pub mod report;
pub mod scalars;
pub mod subgroup;
pub mod tensor;

pub use error::{Error, Result};
pub use report::{Report, Status};
pub use scalars::{GaussRat, Scalar};
