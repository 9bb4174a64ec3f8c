//! Divisors, linear equivalence and ranks on finite graphs carrying an
//! involution, together with their metric counterparts.

pub mod builders;
pub mod calculus;
pub mod divisor;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod metric;
pub mod properties;
pub mod real;

pub use divisor::{Divisor, PotentialFunction, ReducedForm, Reducer};
pub use enumerate::Budget;
pub use error::{Error, Result};
pub use graph::{invariants, InvariantReport, RawGraph, RealGraph};
