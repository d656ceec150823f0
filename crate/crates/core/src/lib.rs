//! Exact homology of Hurwitz spaces and braid groups with Hurwitz-action
//! coefficients, plus the coefficient-system degree machinery used to
//! reason about homological stability.

pub mod braid;
pub mod coeffsys;
pub mod error;
pub mod experiments;
pub mod group;
pub mod homology;
pub mod integer;
pub mod matrix;
pub mod monodromy;
pub mod resolution;
pub mod snf;

pub use error::{Error, Result};
pub use integer::Integer;
