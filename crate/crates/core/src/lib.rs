//! Numerical laboratory for cyclicity of the shift operator on spaces of
//! analytic functions in the unit disc.

pub mod error;
pub mod polyrat;
pub mod quadrature;
pub mod spaces;
pub mod approximants;
pub mod outerlab;
pub mod corona;
pub mod growth;
pub mod cli;

pub use error::{LabError, Result};
