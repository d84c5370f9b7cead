//! Sum-dominant (MSTD) correlated set pairs.
//!
//! Set kernels, the correlated probability model, Monte-Carlo and exact
//! estimators, fringe lower bounds, decaying-density phase scans and
//! minimal-pair searches.

pub mod cli;
pub mod enumerate;
pub mod error;
pub mod fringe;
pub mod minimal;
pub mod phase;
pub mod prob;
pub mod sampler;
pub mod sets;
pub mod verify;

pub use error::{Error, Result};
pub use prob::RhoVector;
pub use sets::{IntSet, SignedIntSet, SumDiffStats};
