//! Hardy-type nonlocality tests for entangled pure states.
//!
//! The pipeline runs from a state vector to a Schmidt decomposition, then to
//! the four Hardy observables and their joint probability table, and finally
//! to a linear-programming certificate that no local hidden-variable mixture
//! reproduces that table.

pub mod cli;
pub mod eigen;
pub mod format;
pub mod error;
pub mod hardy;
pub mod lhv;
pub mod multipartite;
pub mod sampler;
pub mod scan;
pub mod schmidt;
pub mod simplex;
pub mod statefile;
pub mod table;
pub mod tensor;

pub use error::{Error, Result};
