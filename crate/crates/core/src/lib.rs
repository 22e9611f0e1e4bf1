//! Combinatorial tropical geometry of curves: divisors and piecewise linear
//! functions on metric graphs, break divisors, tropicalization of extended
//! skeleta, and pipelines that refine a tropicalization until it is fully
//! faithful and smooth.

pub mod arrangement;
pub mod curve;
pub mod divisor;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod pl;
pub mod rational;
pub mod snf;
pub mod synthesis;
pub mod tropicalize;

pub use error::{Error, Result};
