//! Cluster seeds on braid varieties: words over simply-laced Dynkin diagrams, exchange and
//! compatible matrices, mutation, Lusztig parameter bookkeeping and finite-field point counts.

// Matrix code reads best with explicit row and column indices.
#![allow(clippy::needless_range_loop)]

pub mod clusterengine;
pub mod error;
pub mod flagnum;
pub mod lusztig;
pub mod rootdata;
pub mod seedcore;
pub mod words;

pub use error::{Error, ErrorKind, Result};
