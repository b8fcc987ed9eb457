//! Connectivity of solution graphs of Boolean constraint formulas with
//! constants.
//!
//! The crate classifies finite sets of Boolean relations by the complexity of
//! connectivity of their solution graphs, decides connectivity exactly by
//! brute force and in polynomial time for CPSS sets, exposes the Horn
//! structure behind the coNP-complete cases, and builds the corresponding
//! hardness gadgets.

pub mod catalog;
pub mod classify;
pub mod clausal;
pub mod constructions;
pub mod cpss;
pub mod error;
pub mod formula;
pub mod generate;
pub mod graph;
pub mod horn;
pub mod properties;
#[cfg(test)]
mod proptests;
pub mod relation;
pub mod sat;

pub use error::{Error, Result};
