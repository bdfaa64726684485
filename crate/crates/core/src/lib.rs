//! Simulator and compiler for the plaquette surface code with mobile Ising anyons.

pub mod compile;
pub mod decorated;
pub mod engine;
pub mod error;
pub mod ghz;
pub mod graph;
pub mod kasteleyn;
pub mod moves;
pub mod oracle;
pub mod pathspec;
pub mod pauli;
pub mod protocol;
pub mod render;

pub use error::{Error, Result};
