//! Fixed-point acceleration by double newtonisation.
//!
//! Given an iteration map `u` with a neutral fixed point, the first
//! newtonisation `v` converges linearly and the standard accelerator `w`
//! converges quadratically. Maps are evaluated on second-order jets so
//! both are computed from exact derivatives.

pub mod accelerators;
pub mod cli;
pub mod engine;
pub mod golden;
pub mod jets;
pub mod kernel;
pub mod maps;
pub mod method;
pub mod transforms;

pub use jets::{Jet2, Scalar};
pub use maps::{corpus_lookup, IterationMap, ProblemSpec};
pub use method::Method;
