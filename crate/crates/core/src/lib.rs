//! Numerical tools for quasifuchsian once-punctured torus groups: trace
//! coordinates, Fuchsian length geometry, pleating-variety solvers and a
//! harness of falsifiable experiments on bending measures.

pub mod conjecture;
pub mod curves;
pub mod error;
pub mod markov;
pub mod numeric;
pub mod pleating;
pub mod teich;

pub use curves::{intersection, IrrationalSlope, Lamination, Slope};
pub use error::{Error, Result};
pub use markov::{complex_length, GroupRep, TraceTriple};
