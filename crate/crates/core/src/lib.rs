//! Discrete potential theory on weighted graphs.
//!
//! `potlab-core` builds metric measure graphs (lattices, slit squares, power
//! cusps, Sierpinski carpet pre-fractals), computes Dirichlet Green tables,
//! heat kernels and capacities on them, and sweeps the boundary Harnack,
//! 3G, B-approximation and Carleson inequalities for their best empirical
//! constants. A conditional-gauge pipeline for Schrödinger potentials sits
//! on top of the Green tables.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `potlab` crate.
#![no_std]
// `!(x > 0.0)` rejects NaN along with nonpositive values; index loops
// mirror the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod gauge;
pub mod generators;
pub mod geometry;
pub mod linalg;
pub mod mmgraph;
pub mod num;
pub mod potential;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use mmgraph::{DomainView, MetricMeasureGraph, MetricMode};
