//! Random polygons in the plane and in space.
//!
//! Samplers for Hopf-Gaussian arms and closed polygons, the symmetric
//! measure on closed polygons of length 2, radial-law arms and an
//! equilateral crankshaft chain; closed forms for expected total
//! curvature and related moments; adaptive quadrature against the
//! two-edge density; and a batched Monte Carlo driver whose results do
//! not depend on the number of worker threads.
//!
//! The `parallel` feature (on by default) runs batches on a rayon pool;
//! without it every batch runs on the calling thread.

// Negated comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod geom;
pub mod hopf;
pub mod io;
pub mod montecarlo;
pub mod quadrature;
pub mod samplers;
pub mod special;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
