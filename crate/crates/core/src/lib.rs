//! Integral fractional Laplacian on an interval with zero exterior data:
//! discretization, forward solves, an optimal-control problem on a norm
//! annulus, and diagnostics for the limit `s -> 1`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod control;
pub mod discretize;
pub mod error;
pub mod forward;
pub mod limitlab;
pub mod linalg;
pub mod specfun;
