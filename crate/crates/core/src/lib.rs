//! Budget-feasibility prediction for information-gathering agents.
//!
//! An agent that needs `I_total` bits to pin down a solution and gains `I_s`
//! bits per action of cost `C_s` has effective cost `(I_total / I_s) * C_s`.
//! This crate computes that quantity, checks its stopping-time bounds by
//! simulation, estimates it a priori with a Gaussian-process surrogate and
//! runs two benchmark experiments against it:
//!
//! - [`info`]: entropy primitives, effective cost and the solvability verdict.
//! - [`stopping`]: the sequential gain process, two-sided cost bounds and the
//!   high-probability step budget.
//! - [`gp`]: Gaussian-process regression and a-priori cost estimation.
//! - [`slope`]: noisy slope identification with a Bayesian grid agent.
//! - [`coloring`]: random-graph 3-coloring with three backtracking agents.
//! - [`approx`]: epsilon-approximate goal sets on brute-forceable instances.
//! - [`report`]: CSV emission shared by all experiments.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod coloring;
pub mod error;
pub mod gp;
pub mod info;
pub mod report;
pub mod seed;
pub mod slope;
pub mod stats;
pub mod stopping;

pub use error::{AcpError, Result};
pub use info::{Bits, CostModel, DiscreteDistribution};
