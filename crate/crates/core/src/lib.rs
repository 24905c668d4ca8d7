//! Bid-level selection with special ordered sets.
//!
//! An [`Instance`](model::Instance) of businesses, campaigns and bid levels is
//! expanded into an LP with one SOS per campaign, relaxed with a bounded
//! primal simplex, and searched by SOS branch-and-bound with optional fixing
//! heuristics.

pub mod generate;
pub mod io;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod search;
pub mod simplex;

pub use scalar::Scalar;

pub type LpModelF64 = model::LpModel<f64>;
pub type LpModelF32 = model::LpModel<f32>;
pub type LpSolutionF64 = simplex::LpSolution<f64>;
