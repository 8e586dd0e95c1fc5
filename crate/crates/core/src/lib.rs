//! Decide whether a partitioned integer linear system is z-resilient: for
//! every admissible integral assignment of the adversarial z-variables there
//! is an integral x satisfying the remaining rows.
//!
//! Besides the engine the crate ships encoders for four resiliency problems
//! (disjoint set cover, closest string, makespan scheduling, swap bribery),
//! generators for two hardness reductions, and brute-force oracles used to
//! cross-check every encoder.

pub mod bribery;
pub mod closest_string;
pub mod engine;
pub mod error;
pub mod format;
pub mod ilp;
pub mod oracles;
pub mod random;
pub mod rational;
pub mod rdscp;
pub mod scheduling;

pub use engine::{check_resiliency, Block, ResiliencySystem, ResiliencyVerdict};
pub use error::{Error, Result};
pub use ilp::{IntAssignment, LinearRow, LinearSystem, Relation, VarBounds, VarId};
pub use rational::Rational;
