//! Deciding z-resiliency of a partitioned system by walking every admissible
//! z-scenario and asking the integer solver for a matching x.

mod check;
mod system;

pub use check::{
    check_resiliency, check_resiliency_with, enumerate_scenarios, failing_scenarios, substitute,
    EngineOptions, ExhaustiveReport, Outcome, ResiliencyVerdict, Scenarios,
};
pub use system::{Block, ResiliencySystem};
