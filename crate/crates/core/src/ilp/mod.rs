//! Exact linear systems over bounded integer variables and a feasibility
//! solver for them.

mod solver;
mod system;

pub use solver::{solve_feasibility, Feasibility, Solutions};
pub use system::{
    evaluate, Evaluation, IntAssignment, LinearRow, LinearSystem, Relation, VarBounds, VarId,
    Variable, Violation,
};
