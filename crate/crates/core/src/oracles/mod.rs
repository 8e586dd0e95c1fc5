//! Brute-force deciders that work from problem definitions alone.
//!
//! Nothing here calls into the encoders or the engine; instance types are
//! read field by field. Every oracle is exponential and refuses work beyond
//! its budget with [`Error::Budget`](crate::Error::Budget).

mod bribery;
mod closest_string;
mod covers;
mod raw;
mod scheduling;
mod sources;

pub use bribery::bribery_oracle;
pub use closest_string::{closest_string_oracle, rcs_oracle};
pub use covers::{policy_oracle, rdscp_oracle, rdscp_packing_exists};
pub use raw::{exists_by_enumeration, forall_exists_oracle, forall_exists_oracle_with};
pub use scheduling::{makespan_oracle, sched_oracle};
pub use sources::{hitting_set_oracle, matching_3dm_oracle};

/// Default cap on the points a raw system oracle may visit.
pub const POINT_BUDGET: u64 = 10_000_000;
