//! Clocked programs and stage approximations.

pub mod family;
pub mod program;
pub mod schedule;

pub use family::{
    dominant_f, limit_value, pi2_member_at, sigma2_member_at, ApproximationFamily, FamilyError,
    Semantics, Source, Truth,
};
pub use program::{eval_clocked, ClockedProgram, FuelSchedule, Outcome, ProgramList, Rule};
pub use schedule::Schedule;
