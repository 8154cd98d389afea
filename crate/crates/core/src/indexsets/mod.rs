//! Reduction gadgets, the bi-embeddability test and the degree classifier.

mod degree;
mod fixture;
mod reductions;

use thiserror::Error;

pub use degree::{biemb_test_cbec, classify_becat, Degree};
pub use fixture::{ReductionFixture, ReductionKind};
pub use reductions::{
    check_pi04_normalization, reduce_d01, reduce_d03, reduce_pi02, reduce_pi02_inf, reduce_pi04,
    reduce_sigma02, reduce_sigma04, ColumnPred, Pi04Pred, StagePred,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexSetError {
    #[error("profile is outside the bounded, finitely-many-infinite class: {0}")]
    OutsideClass(String),
    #[error("element {x} enumerated at stage {stage}, but enumerations need x < s")]
    LateEnumeration { x: u64, stage: u64 },
    #[error("predicate not normalized: {0}")]
    Normalization(String),
    #[error("fixture: {0}")]
    Fixture(String),
}
