//! Stage-by-stage constructions with audit logs.

mod af;
mod coder;
mod diag;
mod log;
mod simple_fin;
mod triangular;

use thiserror::Error;

use crate::approx::FamilyError;

pub use af::build_af;
pub use coder::{
    build_doublejump_coder, decode_transversal, index_of, string_at, strings_up_to,
    surviving_witnesses,
};
pub use diag::{
    diagonalize_unbounded, first_embedding_stage, graph_on, is_defeated, is_nonempty_embedding,
};
pub use log::{ConstructionLog, LogEntry, LogEvent, LogState};
pub use simple_fin::{build_simple_fin, check_accounting, check_designated_growth};
pub use triangular::{canonical_triangular, TriangularStructure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("no surviving witness codes bit {0}")]
    NoWitness(u64),
}
