//! Embedding synthesis at three effectiveness levels, exact verification of
//! partial embeddings, and a brute-force embeddability oracle.

pub mod bounded;
pub mod delta2;
pub mod delta3;
pub mod map;
pub mod oracle;

use thiserror::Error;

use crate::Element;

pub use bounded::embed_bounded;
pub use delta2::embed_delta2;
pub use delta3::{embed_delta3, InfOracle};
pub use map::{
    check_partial_embedding, class_images, verify_partial_embedding, MapFile, MindChangeLog,
    PartialMap, StagedMap, Violation,
};
pub use oracle::{brute_force_embedding, brute_force_embeds, finite_embeds};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("element {element} is not in the {side} structure")]
    Dangling { element: Element, side: &'static str },
    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("target exhausted: {0}")]
    Exhausted(String),
}
