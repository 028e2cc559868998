//! Static analyses over worlds: conflict detection, the accidental
//! override space (AOS) metrics with independent formula and brute-force
//! paths, strategy dominance tables, and entity statistics.

mod aos;
mod conflicts;
mod dominance;
mod stats;

pub use aos::{
    aos_bruteforce, aos_extensions_first, aos_hierarchy_first, AosResult, MessageContext,
    MethodLocation,
};
pub use conflicts::{
    detect_overrides, detect_overwrites, OverrideConflict, OverrideKind, OverwriteConflict,
    OverwriteKind,
};
pub use dominance::{
    dominance_summary, dominance_sweep, dominance_table, DominanceRow, DominanceSummary,
    SweepCell,
};
pub use stats::{world_stats, WorldStats};

use std::fmt;

use crate::model::Signature;

#[derive(Clone, Debug, PartialEq)]
pub enum AnalysisError {
    /// The message context does not resolve to a method, so there is no
    /// base to measure an override space against.
    BaseMethodUndefined { receiver_class: String, signature: Signature },
    /// The brute-force path requires the signature to be defined at
    /// exactly one cell; another definition exists.
    PreconditionViolated { signature: Signature, offending: String },
    InvalidDomain(String),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::BaseMethodUndefined { receiver_class, signature } => {
                write!(f, "no method resolves for {receiver_class}.{signature}")
            }
            AnalysisError::PreconditionViolated { signature, offending } => {
                write!(
                    f,
                    "world is not clean for {signature}: also defined at {offending}"
                )
            }
            AnalysisError::InvalidDomain(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for AnalysisError {}
