//! Textual frontend: the `.semx` DSL, its parser and canonical export,
//! plus the embedded fixture corpus.

mod export;
pub mod fixtures;
mod lexer;
mod parser;

pub use export::export_world;
pub use fixtures::{
    declared_entity_counts, entity_counts, fixture_source, fixture_world, EntityCounts,
    FIXTURE_NAMES,
};
pub use parser::{parse_world, ParseDiagnostic, ParseDiagnosticKind};
