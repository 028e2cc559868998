//! Core of a toy object language with scoped extension methods.
//!
//! Packages extend foreign classes through named extension groups; which
//! extension wins a dispatch depends on two pluggable strategy axes: how
//! the call stack activates extensions (bottom-up or top-down local
//! rebinding, or lexical scoping) and how the active sequence is searched
//! against the class hierarchy (extensions-first or hierarchy-first).
//! The crate bundles the data model, the strategy-parameterized lookup, a
//! tracing interpreter, a DSL frontend, and static analyses of override
//! risk.

pub mod analysis;
pub mod frontend;
pub mod interp;
pub mod lookup;
pub mod model;
pub mod worldgen;

pub use analysis::{
    aos_bruteforce, aos_extensions_first, aos_hierarchy_first, detect_overrides,
    detect_overwrites, dominance_summary, dominance_sweep, dominance_table, world_stats,
    AnalysisError, AosResult, DominanceRow, DominanceSummary, MessageContext, MethodLocation,
    OverrideConflict, OverrideKind, OverwriteConflict, OverwriteKind, SweepCell, WorldStats,
};
pub use frontend::{export_world, parse_world, ParseDiagnostic, ParseDiagnosticKind};

pub use interp::ast::{Expr, Stmt, Value};
pub use interp::{evaluate, evaluate_matrix, DispatchRecord, EvalError, EvalFailure, EvalOutcome};
pub use lookup::{
    lookup, ActivationStrategy, ActiveExtensions, CallStack, Frame, LookupEngine, ResolvedMethod,
    SelectionStrategy, StrategyConfig,
};
pub use model::{
    ancestors, descendants, effective_imports, validate_world, ClassDef, DiagnosticKind,
    ExtensionDef, ExtensionRef, ImportConfig, MethodDef, MethodId, ModelError, PackageDef,
    ScriptDef, ScriptId, Signature, SourceLoc, ValidationDiagnostic, ValidationReport, World,
    WorldBuilder,
};
