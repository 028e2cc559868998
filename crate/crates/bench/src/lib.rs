//! Shared setup for the dispatch benchmarks: canned worlds, stacks, and
//! message contexts large enough to make strategy costs visible.

use semx_core::frontend::fixture_world;
use semx_core::worldgen;
use semx_core::{Frame, MessageContext, ScriptId, Signature, World};

pub fn fig6() -> World {
    fixture_world("fig6").expect("fig6 parses")
}

pub fn fig6_case_d() -> ScriptId {
    ScriptId::new("P4", "caseD")
}

/// The stack fig6's caseD has built when the contested send happens.
pub fn fig6_deep_stack(world: &World) -> Vec<Frame> {
    let method = |class: &str, sel: &str, arity: usize| {
        let def = world
            .methods()
            .find(|m| m.id.class == class && m.id.signature == Signature::new(sel, arity))
            .expect("fixture method");
        Frame::Method(def.id.clone())
    };
    vec![
        Frame::Script(fig6_case_d()),
        method("C3", "sendSelfSendToVia", 2),
        method("C2", "sendSelfSendTo", 1),
        method("C1", "selfSend", 0),
    ]
}

/// A reproducible probe world for the override-space benchmarks.
pub fn probe_world(seed: u64) -> (World, MessageContext) {
    worldgen::random_clean_aos_world(&mut worldgen::rng(seed))
}
