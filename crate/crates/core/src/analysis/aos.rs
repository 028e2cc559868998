//! Accidental override space: the set of (class, extension) cells where a
//! same-signature method added later would silently steal an existing
//! message's dispatch.
//!
//! Two independent paths compute it: closed-form location sets per
//! selection strategy, and a brute-force oracle that actually inserts a
//! method at every candidate cell and re-runs the lookup. On clean worlds
//! the two must agree exactly — that equivalence is the load-bearing test
//! of this module.

use std::collections::BTreeSet;

use crate::lookup::{
    select_extensions_first, select_hierarchy_first, ActiveExtensions, SelectionStrategy,
};
use crate::model::{
    ancestors, descendants, ExtensionRef, MethodDef, MethodId, Signature, SourceLoc, World,
};

use super::AnalysisError;

/// The message whose dispatch stability is being measured.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageContext {
    pub receiver_class: String,
    pub signature: Signature,
    pub active_extensions: ActiveExtensions,
}

impl MessageContext {
    pub fn new(receiver_class: &str, signature: Signature, exts: ActiveExtensions) -> Self {
        MessageContext { receiver_class: receiver_class.to_string(), signature, active_extensions: exts }
    }
}

/// A candidate definition site: class plus position in the active
/// extension sequence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MethodLocation {
    pub class: String,
    /// 1-based index into the active extensions.
    pub ext_index: usize,
    pub extension: ExtensionRef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AosResult {
    /// Class whose row defines the base method.
    pub base_class: String,
    /// 1-based index of the base method's extension in the activation.
    pub base_index: usize,
    pub base_extension: ExtensionRef,
    pub locations: BTreeSet<MethodLocation>,
    /// Closed-form size; tests check it equals `locations.len()`.
    pub formula_size: usize,
}

fn location(class: &str, ext_index: usize, exts: &ActiveExtensions) -> MethodLocation {
    MethodLocation {
        class: class.to_string(),
        ext_index,
        extension: exts.get(ext_index).expect("index within activation").clone(),
    }
}

/// Override space under extensions-first selection.
///
/// A new method steals the dispatch from any subclass row under any other
/// extension (the subclass row is scanned before the base row), or from
/// the base row itself under a higher-priority extension. Same-extension
/// additions are that extension author's own intentional overrides and are
/// not counted.
pub fn aos_extensions_first(
    world: &World,
    mess: &MessageContext,
) -> Result<AosResult, AnalysisError> {
    let exts = &mess.active_extensions;
    let resolved =
        select_extensions_first(world, &mess.receiver_class, &mess.signature, exts.as_slice())
            .ok_or_else(|| AnalysisError::BaseMethodUndefined {
                receiver_class: mess.receiver_class.clone(),
                signature: mess.signature.clone(),
            })?;
    let c_def = resolved.class;
    let i = exts.index_of(&resolved.extension).expect("resolved extension is active");
    let desc = descendants(world, &c_def).expect("defining class exists");

    let mut locations = BTreeSet::new();
    for c_new in &desc {
        for j in 1..=exts.len() {
            if j != i {
                locations.insert(location(c_new, j, exts));
            }
        }
    }
    for j in 1..i {
        locations.insert(location(&c_def, j, exts));
    }
    let formula_size = desc.len() * (exts.len() - 1) + (i - 1);
    Ok(AosResult {
        base_class: c_def,
        base_index: i,
        base_extension: resolved.extension,
        locations,
        formula_size,
    })
}

/// Override space under hierarchy-first selection.
///
/// Only higher-priority extensions can steal the dispatch, but they can do
/// it from anywhere on the defining class's whole hierarchy — above as
/// well as below.
pub fn aos_hierarchy_first(
    world: &World,
    mess: &MessageContext,
) -> Result<AosResult, AnalysisError> {
    let exts = &mess.active_extensions;
    let resolved =
        select_hierarchy_first(world, &mess.receiver_class, &mess.signature, exts.as_slice())
            .ok_or_else(|| AnalysisError::BaseMethodUndefined {
                receiver_class: mess.receiver_class.clone(),
                signature: mess.signature.clone(),
            })?;
    let c_def = resolved.class;
    let i = exts.index_of(&resolved.extension).expect("resolved extension is active");
    let desc = descendants(world, &c_def).expect("defining class exists");
    let anc = ancestors(world, &c_def).expect("defining class exists");

    let mut family: Vec<&str> = desc.iter().map(String::as_str).collect();
    family.push(&c_def);
    family.extend(anc.iter().map(String::as_str));

    let mut locations = BTreeSet::new();
    for c_new in &family {
        for j in 1..i {
            locations.insert(location(c_new, j, exts));
        }
    }
    let formula_size = (desc.len() + anc.len() + 1) * (i - 1);
    Ok(AosResult {
        base_class: c_def,
        base_index: i,
        base_extension: resolved.extension,
        locations,
        formula_size,
    })
}

/// The oracle: tries every candidate cell by actually inserting a method
/// there and checking whether any receiver that used to reach the base
/// method now dispatches to the insertion.
///
/// Candidates in the base method's own extension are skipped — an author
/// redefining a signature inside their own extension overrides on
/// purpose. Requires a clean world: the signature must be defined at the
/// base cell only, otherwise counting is ambiguous and the call fails.
pub fn aos_bruteforce(
    world: &World,
    mess: &MessageContext,
    selection: SelectionStrategy,
) -> Result<BTreeSet<MethodLocation>, AnalysisError> {
    let exts = &mess.active_extensions;
    let select = match selection {
        SelectionStrategy::ExtensionsFirst => select_extensions_first,
        SelectionStrategy::HierarchyFirst => select_hierarchy_first,
    };
    let resolved = select(world, &mess.receiver_class, &mess.signature, exts.as_slice())
        .ok_or_else(|| AnalysisError::BaseMethodUndefined {
            receiver_class: mess.receiver_class.clone(),
            signature: mess.signature.clone(),
        })?;
    for def in world.methods() {
        if def.id.signature == mess.signature && def.id != resolved.method {
            return Err(AnalysisError::PreconditionViolated {
                signature: mess.signature.clone(),
                offending: def.id.to_string(),
            });
        }
    }
    let c_def = &resolved.class;
    let i = exts.index_of(&resolved.extension).expect("resolved extension is active");
    let mut receivers: Vec<String> =
        descendants(world, c_def).expect("defining class exists").into_iter().collect();
    receivers.push(c_def.clone());

    let params: Vec<String> =
        (0..mess.signature.arity).map(|k| format!("p{k}")).collect();
    let mut out = BTreeSet::new();
    for class in world.classes() {
        for j in 1..=exts.len() {
            if j == i {
                continue;
            }
            let ext = exts.get(j).unwrap().clone();
            let new_id = MethodId::new(&class.name, mess.signature.clone(), ext);
            let candidate = world.with_method(MethodDef {
                id: new_id.clone(),
                params: params.clone(),
                body: vec![],
                method_imports: vec![],
                loc: SourceLoc::UNKNOWN,
            });
            let stolen = receivers.iter().any(|r| {
                select(&candidate, r, &mess.signature, exts.as_slice())
                    .is_some_and(|hit| hit.method == new_id)
            });
            if stolen {
                out.insert(location(&class.name, j, exts));
            }
        }
    }
    Ok(out)
}
