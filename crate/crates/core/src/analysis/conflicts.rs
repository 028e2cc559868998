//! Accidental overwrite and override detection.
//!
//! Overwrites are same-cell collisions: several extensions define the same
//! (class, signature), and whichever is active simply replaces the others.
//! Overrides are cross-level collisions: a definition lower in the
//! hierarchy shadows a same-signature definition from an unrelated
//! extension higher up.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{ancestors, ExtensionRef, Signature, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverwriteKind {
    /// Only user extensions collide.
    ExtensionsOnly,
    /// A user extension collides with a regular method (monkey patch).
    OverwritesRegular,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverwriteConflict {
    pub class: String,
    pub signature: Signature,
    /// All extensions defining the cell, global first when present.
    pub extensions: Vec<ExtensionRef>,
    pub kind: OverwriteKind,
}

impl fmt::Display for OverwriteConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{} defined by ", self.class, self.signature)?;
        for (i, ext) in self.extensions.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{ext}")?;
        }
        Ok(())
    }
}

/// One conflict per (class, signature) cell claimed by at least two
/// distinct extensions, ordered by class then signature.
pub fn detect_overwrites(world: &World) -> Vec<OverwriteConflict> {
    let mut cells: BTreeMap<(String, Signature), BTreeSet<ExtensionRef>> = BTreeMap::new();
    for def in world.methods() {
        cells
            .entry((def.id.class.clone(), def.id.signature.clone()))
            .or_default()
            .insert(def.id.extension.clone());
    }
    cells
        .into_iter()
        .filter(|(_, exts)| exts.len() >= 2)
        .map(|((class, signature), exts)| {
            let kind = if exts.iter().any(ExtensionRef::is_global) {
                OverwriteKind::OverwritesRegular
            } else {
                OverwriteKind::ExtensionsOnly
            };
            OverwriteConflict {
                class,
                signature,
                extensions: exts.into_iter().collect(),
                kind,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverrideKind {
    /// A regular method shadows an extension method above it.
    RegularOverExtension,
    /// Two unrelated user extensions collide across hierarchy levels.
    ExtensionOverExtension,
    /// An extension method shadows a regular method above it.
    ExtensionOverRegular,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverrideConflict {
    /// The shadowing definition (subclass side).
    pub lower: (String, ExtensionRef),
    /// The shadowed definition, on a strict ancestor.
    pub upper: (String, ExtensionRef),
    pub signature: Signature,
    pub kind: OverrideKind,
}

impl fmt::Display for OverrideConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{} in {} overrides {}.{} in {}",
            self.lower.0, self.signature, self.lower.1, self.upper.0, self.signature,
            self.upper.1
        )
    }
}

/// All (lower, upper) pairs with equal signature where the upper class is
/// a strict ancestor of the lower and the extensions differ. Two regular
/// methods never conflict — that is ordinary overriding.
pub fn detect_overrides(world: &World) -> Vec<OverrideConflict> {
    let mut by_sig: BTreeMap<Signature, BTreeSet<(String, ExtensionRef)>> = BTreeMap::new();
    for def in world.methods() {
        by_sig
            .entry(def.id.signature.clone())
            .or_default()
            .insert((def.id.class.clone(), def.id.extension.clone()));
    }
    let mut out = Vec::new();
    for (signature, cells) in &by_sig {
        for (lower_class, lower_ext) in cells {
            let chain = ancestors(world, lower_class).unwrap_or_default();
            for (upper_class, upper_ext) in cells {
                if lower_ext == upper_ext || !chain.contains(upper_class) {
                    continue;
                }
                let kind = match (lower_ext.is_global(), upper_ext.is_global()) {
                    (true, false) => OverrideKind::RegularOverExtension,
                    (false, false) => OverrideKind::ExtensionOverExtension,
                    (false, true) => OverrideKind::ExtensionOverRegular,
                    (true, true) => unreachable!("equal extensions are filtered"),
                };
                out.push(OverrideConflict {
                    lower: (lower_class.clone(), lower_ext.clone()),
                    upper: (upper_class.clone(), upper_ext.clone()),
                    signature: signature.clone(),
                    kind,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        (&a.lower.0, &a.signature, &a.upper.0, &a.lower.1, &a.upper.1)
            .cmp(&(&b.lower.0, &b.signature, &b.upper.0, &b.lower.1, &b.upper.1))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Signature;

    fn ext(p: &str, e: &str) -> ExtensionRef {
        ExtensionRef::user(p, e)
    }

    fn sig(name: &str) -> Signature {
        Signature::new(name, 0)
    }

    #[test]
    fn competing_extensions_on_one_cell_are_an_overwrite() {
        let world = World::builder()
            .class("Object", "Core", None)
            .extension("SimpleLog", "Log")
            .extension("ObjectLog", "Log")
            .method("Object", sig("log"), ext("SimpleLog", "Log"), vec![], vec![], vec![])
            .method("Object", sig("log"), ext("ObjectLog", "Log"), vec![], vec![], vec![])
            .build();
        let conflicts = detect_overwrites(&world);
        assert_eq!(conflicts.len(), 1);
        assert_eq!(conflicts[0].kind, OverwriteKind::ExtensionsOnly);
        assert_eq!(
            conflicts[0].extensions,
            vec![ext("ObjectLog", "Log"), ext("SimpleLog", "Log")]
        );
        assert!(detect_overrides(&world).is_empty());
    }

    #[test]
    fn monkey_patch_is_flagged_against_the_regular_method() {
        let world = World::builder()
            .class("A", "P", None)
            .extension("Q", "E")
            .method("A", sig("m"), ExtensionRef::Global, vec![], vec![], vec![])
            .method("A", sig("m"), ext("Q", "E"), vec![], vec![], vec![])
            .build();
        let conflicts = detect_overwrites(&world);
        assert_eq!(conflicts.len(), 1);
        assert_eq!(conflicts[0].kind, OverwriteKind::OverwritesRegular);
        assert_eq!(conflicts[0].extensions[0], ExtensionRef::Global);
    }

    #[test]
    fn disjoint_signatures_yield_nothing() {
        let world = World::builder()
            .class("A", "P", None)
            .extension("Q", "E")
            .method("A", sig("m"), ext("Q", "E"), vec![], vec![], vec![])
            .method("A", sig("n"), ExtensionRef::Global, vec![], vec![], vec![])
            .build();
        assert!(detect_overwrites(&world).is_empty());
        assert!(detect_overrides(&world).is_empty());
    }

    /// Object has an extension log/0; Number (below it) declares a regular
    /// log/0.
    #[test]
    fn regular_method_shadowing_an_extension_above() {
        let world = World::builder()
            .class("Object", "Core", None)
            .class("Number", "Math", Some("Object"))
            .extension("LoggerPkg", "Logger")
            .method("Object", sig("log"), ext("LoggerPkg", "Logger"), vec![], vec![], vec![])
            .method("Number", sig("log"), ExtensionRef::Global, vec![], vec![], vec![])
            .build();
        let conflicts = detect_overrides(&world);
        assert_eq!(conflicts.len(), 1);
        let c = &conflicts[0];
        assert_eq!(c.kind, OverrideKind::RegularOverExtension);
        assert_eq!(c.lower, ("Number".into(), ExtensionRef::Global));
        assert_eq!(c.upper, ("Object".into(), ext("LoggerPkg", "Logger")));
    }

    #[test]
    fn extension_over_extension_and_over_regular() {
        let world = World::builder()
            .class("Object", "Core", None)
            .class("Number", "Math", Some("Object"))
            .extension("LoggerPkg", "Logger")
            .extension("MathX", "X")
            .method("Object", sig("log"), ext("LoggerPkg", "Logger"), vec![], vec![], vec![])
            .method("Number", sig("log"), ext("MathX", "X"), vec![], vec![], vec![])
            .method("Object", sig("show"), ExtensionRef::Global, vec![], vec![], vec![])
            .method("Number", sig("show"), ext("MathX", "X"), vec![], vec![], vec![])
            .build();
        let kinds: Vec<OverrideKind> =
            detect_overrides(&world).iter().map(|c| c.kind).collect();
        assert_eq!(
            kinds,
            vec![OverrideKind::ExtensionOverExtension, OverrideKind::ExtensionOverRegular]
        );
    }

    #[test]
    fn plain_overriding_between_regular_methods_is_not_a_conflict() {
        let world = World::builder()
            .class("A", "P", None)
            .class("B", "P", Some("A"))
            .method("A", sig("m"), ExtensionRef::Global, vec![], vec![], vec![])
            .method("B", sig("m"), ExtensionRef::Global, vec![], vec![], vec![])
            .build();
        assert!(detect_overrides(&world).is_empty());
    }

    #[test]
    fn upper_is_always_a_strict_ancestor() {
        let world = World::builder()
            .class("Object", "Core", None)
            .class("A", "P", Some("Object"))
            .class("B", "P", Some("A"))
            .extension("Q", "E1")
            .extension("Q", "E2")
            .method("Object", sig("m"), ext("Q", "E1"), vec![], vec![], vec![])
            .method("B", sig("m"), ext("Q", "E2"), vec![], vec![], vec![])
            .build();
        for c in detect_overrides(&world) {
            let chain = ancestors(&world, &c.lower.0).unwrap();
            assert!(chain.contains(&c.upper.0));
        }
    }
}
