//! Hierarchy walks and import flattening over a [`World`].

use std::collections::BTreeSet;
use std::collections::HashSet;

use super::{ExtensionRef, ImportConfig, MethodDef, ModelError, ScriptDef, World};

/// Strict transitive superclass chain of `class`, nearest first. Empty for
/// a root. A dangling superclass reference ends the chain (validation
/// reports it separately); a cycle is an error.
pub fn ancestors(world: &World, class: &str) -> Result<Vec<String>, ModelError> {
    if world.class(class).is_none() {
        return Err(ModelError::UnknownClass(class.to_string()));
    }
    let mut chain = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();
    seen.insert(class);
    let mut current = class;
    while let Some(def) = world.class(current) {
        let Some(superclass) = def.superclass.as_deref() else {
            break;
        };
        if !seen.insert(superclass) {
            return Err(ModelError::CyclicHierarchy(superclass.to_string()));
        }
        if world.class(superclass).is_some() {
            chain.push(superclass.to_string());
        }
        current = superclass;
    }
    Ok(chain)
}

/// Strict transitive subclasses of `class`, as a set.
pub fn descendants(world: &World, class: &str) -> Result<BTreeSet<String>, ModelError> {
    if world.class(class).is_none() {
        return Err(ModelError::UnknownClass(class.to_string()));
    }
    let mut out = BTreeSet::new();
    for candidate in world.classes() {
        if candidate.name == class {
            continue;
        }
        // A broken or cyclic chain simply means "not a descendant".
        if let Ok(chain) = ancestors(world, &candidate.name) {
            if chain.iter().any(|a| a == class) {
                out.insert(candidate.name.clone());
            }
        }
    }
    Ok(out)
}

/// A declaration site whose import list can feed a call-stack frame.
#[derive(Clone, Copy, Debug)]
pub enum ImportSite<'a> {
    Method(&'a MethodDef),
    Script(&'a ScriptDef),
}

impl<'a> From<&'a MethodDef> for ImportSite<'a> {
    fn from(def: &'a MethodDef) -> Self {
        ImportSite::Method(def)
    }
}

impl<'a> From<&'a ScriptDef> for ImportSite<'a> {
    fn from(def: &'a ScriptDef) -> Self {
        ImportSite::Script(def)
    }
}

/// Flattens the import declarations visible from one site into a single
/// priority-ordered sequence: innermost level first, first occurrence kept
/// on duplicates, global never included.
///
/// - Regular method: method-level, then its class's class-level (plus, with
///   refinement inheritance, each ancestor's class-level, nearest ancestor
///   first), then the class's package-level.
/// - Extension method: method-level, then the extension's declaring
///   package's package-level. The target class's own imports are lexically
///   out of scope for code written elsewhere.
/// - Script: script-level, then its package-level.
pub fn effective_imports(
    world: &World,
    site: ImportSite<'_>,
    config: ImportConfig,
) -> Vec<ExtensionRef> {
    let mut layers: Vec<&[ExtensionRef]> = Vec::new();
    match site {
        ImportSite::Method(def) => {
            layers.push(&def.method_imports);
            match &def.id.extension {
                ExtensionRef::Global => {
                    if let Some(host) = world.class(&def.id.class) {
                        layers.push(&host.class_imports);
                        if config.refinement_inheritance {
                            for name in ancestors(world, &host.name).unwrap_or_default() {
                                if let Some(anc) = world.class(&name) {
                                    layers.push(&anc.class_imports);
                                }
                            }
                        }
                        if let Some(pkg) = world.package(&host.package) {
                            layers.push(&pkg.package_imports);
                        }
                    }
                }
                ExtensionRef::User { package, .. } => {
                    if let Some(pkg) = world.package(package) {
                        layers.push(&pkg.package_imports);
                    }
                }
            }
        }
        ImportSite::Script(def) => {
            layers.push(&def.imports);
            if let Some(pkg) = world.package(&def.id.package) {
                layers.push(&pkg.package_imports);
            }
        }
    }
    flatten(layers)
}

fn flatten(layers: Vec<&[ExtensionRef]>) -> Vec<ExtensionRef> {
    let mut out: Vec<ExtensionRef> = Vec::new();
    for layer in layers {
        for ext in layer {
            if !ext.is_global() && !out.contains(ext) {
                out.push(ext.clone());
            }
        }
    }
    out
}
