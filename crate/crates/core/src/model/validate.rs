//! Whole-world consistency checking.
//!
//! Validation never mutates: it walks the world and reports every broken
//! invariant as a diagnostic. A world with an empty report is safe for
//! lookup, evaluation and analysis.

use std::collections::HashSet;
use std::fmt;

use crate::interp::ast::{Expr, Stmt};

use super::{ExtensionRef, SourceLoc, World, GLOBAL_NAME};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticKind {
    CyclicHierarchy,
    UnknownClass,
    UnknownExtension,
    DuplicateMethod,
    ReservedName,
    /// Body names a parameter or field that is not declared, or uses
    /// `self`/`field` outside a method.
    UnknownReference,
    /// Duplicate field or parameter names within one declaration.
    DuplicateName,
    /// Declared arity disagrees with the parameter count.
    ArityMismatch,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagnosticKind::CyclicHierarchy => "cyclic-hierarchy",
            DiagnosticKind::UnknownClass => "unknown-class",
            DiagnosticKind::UnknownExtension => "unknown-extension",
            DiagnosticKind::DuplicateMethod => "duplicate-method",
            DiagnosticKind::ReservedName => "reserved-name",
            DiagnosticKind::UnknownReference => "unknown-reference",
            DiagnosticKind::DuplicateName => "duplicate-name",
            DiagnosticKind::ArityMismatch => "arity-mismatch",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationDiagnostic {
    pub kind: DiagnosticKind,
    /// Rendering of the entity the diagnostic is about, e.g. a class name
    /// or a method id.
    pub entity: String,
    pub loc: SourceLoc,
    pub message: String,
}

impl fmt::Display for ValidationDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.loc.is_known() {
            write!(f, "{}: [{}] {}: {}", self.loc, self.kind, self.entity, self.message)
        } else {
            write!(f, "[{}] {}: {}", self.kind, self.entity, self.message)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<ValidationDiagnostic>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn kinds(&self) -> Vec<DiagnosticKind> {
        self.diagnostics.iter().map(|d| d.kind).collect()
    }
}

/// Checks every world invariant: resolvable references, hierarchy
/// acyclicity, reserved names, method-set consistency, and body
/// well-formedness. Diagnostics come out in a fixed order (classes,
/// extensions, packages, methods, scripts; declaration order within the
/// method list).
pub fn validate_world(world: &World) -> ValidationReport {
    let mut v = Validator { world, diagnostics: Vec::new() };
    v.check_classes();
    v.check_extensions();
    v.check_packages();
    v.check_methods();
    v.check_scripts();
    ValidationReport { diagnostics: v.diagnostics }
}

struct Validator<'w> {
    world: &'w World,
    diagnostics: Vec<ValidationDiagnostic>,
}

impl<'w> Validator<'w> {
    fn push(&mut self, kind: DiagnosticKind, entity: &str, loc: SourceLoc, message: String) {
        self.diagnostics.push(ValidationDiagnostic {
            kind,
            entity: entity.to_string(),
            loc,
            message,
        });
    }

    fn check_classes(&mut self) {
        let world = self.world;
        let class_count = world.classes().count();
        for class in world.classes() {
            if class.name == GLOBAL_NAME {
                self.push(
                    DiagnosticKind::ReservedName,
                    &class.name,
                    class.loc,
                    "`global` is reserved".into(),
                );
            }
            if let Some(superclass) = &class.superclass {
                if world.class(superclass).is_none() {
                    self.push(
                        DiagnosticKind::UnknownClass,
                        &class.name,
                        class.loc,
                        format!("superclass `{superclass}` is not declared"),
                    );
                }
            }
            // A class sits on a cycle iff walking its chain revisits it.
            let mut current = class.superclass.clone();
            for _ in 0..=class_count {
                let Some(name) = current else { break };
                if name == class.name {
                    self.push(
                        DiagnosticKind::CyclicHierarchy,
                        &class.name,
                        class.loc,
                        "class is its own transitive superclass".into(),
                    );
                    break;
                }
                current = world.class(&name).and_then(|c| c.superclass.clone());
            }
            let mut seen = HashSet::new();
            for field in &class.fields {
                if !seen.insert(field.as_str()) {
                    self.push(
                        DiagnosticKind::DuplicateName,
                        &class.name,
                        class.loc,
                        format!("field `{field}` declared twice"),
                    );
                }
            }
            self.check_imports(&class.class_imports, &class.name, class.loc);
        }
    }

    fn check_extensions(&mut self) {
        let world = self.world;
        for ext in world.extensions() {
            if let ExtensionRef::User { name, .. } = &ext.ref_ {
                if name == GLOBAL_NAME {
                    self.push(
                        DiagnosticKind::ReservedName,
                        &ext.ref_.to_string(),
                        ext.loc,
                        "`global` is reserved".into(),
                    );
                }
            }
        }
    }

    fn check_packages(&mut self) {
        let world = self.world;
        for pkg in world.packages() {
            self.check_imports(&pkg.package_imports, &pkg.name, pkg.loc);
        }
    }

    fn check_imports(&mut self, imports: &[ExtensionRef], entity: &str, loc: SourceLoc) {
        for import in imports {
            match import {
                ExtensionRef::Global => {
                    self.push(
                        DiagnosticKind::ReservedName,
                        entity,
                        loc,
                        "the global extension cannot be imported".into(),
                    );
                }
                ExtensionRef::User { name, .. } => {
                    if name == GLOBAL_NAME {
                        self.push(
                            DiagnosticKind::ReservedName,
                            entity,
                            loc,
                            "`global` is reserved".into(),
                        );
                    } else if self.world.extension(import).is_none() {
                        self.push(
                            DiagnosticKind::UnknownExtension,
                            entity,
                            loc,
                            format!("import `{import}` does not resolve"),
                        );
                    }
                }
            }
        }
    }

    fn check_methods(&mut self) {
        let world = self.world;
        let mut seen_ids = HashSet::new();
        for def in world.methods() {
            let entity = def.id.to_string();
            if !seen_ids.insert(def.id.clone()) {
                self.push(
                    DiagnosticKind::DuplicateMethod,
                    &entity,
                    def.loc,
                    "same class, signature and extension declared twice".into(),
                );
            }
            if world.class(&def.id.class).is_none() {
                self.push(
                    DiagnosticKind::UnknownClass,
                    &entity,
                    def.loc,
                    format!("target class `{}` is not declared", def.id.class),
                );
            }
            if let ExtensionRef::User { .. } = &def.id.extension {
                if world.extension(&def.id.extension).is_none() {
                    self.push(
                        DiagnosticKind::UnknownExtension,
                        &entity,
                        def.loc,
                        format!("extension `{}` is not declared", def.id.extension),
                    );
                }
            }
            if def.params.len() != def.id.signature.arity {
                self.push(
                    DiagnosticKind::ArityMismatch,
                    &entity,
                    def.loc,
                    format!(
                        "signature says {} parameter(s), {} declared",
                        def.id.signature.arity,
                        def.params.len()
                    ),
                );
            }
            let mut seen = HashSet::new();
            for param in &def.params {
                if !seen.insert(param.as_str()) {
                    self.push(
                        DiagnosticKind::DuplicateName,
                        &entity,
                        def.loc,
                        format!("parameter `{param}` declared twice"),
                    );
                }
            }
            self.check_imports(&def.method_imports, &entity, def.loc);
            let fields = world
                .class(&def.id.class)
                .map(|c| c.fields.as_slice())
                .unwrap_or(&[]);
            self.check_body(
                &def.body,
                &entity,
                def.loc,
                BodyContext { in_method: true, params: &def.params, fields },
            );
        }
    }

    fn check_scripts(&mut self) {
        let world = self.world;
        for script in world.scripts() {
            let entity = script.id.to_string();
            self.check_imports(&script.imports, &entity, script.loc);
            self.check_body(
                &script.body,
                &entity,
                script.loc,
                BodyContext { in_method: false, params: &[], fields: &[] },
            );
        }
    }

    fn check_body(&mut self, body: &[Stmt], entity: &str, loc: SourceLoc, ctx: BodyContext<'_>) {
        for stmt in body {
            match stmt {
                Stmt::Expr(e) | Stmt::Return(e) => self.check_expr(e, entity, loc, ctx),
                Stmt::Fail(_) => {}
            }
        }
    }

    fn check_expr(&mut self, expr: &Expr, entity: &str, loc: SourceLoc, ctx: BodyContext<'_>) {
        match expr {
            Expr::SelfRef => {
                if !ctx.in_method {
                    self.push(
                        DiagnosticKind::UnknownReference,
                        entity,
                        loc,
                        "`self` used outside a method".into(),
                    );
                }
            }
            Expr::ParamRef(name) => {
                if !ctx.params.iter().any(|p| p == name) {
                    self.push(
                        DiagnosticKind::UnknownReference,
                        entity,
                        loc,
                        format!("`{name}` is not a parameter"),
                    );
                }
            }
            Expr::FieldRef(name) => {
                if !ctx.in_method {
                    self.push(
                        DiagnosticKind::UnknownReference,
                        entity,
                        loc,
                        "`field` used outside a method".into(),
                    );
                } else if !ctx.fields.iter().any(|f| f == name) {
                    self.push(
                        DiagnosticKind::UnknownReference,
                        entity,
                        loc,
                        format!("`{name}` is not a field of the host class"),
                    );
                }
            }
            Expr::New { class, args } => {
                if self.world.class(class).is_none() {
                    self.push(
                        DiagnosticKind::UnknownClass,
                        entity,
                        loc,
                        format!("`new {class}` names an undeclared class"),
                    );
                }
                for arg in args {
                    self.check_expr(arg, entity, loc, ctx);
                }
            }
            Expr::IntLiteral(_) | Expr::StringLiteral(_) => {}
            Expr::Send { receiver, args, .. } => {
                self.check_expr(receiver, entity, loc, ctx);
                for arg in args {
                    self.check_expr(arg, entity, loc, ctx);
                }
            }
        }
    }
}

#[derive(Clone, Copy)]
struct BodyContext<'a> {
    in_method: bool,
    params: &'a [String],
    fields: &'a [String],
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::ast::build::*;
    use crate::model::Signature;

    #[test]
    fn well_formed_world_is_ok() {
        let world = World::builder()
            .class("Object", "Core", None)
            .class("C1", "P1", Some("Object"))
            .extension("P2", "E2")
            .method(
                "C1",
                Signature::new("redefined", 0),
                ExtensionRef::user("P2", "E2"),
                vec![],
                vec![ret(str("P2"))],
                vec![],
            )
            .build();
        let report = validate_world(&world);
        assert!(report.is_ok(), "{:?}", report.diagnostics);
    }

    #[test]
    fn two_class_cycle_is_reported_for_both() {
        let world = World::builder()
            .class("A", "P", Some("B"))
            .class("B", "P", Some("A"))
            .build();
        let report = validate_world(&world);
        assert_eq!(
            report.kinds(),
            vec![DiagnosticKind::CyclicHierarchy, DiagnosticKind::CyclicHierarchy]
        );
    }

    #[test]
    fn unresolved_import_is_unknown_extension() {
        let world = World::builder()
            .class("A", "P", None)
            .method(
                "A",
                Signature::new("m", 0),
                ExtensionRef::Global,
                vec![],
                vec![],
                vec![ExtensionRef::user("P9", "E9")],
            )
            .build();
        let report = validate_world(&world);
        assert_eq!(report.kinds(), vec![DiagnosticKind::UnknownExtension]);
    }

    #[test]
    fn duplicate_method_id_is_reported_once() {
        let sig = Signature::new("m", 0);
        let world = World::builder()
            .class("A", "P", None)
            .method("A", sig.clone(), ExtensionRef::Global, vec![], vec![], vec![])
            .method("A", sig, ExtensionRef::Global, vec![], vec![], vec![])
            .build();
        assert_eq!(validate_world(&world).kinds(), vec![DiagnosticKind::DuplicateMethod]);
    }

    #[test]
    fn global_is_reserved_as_extension_name_and_import() {
        let world = World::builder()
            .class("A", "P", None)
            .extension("P", "global")
            .build();
        assert!(validate_world(&world)
            .kinds()
            .contains(&DiagnosticKind::ReservedName));

        let world = World::builder()
            .class_full("A", "P", None, vec![], vec![ExtensionRef::Global])
            .build();
        assert_eq!(validate_world(&world).kinds(), vec![DiagnosticKind::ReservedName]);
    }

    #[test]
    fn body_references_are_checked() {
        let world = World::builder()
            .class_full("A", "P", None, vec!["x".into()], vec![])
            .method(
                "A",
                Signature::new("m", 1),
                ExtensionRef::Global,
                vec!["p".into()],
                vec![
                    expr(field("x")),
                    expr(param("q")),
                    expr(field("y")),
                    expr(new("Missing", vec![])),
                ],
                vec![],
            )
            .build();
        assert_eq!(
            validate_world(&world).kinds(),
            vec![
                DiagnosticKind::UnknownReference,
                DiagnosticKind::UnknownReference,
                DiagnosticKind::UnknownClass,
            ]
        );
    }

    #[test]
    fn scripts_reject_self_and_fields() {
        let world = World::builder()
            .script(
                "P",
                "main",
                vec![],
                vec![expr(self_send("m", vec![])), expr(field("x"))],
            )
            .build();
        assert_eq!(
            validate_world(&world).kinds(),
            vec![DiagnosticKind::UnknownReference, DiagnosticKind::UnknownReference]
        );
    }

    #[test]
    fn arity_and_parameter_checks() {
        let world = World::builder()
            .class("A", "P", None)
            .method(
                "A",
                Signature::new("m", 2),
                ExtensionRef::Global,
                vec!["p".into()],
                vec![],
                vec![],
            )
            .method(
                "A",
                Signature::new("n", 2),
                ExtensionRef::Global,
                vec!["p".into(), "p".into()],
                vec![],
                vec![],
            )
            .build();
        assert_eq!(
            validate_world(&world).kinds(),
            vec![DiagnosticKind::ArityMismatch, DiagnosticKind::DuplicateName]
        );
    }
}
