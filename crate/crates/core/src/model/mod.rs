//! Immutable world model: packages, classes, extension groups, methods and
//! scripts, indexed for lookup.
//!
//! A [`World`] is the unit every other module operates on. It is constructed
//! once (by hand via [`WorldBuilder`] or by the frontend parser) and never
//! mutated afterwards, so it is safe to share across threads.

mod queries;
mod validate;

pub use queries::{ancestors, descendants, effective_imports};
pub use validate::{validate_world, DiagnosticKind, ValidationDiagnostic, ValidationReport};

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use crate::interp::ast::Stmt;

/// 1-based position of a declaration in its source file.
///
/// `UNKNOWN` (0:0) marks worlds assembled programmatically rather than parsed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceLoc {
    pub line: u32,
    pub col: u32,
}

impl SourceLoc {
    pub const UNKNOWN: SourceLoc = SourceLoc { line: 0, col: 0 };

    pub fn new(line: u32, col: u32) -> Self {
        SourceLoc { line, col }
    }

    pub fn is_known(&self) -> bool {
        *self != Self::UNKNOWN
    }
}

impl fmt::Display for SourceLoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_known() {
            write!(f, "{}:{}", self.line, self.col)
        } else {
            write!(f, "?:?")
        }
    }
}

/// Selector name plus arity; the unit of method identity within one
/// class x extension cell. Rendered canonically as `name/arity`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub name: String,
    pub arity: usize,
}

impl Signature {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Signature { name: name.into(), arity }
    }

    /// Parses the canonical `name/arity` form.
    pub fn parse(s: &str) -> Option<Signature> {
        let (name, arity) = s.rsplit_once('/')?;
        if name.is_empty() {
            return None;
        }
        let arity = arity.parse().ok()?;
        Some(Signature::new(name, arity))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Reference to an extension group.
///
/// `Global` is the distinguished extension holding every regular method; it
/// exists in every world and cannot be declared or imported by user code.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtensionRef {
    Global,
    User { package: String, name: String },
}

/// Reserved name of the implicit global extension.
pub const GLOBAL_NAME: &str = "global";

impl ExtensionRef {
    pub fn user(package: impl Into<String>, name: impl Into<String>) -> Self {
        ExtensionRef::User { package: package.into(), name: name.into() }
    }

    pub fn is_global(&self) -> bool {
        matches!(self, ExtensionRef::Global)
    }

    /// Extension name without the package qualifier (`global` for the
    /// global extension).
    pub fn name(&self) -> &str {
        match self {
            ExtensionRef::Global => GLOBAL_NAME,
            ExtensionRef::User { name, .. } => name,
        }
    }

    /// Declaring package, absent for the global extension.
    pub fn package(&self) -> Option<&str> {
        match self {
            ExtensionRef::Global => None,
            ExtensionRef::User { package, .. } => Some(package),
        }
    }

    /// Parses the `package.name` form used in import lists and on the
    /// command line. The bare word `global` maps to the global extension.
    pub fn parse(s: &str) -> Option<ExtensionRef> {
        if s == GLOBAL_NAME {
            return Some(ExtensionRef::Global);
        }
        let (package, name) = s.split_once('.')?;
        if package.is_empty() || name.is_empty() || name.contains('.') {
            return None;
        }
        Some(ExtensionRef::user(package, name))
    }
}

impl fmt::Display for ExtensionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionRef::Global => write!(f, "{GLOBAL_NAME}"),
            ExtensionRef::User { package, name } => write!(f, "{package}.{name}"),
        }
    }
}

/// Identity of a method: host class, signature, and owning extension.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MethodId {
    pub class: String,
    pub signature: Signature,
    pub extension: ExtensionRef,
}

impl MethodId {
    pub fn new(class: impl Into<String>, signature: Signature, extension: ExtensionRef) -> Self {
        MethodId { class: class.into(), signature, extension }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.extension.is_global() {
            write!(f, "{}.{}", self.class, self.signature)
        } else {
            write!(f, "{}.{}@{}", self.class, self.signature, self.extension)
        }
    }
}

/// Identity of a script: package plus script name (unique per package).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScriptId {
    pub package: String,
    pub name: String,
}

impl ScriptId {
    pub fn new(package: impl Into<String>, name: impl Into<String>) -> Self {
        ScriptId { package: package.into(), name: name.into() }
    }
}

impl fmt::Display for ScriptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.package, self.name)
    }
}

/// Class declaration. Class names are globally unique across packages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDef {
    pub name: String,
    pub package: String,
    pub superclass: Option<String>,
    pub fields: Vec<String>,
    pub class_imports: Vec<ExtensionRef>,
    pub loc: SourceLoc,
}

/// Extension group declaration. Its method set is populated when the world
/// is built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionDef {
    pub ref_: ExtensionRef,
    pub methods: BTreeSet<MethodId>,
    pub loc: SourceLoc,
}

/// A method body plus its declaration context. Regular methods live in the
/// global extension; extension methods in a named user extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodDef {
    pub id: MethodId,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    pub method_imports: Vec<ExtensionRef>,
    pub loc: SourceLoc,
}

impl MethodDef {
    pub fn class(&self) -> &str {
        &self.id.class
    }

    pub fn signature(&self) -> &Signature {
        &self.id.signature
    }

    pub fn extension(&self) -> &ExtensionRef {
        &self.id.extension
    }
}

/// An entry-point statement sequence; scripts form the bottom frame of an
/// evaluation so the call stack is never headless.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptDef {
    pub id: ScriptId,
    pub imports: Vec<ExtensionRef>,
    pub body: Vec<Stmt>,
    pub loc: SourceLoc,
}

/// Package declaration: the deployment unit grouping classes, extensions
/// and scripts, with its own import list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackageDef {
    pub name: String,
    pub package_imports: Vec<ExtensionRef>,
    pub classes: BTreeSet<String>,
    pub extensions: BTreeSet<String>,
    pub scripts: BTreeSet<String>,
    pub loc: SourceLoc,
}

/// Whether class-level imports propagate to subclasses (Ruby-refinements
/// style). Off by default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ImportConfig {
    pub refinement_inheritance: bool,
}

impl ImportConfig {
    pub fn with_refinement_inheritance() -> Self {
        ImportConfig { refinement_inheritance: true }
    }
}

/// Errors from hierarchy queries on a world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    UnknownClass(String),
    CyclicHierarchy(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::UnknownClass(c) => write!(f, "unknown class `{c}`"),
            ModelError::CyclicHierarchy(c) => {
                write!(f, "cyclic superclass chain through `{c}`")
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// The immutable universe all lookup, evaluation and analysis runs against.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct World {
    packages: BTreeMap<String, PackageDef>,
    classes: BTreeMap<String, ClassDef>,
    extensions: BTreeMap<ExtensionRef, ExtensionDef>,
    methods: Vec<MethodDef>,
    scripts: BTreeMap<ScriptId, ScriptDef>,
    method_index: BTreeMap<MethodId, usize>,
}

impl World {
    pub fn builder() -> WorldBuilder {
        WorldBuilder::default()
    }

    pub fn packages(&self) -> impl Iterator<Item = &PackageDef> {
        self.packages.values()
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDef> {
        self.classes.values()
    }

    /// All extensions including the implicit global one.
    pub fn extensions(&self) -> impl Iterator<Item = &ExtensionDef> {
        self.extensions.values()
    }

    /// Methods in declaration order, duplicates included.
    pub fn methods(&self) -> impl Iterator<Item = &MethodDef> {
        self.methods.iter()
    }

    pub fn scripts(&self) -> impl Iterator<Item = &ScriptDef> {
        self.scripts.values()
    }

    pub fn package(&self, name: &str) -> Option<&PackageDef> {
        self.packages.get(name)
    }

    pub fn class(&self, name: &str) -> Option<&ClassDef> {
        self.classes.get(name)
    }

    pub fn extension(&self, ref_: &ExtensionRef) -> Option<&ExtensionDef> {
        self.extensions.get(ref_)
    }

    pub fn script(&self, id: &ScriptId) -> Option<&ScriptDef> {
        self.scripts.get(id)
    }

    /// Resolves a script by bare name when it is unique across packages,
    /// or by its qualified `package.name` form.
    pub fn find_script(&self, name: &str) -> Option<&ScriptDef> {
        if let Some((package, bare)) = name.split_once('.') {
            return self.script(&ScriptId::new(package, bare));
        }
        let mut found = None;
        for script in self.scripts.values() {
            if script.id.name == name {
                if found.is_some() {
                    return None; // ambiguous
                }
                found = Some(script);
            }
        }
        found
    }

    /// The partial `method` function: the method a given extension defines
    /// for a given class and signature, if any.
    pub fn method(&self, class: &str, sig: &Signature, ext: &ExtensionRef) -> Option<&MethodDef> {
        let id = MethodId::new(class, sig.clone(), ext.clone());
        self.method_by_id(&id)
    }

    pub fn method_by_id(&self, id: &MethodId) -> Option<&MethodDef> {
        self.method_index.get(id).map(|&i| &self.methods[i])
    }

    /// Declaring package of the definition a resolved method renders under:
    /// the extension's package for extension methods, the host class's
    /// package for regular (global) methods.
    pub fn defining_package<'a>(&'a self, class: &str, ext: &'a ExtensionRef) -> Option<&'a str> {
        match ext {
            ExtensionRef::Global => self.class(class).map(|c| c.package.as_str()),
            ExtensionRef::User { package, .. } => Some(package),
        }
    }

    /// Copy of this world with one extra method, used by the brute-force
    /// override-space enumeration.
    pub fn with_method(&self, def: MethodDef) -> World {
        let mut builder = WorldBuilder {
            packages: self.packages.values().cloned().collect(),
            classes: self.classes.values().cloned().collect(),
            extensions: self
                .extensions
                .values()
                .filter(|e| !e.ref_.is_global())
                .map(|e| (e.ref_.clone(), e.loc))
                .collect(),
            methods: self.methods.clone(),
            scripts: self.scripts.values().cloned().collect(),
        };
        builder.methods.push(def);
        builder.build()
    }
}

/// Accumulates declarations and freezes them into a [`World`].
///
/// Building never fails: unresolved references, duplicates and cycles are
/// left in place for [`validate_world`] to report. On duplicate method ids
/// the first declaration wins in the lookup index.
#[derive(Debug, Default)]
pub struct WorldBuilder {
    packages: Vec<PackageDef>,
    classes: Vec<ClassDef>,
    extensions: Vec<(ExtensionRef, SourceLoc)>,
    methods: Vec<MethodDef>,
    scripts: Vec<ScriptDef>,
}

impl WorldBuilder {
    pub fn package(mut self, name: &str, imports: Vec<ExtensionRef>) -> Self {
        self.packages.push(PackageDef {
            name: name.into(),
            package_imports: imports,
            classes: BTreeSet::new(),
            extensions: BTreeSet::new(),
            scripts: BTreeSet::new(),
            loc: SourceLoc::UNKNOWN,
        });
        self
    }

    pub fn class(self, name: &str, package: &str, superclass: Option<&str>) -> Self {
        self.class_full(name, package, superclass, vec![], vec![])
    }

    pub fn class_full(
        mut self,
        name: &str,
        package: &str,
        superclass: Option<&str>,
        fields: Vec<String>,
        class_imports: Vec<ExtensionRef>,
    ) -> Self {
        self.classes.push(ClassDef {
            name: name.into(),
            package: package.into(),
            superclass: superclass.map(Into::into),
            fields,
            class_imports,
            loc: SourceLoc::UNKNOWN,
        });
        self
    }

    pub fn extension(mut self, package: &str, name: &str) -> Self {
        self.extensions.push((ExtensionRef::user(package, name), SourceLoc::UNKNOWN));
        self
    }

    pub fn method(
        mut self,
        class: &str,
        sig: Signature,
        ext: ExtensionRef,
        params: Vec<String>,
        body: Vec<Stmt>,
        method_imports: Vec<ExtensionRef>,
    ) -> Self {
        self.methods.push(MethodDef {
            id: MethodId::new(class, sig, ext),
            params,
            body,
            method_imports,
            loc: SourceLoc::UNKNOWN,
        });
        self
    }

    pub fn script(
        mut self,
        package: &str,
        name: &str,
        imports: Vec<ExtensionRef>,
        body: Vec<Stmt>,
    ) -> Self {
        self.scripts.push(ScriptDef {
            id: ScriptId::new(package, name),
            imports,
            body,
            loc: SourceLoc::UNKNOWN,
        });
        self
    }

    pub fn push_package(&mut self, def: PackageDef) {
        self.packages.push(def);
    }

    pub fn push_class(&mut self, def: ClassDef) {
        self.classes.push(def);
    }

    pub fn push_extension(&mut self, ref_: ExtensionRef, loc: SourceLoc) {
        self.extensions.push((ref_, loc));
    }

    pub fn push_method(&mut self, def: MethodDef) {
        self.methods.push(def);
    }

    pub fn push_script(&mut self, def: ScriptDef) {
        self.scripts.push(def);
    }

    /// Declarations accumulated so far, duplicates included — the parser
    /// reads these to flag double declarations before they collapse into
    /// the indexed world.
    pub fn packages(&self) -> &[PackageDef] {
        &self.packages
    }

    pub fn classes(&self) -> &[ClassDef] {
        &self.classes
    }

    pub fn extension_decls(&self) -> &[(ExtensionRef, SourceLoc)] {
        &self.extensions
    }

    pub fn scripts(&self) -> &[ScriptDef] {
        &self.scripts
    }

    pub fn build(self) -> World {
        let mut world = World::default();

        for def in self.packages {
            world.packages.entry(def.name.clone()).or_insert(def);
        }
        // Packages referenced by members but never declared still get an
        // empty entry so cross-references resolve.
        let mut implicit_packages: BTreeSet<String> = BTreeSet::new();
        for c in &self.classes {
            implicit_packages.insert(c.package.clone());
        }
        for (e, _) in &self.extensions {
            if let Some(p) = e.package() {
                implicit_packages.insert(p.to_string());
            }
        }
        for s in &self.scripts {
            implicit_packages.insert(s.id.package.clone());
        }
        for name in implicit_packages {
            world.packages.entry(name.clone()).or_insert_with(|| PackageDef {
                name,
                package_imports: vec![],
                classes: BTreeSet::new(),
                extensions: BTreeSet::new(),
                scripts: BTreeSet::new(),
                loc: SourceLoc::UNKNOWN,
            });
        }

        for def in self.classes {
            if let Some(pkg) = world.packages.get_mut(&def.package) {
                pkg.classes.insert(def.name.clone());
            }
            world.classes.entry(def.name.clone()).or_insert(def);
        }

        world.extensions.insert(
            ExtensionRef::Global,
            ExtensionDef {
                ref_: ExtensionRef::Global,
                methods: BTreeSet::new(),
                loc: SourceLoc::UNKNOWN,
            },
        );
        for (ref_, loc) in self.extensions {
            if let (Some(pkg_name), false) = (ref_.package(), ref_.is_global()) {
                if let Some(pkg) = world.packages.get_mut(pkg_name) {
                    pkg.extensions.insert(ref_.name().to_string());
                }
            }
            world
                .extensions
                .entry(ref_.clone())
                .or_insert(ExtensionDef { ref_, methods: BTreeSet::new(), loc });
        }

        for def in self.scripts {
            if let Some(pkg) = world.packages.get_mut(&def.id.package) {
                pkg.scripts.insert(def.id.name.clone());
            }
            world.scripts.entry(def.id.clone()).or_insert(def);
        }

        world.methods = self.methods;
        for (i, def) in world.methods.iter().enumerate() {
            world.method_index.entry(def.id.clone()).or_insert(i);
            if let Some(ext) = world.extensions.get_mut(&def.id.extension) {
                ext.methods.insert(def.id.clone());
            }
        }

        world
    }
}
