//! Canonical machine-readable form of a world.
//!
//! Key order is fixed by the struct declarations, entity order by the
//! world's sorted indices (methods keep declaration order), so exporting
//! the same world twice is byte-identical.

use serde::Serialize;

use crate::model::World;

#[derive(Serialize)]
struct ExportedWorld {
    packages: Vec<ExportedPackage>,
    classes: Vec<ExportedClass>,
    extensions: Vec<ExportedExtension>,
    methods: Vec<ExportedMethod>,
    scripts: Vec<ExportedScript>,
}

#[derive(Serialize)]
struct ExportedPackage {
    name: String,
    imports: Vec<String>,
    classes: Vec<String>,
    extensions: Vec<String>,
    scripts: Vec<String>,
}

#[derive(Serialize)]
struct ExportedClass {
    name: String,
    package: String,
    superclass: Option<String>,
    fields: Vec<String>,
    imports: Vec<String>,
}

#[derive(Serialize)]
struct ExportedExtension {
    name: String,
    package: Option<String>,
    methods: Vec<String>,
}

#[derive(Serialize)]
struct ExportedMethod {
    class: String,
    selector: String,
    extension: String,
    params: Vec<String>,
    imports: Vec<String>,
    body: Vec<String>,
}

#[derive(Serialize)]
struct ExportedScript {
    package: String,
    name: String,
    imports: Vec<String>,
    body: Vec<String>,
}

/// Renders the canonical export (pretty-printed JSON, trailing newline).
pub fn export_world(world: &World) -> String {
    let doc = ExportedWorld {
        packages: world
            .packages()
            .map(|p| ExportedPackage {
                name: p.name.clone(),
                imports: p.package_imports.iter().map(|e| e.to_string()).collect(),
                classes: p.classes.iter().cloned().collect(),
                extensions: p.extensions.iter().cloned().collect(),
                scripts: p.scripts.iter().cloned().collect(),
            })
            .collect(),
        classes: world
            .classes()
            .map(|c| ExportedClass {
                name: c.name.clone(),
                package: c.package.clone(),
                superclass: c.superclass.clone(),
                fields: c.fields.clone(),
                imports: c.class_imports.iter().map(|e| e.to_string()).collect(),
            })
            .collect(),
        extensions: world
            .extensions()
            .map(|e| ExportedExtension {
                name: e.ref_.name().to_string(),
                package: e.ref_.package().map(str::to_string),
                methods: e
                    .methods
                    .iter()
                    .map(|id| format!("{}.{}", id.class, id.signature))
                    .collect(),
            })
            .collect(),
        methods: world
            .methods()
            .map(|m| ExportedMethod {
                class: m.id.class.clone(),
                selector: m.id.signature.to_string(),
                extension: m.id.extension.to_string(),
                params: m.params.clone(),
                imports: m.method_imports.iter().map(|e| e.to_string()).collect(),
                body: m.body.iter().map(|s| s.to_string()).collect(),
            })
            .collect(),
        scripts: world
            .scripts()
            .map(|s| ExportedScript {
                package: s.id.package.clone(),
                name: s.id.name.clone(),
                imports: s.imports.iter().map(|e| e.to_string()).collect(),
                body: s.body.iter().map(|st| st.to_string()).collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("export serialization cannot fail");
    out.push('\n');
    out
}
