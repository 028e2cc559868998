//! Built-in example worlds, embedded so tools and tests need no external
//! files. Each fixture's first line documents its entity counts in a
//! machine-checkable form.

use crate::model::World;

use super::parser::{parse_world, ParseDiagnostic};

pub const FIXTURE_NAMES: [&str; 4] =
    ["fig6", "decorators", "selection_example", "aos_demo"];

/// Source text of an embedded fixture; accepts "fig6" or "fig6.semx".
pub fn fixture_source(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".semx").unwrap_or(name);
    match stem {
        "fig6" => Some(include_str!("../../fixtures/fig6.semx")),
        "decorators" => Some(include_str!("../../fixtures/decorators.semx")),
        "selection_example" => Some(include_str!("../../fixtures/selection_example.semx")),
        "aos_demo" => Some(include_str!("../../fixtures/aos_demo.semx")),
        _ => None,
    }
}

/// Parses an embedded fixture. Panics on an unknown name; fixtures
/// themselves always parse (covered by tests).
pub fn fixture_world(name: &str) -> Result<World, Vec<ParseDiagnostic>> {
    let source = fixture_source(name)
        .unwrap_or_else(|| panic!("no embedded fixture named `{name}`"));
    parse_world(source)
}

/// Entity tally of a world; `extensions` counts user extensions only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EntityCounts {
    pub packages: usize,
    pub classes: usize,
    pub extensions: usize,
    pub methods: usize,
    pub scripts: usize,
}

pub fn entity_counts(world: &World) -> EntityCounts {
    EntityCounts {
        packages: world.packages().count(),
        classes: world.classes().count(),
        extensions: world.extensions().filter(|e| !e.ref_.is_global()).count(),
        methods: world.methods().count(),
        scripts: world.scripts().count(),
    }
}

/// Reads the `// entities: packages=N classes=N extensions=N methods=N
/// scripts=N` header off fixture source.
pub fn declared_entity_counts(source: &str) -> Option<EntityCounts> {
    let line = source.lines().next()?;
    let rest = line.trim().strip_prefix("// entities:")?;
    let mut counts = EntityCounts {
        packages: 0,
        classes: 0,
        extensions: 0,
        methods: 0,
        scripts: 0,
    };
    for part in rest.split_whitespace() {
        let (key, value) = part.split_once('=')?;
        let value: usize = value.parse().ok()?;
        match key {
            "packages" => counts.packages = value,
            "classes" => counts.classes = value,
            "extensions" => counts.extensions = value,
            "methods" => counts.methods = value,
            "scripts" => counts.scripts = value,
            _ => return None,
        }
    }
    Some(counts)
}
