//! Text and JSON renderings of traces, strategy matrices, and analysis
//! reports. All JSON goes through serde structs so key order is fixed by
//! declaration and identical across runs.

use serde::Serialize;

use semx_core::analysis::{
    AosResult, OverrideConflict, OverrideKind, OverwriteConflict, OverwriteKind,
};
use semx_core::lookup::{ActivationStrategy, SelectionStrategy};
use semx_core::{
    DominanceRow, DominanceSummary, EvalOutcome, ExtensionRef, MethodLocation, ResolvedMethod,
    World, WorldStats,
};

/// `P.E` for user extensions; the global extension borrows the defining
/// class's package, e.g. `P1.global`.
pub fn ext_label(world: &World, class: &str, ext: &ExtensionRef) -> String {
    match world.defining_package(class, ext) {
        Some(pkg) => format!("{pkg}.{}", ext.name()),
        None => ext.to_string(),
    }
}

fn resolution_cell(world: &World, resolved: &ResolvedMethod) -> String {
    format!("{}@{}", ext_label(world, &resolved.class, &resolved.extension), resolved.class)
}

// ---------------------------------------------------------------- run

pub fn trace_text(world: &World, outcome: &EvalOutcome) -> String {
    let mut out = String::new();
    for d in &outcome.dispatches {
        let target = match &d.resolved {
            Some(r) => {
                format!("{} [{}]", r.class, ext_label(world, &r.class, &r.extension))
            }
            None => "<not understood>".to_string(),
        };
        out.push_str(&format!(
            "{}. {}.{} -> {}\n",
            d.step, d.receiver_class, d.selector, target
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonResolved {
    class: String,
    extension: String,
    package: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonDispatch {
    n: usize,
    receiver_class: String,
    selector: String,
    activation: Vec<String>,
    resolved: Option<JsonResolved>,
}

#[derive(Serialize)]
struct JsonError {
    kind: String,
    message: String,
}

#[derive(Serialize)]
struct JsonTrace {
    result: Option<String>,
    dispatches: Vec<JsonDispatch>,
    error: Option<JsonError>,
}

pub fn trace_json(world: &World, outcome: &EvalOutcome) -> String {
    let doc = JsonTrace {
        result: outcome.result.as_ref().map(|v| v.to_string()),
        dispatches: outcome
            .dispatches
            .iter()
            .map(|d| JsonDispatch {
                n: d.step,
                receiver_class: d.receiver_class.clone(),
                selector: d.selector.to_string(),
                activation: d.active_extensions.iter().map(|e| e.to_string()).collect(),
                resolved: d.resolved.as_ref().map(|r| JsonResolved {
                    class: r.class.clone(),
                    extension: r.extension.name().to_string(),
                    package: world
                        .defining_package(&r.class, &r.extension)
                        .map(str::to_string),
                }),
            })
            .collect(),
        error: outcome.error.as_ref().map(|f| JsonError {
            kind: f.error.kind().to_string(),
            message: f.error.to_string(),
        }),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("trace serializes");
    text.push('\n');
    text
}

// ---------------------------------------------------------------- diff

pub fn diff_table(
    world: &World,
    cells: &[((ActivationStrategy, SelectionStrategy), EvalOutcome)],
) -> String {
    let rendered: Vec<(String, String, String)> = cells
        .iter()
        .map(|((act, sel), outcome)| {
            let cell = match (&outcome.error, outcome.final_resolution()) {
                (Some(failure), _) => failure.error.kind().to_string(),
                (None, Some(r)) => resolution_cell(world, r),
                (None, None) => "-".to_string(),
            };
            (act.to_string(), sel.to_string(), cell)
        })
        .collect();

    let row_names: Vec<String> = ActivationStrategy::ALL.iter().map(|a| a.to_string()).collect();
    let col_names: Vec<String> = SelectionStrategy::ALL.iter().map(|s| s.to_string()).collect();
    let row_width = row_names.iter().map(String::len).max().unwrap_or(0);
    let col_width = rendered
        .iter()
        .map(|(_, _, c)| c.len())
        .chain(col_names.iter().map(String::len))
        .max()
        .unwrap_or(1);

    let mut out = format!("{:row_width$}", "");
    for name in &col_names {
        out.push_str(&format!("  {name:col_width$}"));
    }
    out.push('\n');
    for row in &row_names {
        out.push_str(&format!("{row:row_width$}"));
        for col in &col_names {
            let cell = rendered
                .iter()
                .find(|(a, s, _)| a == row && s == col)
                .map(|(_, _, c)| c.as_str())
                .unwrap_or("-");
            out.push_str(&format!("  {cell:col_width$}"));
        }
        out.push('\n');
    }
    out
}

// ------------------------------------------------------------- analyze

fn overwrite_kind_label(kind: OverwriteKind) -> &'static str {
    match kind {
        OverwriteKind::ExtensionsOnly => "extensions-only",
        OverwriteKind::OverwritesRegular => "overwrites-regular",
    }
}

fn override_kind_label(kind: OverrideKind) -> &'static str {
    match kind {
        OverrideKind::RegularOverExtension => "regular-over-extension",
        OverrideKind::ExtensionOverExtension => "extension-over-extension",
        OverrideKind::ExtensionOverRegular => "extension-over-regular",
    }
}

pub fn conflicts_text(overwrites: &[OverwriteConflict], overrides: &[OverrideConflict]) -> String {
    let mut out = format!("overwrites ({}):\n", overwrites.len());
    for c in overwrites {
        out.push_str(&format!("  {c} [{}]\n", overwrite_kind_label(c.kind)));
    }
    out.push_str(&format!("overrides ({}):\n", overrides.len()));
    for c in overrides {
        out.push_str(&format!("  {c} [{}]\n", override_kind_label(c.kind)));
    }
    out
}

#[derive(Serialize)]
struct JsonOverwrite {
    class: String,
    selector: String,
    extensions: Vec<String>,
    kind: String,
}

#[derive(Serialize)]
struct JsonOverride {
    #[serde(rename = "lowerClass")]
    lower_class: String,
    #[serde(rename = "lowerExtension")]
    lower_extension: String,
    #[serde(rename = "upperClass")]
    upper_class: String,
    #[serde(rename = "upperExtension")]
    upper_extension: String,
    selector: String,
    kind: String,
}

#[derive(Serialize)]
struct JsonConflicts {
    overwrites: Vec<JsonOverwrite>,
    overrides: Vec<JsonOverride>,
}

pub fn conflicts_json(
    overwrites: &[OverwriteConflict],
    overrides: &[OverrideConflict],
) -> String {
    let doc = JsonConflicts {
        overwrites: overwrites
            .iter()
            .map(|c| JsonOverwrite {
                class: c.class.clone(),
                selector: c.signature.to_string(),
                extensions: c.extensions.iter().map(|e| e.to_string()).collect(),
                kind: overwrite_kind_label(c.kind).to_string(),
            })
            .collect(),
        overrides: overrides
            .iter()
            .map(|c| JsonOverride {
                lower_class: c.lower.0.clone(),
                lower_extension: c.lower.1.to_string(),
                upper_class: c.upper.0.clone(),
                upper_extension: c.upper.1.to_string(),
                selector: c.signature.to_string(),
                kind: override_kind_label(c.kind).to_string(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("conflicts serialize");
    text.push('\n');
    text
}

pub fn stats_text(stats: &WorldStats) -> String {
    format!(
        "extension-method-fraction: {:.4}\n\
         extended-class-fraction: {:.4}\n\
         packages-defining-extensions-fraction: {:.4}\n\
         packages-with-extended-classes-fraction: {:.4}\n",
        stats.extension_method_fraction,
        stats.extended_class_fraction,
        stats.packages_defining_extensions_fraction,
        stats.packages_with_extended_classes_fraction,
    )
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonStats {
    extension_method_fraction: f64,
    extended_class_fraction: f64,
    packages_defining_extensions_fraction: f64,
    packages_with_extended_classes_fraction: f64,
}

pub fn stats_json(stats: &WorldStats) -> String {
    let doc = JsonStats {
        extension_method_fraction: stats.extension_method_fraction,
        extended_class_fraction: stats.extended_class_fraction,
        packages_defining_extensions_fraction: stats.packages_defining_extensions_fraction,
        packages_with_extended_classes_fraction: stats.packages_with_extended_classes_fraction,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("stats serialize");
    text.push('\n');
    text
}

// ----------------------------------------------------------------- aos

fn location_line(world: &World, loc: &MethodLocation) -> String {
    format!(
        "  {} @ {} ({})\n",
        loc.class,
        loc.ext_index,
        ext_label(world, &loc.class, &loc.extension)
    )
}

pub fn aos_report(
    world: &World,
    result: &AosResult,
    oracle: Option<&std::collections::BTreeSet<MethodLocation>>,
) -> String {
    let mut out = format!(
        "base: {} @ {} (priority {})\n",
        result.base_class,
        ext_label(world, &result.base_class, &result.base_extension),
        result.base_index,
    );
    out.push_str(&format!("locations ({} enumerated):\n", result.locations.len()));
    for loc in &result.locations {
        out.push_str(&location_line(world, loc));
    }
    let verdict = if result.locations.len() == result.formula_size { "match" } else { "MISMATCH" };
    out.push_str(&format!(
        "size: {} enumerated, {} formula -- {}\n",
        result.locations.len(),
        result.formula_size,
        verdict
    ));
    if let Some(oracle) = oracle {
        let verdict = if *oracle == result.locations { "match" } else { "MISMATCH" };
        out.push_str(&format!("brute-force: {} locations -- {}\n", oracle.len(), verdict));
    }
    out
}

// ----------------------------------------------------------- aos-table

pub fn aos_table_report(rows: &[DominanceRow], summary: DominanceSummary) -> String {
    let mut out = String::from("exts  max-i\n");
    for row in rows {
        out.push_str(&format!("{:>4}  {:>5}\n", row.ext_count, row.max_favorable_i));
    }
    out.push_str(&format!("summary: {summary}\n"));
    out
}
