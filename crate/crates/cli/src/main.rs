//! `semx` — run, compare, and analyze scoped-extension-method worlds.

mod render;

use std::collections::BTreeSet;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use semx_core::analysis::{
    aos_bruteforce, aos_extensions_first, aos_hierarchy_first, detect_overrides,
    detect_overwrites, dominance_summary, dominance_table, world_stats, AnalysisError,
};
use semx_core::frontend::fixture_source;
use semx_core::lookup::ActivationStrategy;
use semx_core::{
    evaluate, evaluate_matrix, parse_world, ActiveExtensions, ExtensionRef, ImportConfig,
    MessageContext, SelectionStrategy, Signature, StrategyConfig, World,
};

#[derive(Parser)]
#[command(
    name = "semx",
    version,
    about = "Scoped extension methods: strategy-parameterized dispatch and its analyses"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a script and print its dispatch trace.
    Run {
        /// World source file, or the name of an embedded fixture.
        file: String,
        /// Script name, bare or as `package.name`.
        #[arg(long)]
        script: String,
        #[arg(long, value_enum, default_value_t = ActivationArg::Lexical)]
        activation: ActivationArg,
        #[arg(long, value_enum, default_value_t = SelectionArg::HrcFirst)]
        selection: SelectionArg,
        /// Propagate class-level imports to subclasses.
        #[arg(long)]
        refinement_inheritance: bool,
        /// Disable lookup memoization.
        #[arg(long)]
        no_cache: bool,
        #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..))]
        max_depth: u64,
        #[arg(long, value_enum, default_value_t = TraceArg::Text)]
        trace: TraceArg,
    },
    /// Run one script under all six strategy pairs and tabulate the final
    /// resolutions.
    Diff {
        file: String,
        #[arg(long)]
        script: String,
        #[arg(long)]
        refinement_inheritance: bool,
    },
    /// Static reports over a world.
    Analyze {
        file: String,
        #[arg(long, value_enum)]
        report: ReportArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Accidental override space of one message.
    Aos {
        file: String,
        /// Receiver class of the probed message.
        #[arg(long)]
        class: String,
        /// Selector as `name/arity`.
        #[arg(long)]
        selector: String,
        /// Active extensions, a comma-separated list of `package.name`
        /// references; the global extension is appended automatically.
        #[arg(long)]
        exts: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Ext)]
        strategy: StrategyArg,
        /// Cross-check the formula against the brute-force oracle.
        #[arg(long)]
        brute_force: bool,
    },
    /// Dominance table: largest base priority at which hierarchy-first
    /// exposes no more override locations than extensions-first.
    AosTable {
        #[arg(long)]
        subclasses: f64,
        #[arg(long)]
        superclasses: f64,
        #[arg(long, default_value_t = 10)]
        max_exts: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ActivationArg {
    LrUp,
    LrDown,
    Lexical,
}

impl From<ActivationArg> for ActivationStrategy {
    fn from(arg: ActivationArg) -> Self {
        match arg {
            ActivationArg::LrUp => ActivationStrategy::BottomUpLocalRebinding,
            ActivationArg::LrDown => ActivationStrategy::TopDownLocalRebinding,
            ActivationArg::Lexical => ActivationStrategy::Lexical,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectionArg {
    ExtFirst,
    HrcFirst,
}

impl From<SelectionArg> for SelectionStrategy {
    fn from(arg: SelectionArg) -> Self {
        match arg {
            SelectionArg::ExtFirst => SelectionStrategy::ExtensionsFirst,
            SelectionArg::HrcFirst => SelectionStrategy::HierarchyFirst,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Conflicts,
    Stats,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Ext,
    Hrc,
}

impl From<StrategyArg> for SelectionStrategy {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::Ext => SelectionStrategy::ExtensionsFirst,
            StrategyArg::Hrc => SelectionStrategy::HierarchyFirst,
        }
    }
}

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

struct CmdError {
    status: u8,
    messages: Vec<String>,
}

impl CmdError {
    fn usage(message: impl Into<String>) -> Self {
        CmdError { status: EXIT_USAGE, messages: vec![message.into()] }
    }
}

fn load_world(file: &str) -> Result<World, CmdError> {
    let source = match fixture_source(file) {
        Some(text) => text.to_string(),
        None => fs::read_to_string(file).map_err(|e| {
            CmdError::usage(format!("error: cannot read `{file}`: {e}"))
        })?,
    };
    parse_world(&source).map_err(|diags| CmdError {
        status: EXIT_USAGE,
        messages: diags.iter().map(|d| format!("{file}:{d}")).collect(),
    })
}

fn find_script(world: &World, name: &str) -> Result<semx_core::ScriptId, CmdError> {
    world
        .find_script(name)
        .map(|def| def.id.clone())
        .ok_or_else(|| CmdError::usage(format!("error: no script named `{name}`")))
}

fn cmd_run(
    file: &str,
    script: &str,
    activation: ActivationArg,
    selection: SelectionArg,
    refinement_inheritance: bool,
    no_cache: bool,
    max_depth: u64,
    trace: TraceArg,
) -> Result<u8, CmdError> {
    let world = load_world(file)?;
    let id = find_script(&world, script)?;
    let cfg = StrategyConfig {
        activation: activation.into(),
        selection: selection.into(),
        imports: if refinement_inheritance {
            ImportConfig::with_refinement_inheritance()
        } else {
            ImportConfig::default()
        },
        cache_enabled: !no_cache,
        max_depth: max_depth as usize,
    };
    let outcome = evaluate(&world, &id, cfg);
    match trace {
        TraceArg::Text => print!("{}", render::trace_text(&world, &outcome)),
        TraceArg::Json => print!("{}", render::trace_json(&world, &outcome)),
    }
    match &outcome.error {
        Some(failure) => {
            eprintln!("error[{}]: {}", failure.error.kind(), failure.error);
            Ok(EXIT_RUNTIME)
        }
        None => Ok(0),
    }
}

fn cmd_diff(file: &str, script: &str, refinement_inheritance: bool) -> Result<u8, CmdError> {
    let world = load_world(file)?;
    let id = find_script(&world, script)?;
    let imports = if refinement_inheritance {
        ImportConfig::with_refinement_inheritance()
    } else {
        ImportConfig::default()
    };
    let cells = evaluate_matrix(&world, &id, imports);
    print!("{}", render::diff_table(&world, &cells));
    let failed = cells.iter().any(|(_, outcome)| outcome.error.is_some());
    Ok(if failed { EXIT_RUNTIME } else { 0 })
}

fn cmd_analyze(file: &str, report: ReportArg, format: FormatArg) -> Result<u8, CmdError> {
    let world = load_world(file)?;
    let text = match (report, format) {
        (ReportArg::Conflicts, FormatArg::Text) => {
            render::conflicts_text(&detect_overwrites(&world), &detect_overrides(&world))
        }
        (ReportArg::Conflicts, FormatArg::Json) => {
            render::conflicts_json(&detect_overwrites(&world), &detect_overrides(&world))
        }
        (ReportArg::Stats, FormatArg::Text) => render::stats_text(&world_stats(&world)),
        (ReportArg::Stats, FormatArg::Json) => render::stats_json(&world_stats(&world)),
    };
    print!("{text}");
    Ok(0)
}

fn parse_ext_list(exts: &str) -> Result<Vec<ExtensionRef>, CmdError> {
    let mut out = Vec::new();
    for part in exts.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let ext = ExtensionRef::parse(part)
            .ok_or_else(|| CmdError::usage(format!("error: malformed extension reference `{part}`")))?;
        if ext.is_global() {
            return Err(CmdError::usage(
                "error: the global extension is implicit and cannot be listed".to_string(),
            ));
        }
        out.push(ext);
    }
    Ok(out)
}

fn cmd_aos(
    file: &str,
    class: &str,
    selector: &str,
    exts: &str,
    strategy: StrategyArg,
    brute_force: bool,
) -> Result<u8, CmdError> {
    let world = load_world(file)?;
    let sig = Signature::parse(selector)
        .ok_or_else(|| CmdError::usage(format!("error: malformed selector `{selector}`")))?;
    let refs = parse_ext_list(exts)?;
    for ext in &refs {
        if world.extension(ext).is_none() {
            return Err(CmdError::usage(format!("error: unknown extension `{ext}`")));
        }
    }
    let mess = MessageContext::new(class, sig, ActiveExtensions::from_imports(refs));
    let selection: SelectionStrategy = strategy.into();
    let result = match selection {
        SelectionStrategy::ExtensionsFirst => aos_extensions_first(&world, &mess),
        SelectionStrategy::HierarchyFirst => aos_hierarchy_first(&world, &mess),
    }
    .map_err(|e| CmdError::usage(format!("error: {e}")))?;

    let oracle: Option<BTreeSet<_>> = if brute_force {
        Some(
            aos_bruteforce(&world, &mess, selection)
                .map_err(|e| CmdError::usage(format!("error: {e}")))?,
        )
    } else {
        None
    };
    print!("{}", render::aos_report(&world, &result, oracle.as_ref()));
    Ok(0)
}

fn cmd_aos_table(subclasses: f64, superclasses: f64, max_exts: usize) -> Result<u8, CmdError> {
    let rows = dominance_table(subclasses, superclasses, max_exts).map_err(|e| match e {
        AnalysisError::InvalidDomain(msg) => CmdError::usage(format!("error: {msg}")),
        other => CmdError::usage(format!("error: {other}")),
    })?;
    print!("{}", render::aos_table_report(&rows, dominance_summary(&rows)));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match &cli.command {
        Cmd::Run {
            file,
            script,
            activation,
            selection,
            refinement_inheritance,
            no_cache,
            max_depth,
            trace,
        } => cmd_run(
            file,
            script,
            *activation,
            *selection,
            *refinement_inheritance,
            *no_cache,
            *max_depth,
            *trace,
        ),
        Cmd::Diff { file, script, refinement_inheritance } => {
            cmd_diff(file, script, *refinement_inheritance)
        }
        Cmd::Analyze { file, report, format } => cmd_analyze(file, *report, *format),
        Cmd::Aos { file, class, selector, exts, strategy, brute_force } => {
            cmd_aos(file, class, selector, exts, *strategy, *brute_force)
        }
        Cmd::AosTable { subclasses, superclasses, max_exts } => {
            cmd_aos_table(*subclasses, *superclasses, *max_exts)
        }
    };
    match run {
        Ok(status) => ExitCode::from(status),
        Err(err) => {
            for line in &err.messages {
                eprintln!("{line}");
            }
            ExitCode::from(err.status)
        }
    }
}
