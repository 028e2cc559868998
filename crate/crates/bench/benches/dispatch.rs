//! Benchmarks for the hot paths: stack activation + selection, full script
//! evaluation, and the two ways of computing an override space.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use semx_bench::{fig6, fig6_case_d, fig6_deep_stack, probe_world};
use semx_core::lookup;
use semx_core::{
    aos_bruteforce, aos_extensions_first, evaluate, ActivationStrategy, LookupEngine,
    SelectionStrategy, Signature, StrategyConfig,
};

/// The contested fig6 dispatch, resolved from scratch vs through the memo
/// cache. The cached engine is warmed outside the measured loop so the
/// numbers compare a hash probe against a full activation + selection.
fn bench_lookup(c: &mut Criterion) {
    let world = fig6();
    let stack = fig6_deep_stack(&world);
    let sig = Signature::new("redefined", 0);
    let cfg = StrategyConfig::new(
        ActivationStrategy::BottomUpLocalRebinding,
        SelectionStrategy::ExtensionsFirst,
    );

    let mut group = c.benchmark_group("lookup");
    group.bench_function("uncached", |b| {
        b.iter(|| {
            lookup::lookup(
                black_box(&world),
                black_box("C1"),
                black_box(&sig),
                black_box(&stack),
                &cfg,
            )
        })
    });

    let engine = LookupEngine::new(&world, cfg);
    engine.lookup("C1", &sig, &stack);
    group.bench_function("cached", |b| {
        b.iter(|| engine.lookup(black_box("C1"), black_box(&sig), black_box(&stack)))
    });
    group.finish();
}

/// End-to-end evaluation of the deepest fig6 script under the two configs
/// whose winners differ.
fn bench_evaluate(c: &mut Criterion) {
    let world = fig6();
    let script = fig6_case_d();

    let mut group = c.benchmark_group("evaluate");
    for (label, activation) in [
        ("lr-up", ActivationStrategy::BottomUpLocalRebinding),
        ("lexical", ActivationStrategy::Lexical),
    ] {
        let cfg = StrategyConfig::new(activation, SelectionStrategy::ExtensionsFirst);
        group.bench_function(label, |b| {
            b.iter(|| evaluate(black_box(&world), black_box(&script), cfg))
        });
    }
    group.finish();
}

/// Closed-form override space vs the oracle that re-runs lookup for every
/// candidate stub. Same world, same context, same answer -- the gap is the
/// point of having the formula.
fn bench_aos(c: &mut Criterion) {
    let (world, ctx) = probe_world(42);

    let mut group = c.benchmark_group("aos");
    group.bench_function("formula", |b| {
        b.iter(|| aos_extensions_first(black_box(&world), black_box(&ctx)))
    });
    group.bench_function("bruteforce", |b| {
        b.iter(|| {
            aos_bruteforce(black_box(&world), black_box(&ctx), SelectionStrategy::ExtensionsFirst)
        })
    });
    group.finish();
}

criterion_group!(benches, bench_lookup, bench_evaluate, bench_aos);
criterion_main!(benches);
