//! When does hierarchy-first selection expose a smaller accidental
//! override space than extensions-first?
//!
//! For average hierarchy shape (Nsub descendants, Nsup ancestors), an
//! activation of n extensions, and a base method at priority i, the
//! hierarchy-first space is no larger exactly when
//! (Nsub + Nsup)(i − 1) ≤ Nsub(n − 1). This module tabulates the largest
//! favorable i per n and aggregates the favorable fraction over all
//! (n, i) cells.

use std::fmt;
use std::ops::RangeInclusive;

use super::AnalysisError;

/// One table row: for an activation of `ext_count` extensions, the
/// largest base priority at which hierarchy-first is still no worse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DominanceRow {
    pub ext_count: usize,
    pub max_favorable_i: usize,
}

/// Favorable (n, i) cells over all cells, kept as an exact fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DominanceSummary {
    pub favorable: u64,
    pub total: u64,
}

impl DominanceSummary {
    pub fn value(&self) -> f64 {
        self.favorable as f64 / self.total as f64
    }
}

impl fmt::Display for DominanceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} ≈ {:.4}", self.favorable, self.total, self.value())
    }
}

/// One cell of the generalization sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepCell {
    pub n_sub: u32,
    pub n_sup: u32,
    pub summary: DominanceSummary,
}

/// Largest favorable i per extension count, for 1 ≤ n ≤ `max_exts`.
pub fn dominance_table(
    avg_sub: f64,
    avg_sup: f64,
    max_exts: usize,
) -> Result<Vec<DominanceRow>, AnalysisError> {
    if !(avg_sub > 0.0) {
        return Err(AnalysisError::InvalidDomain(format!(
            "average subclass count must be positive, got {avg_sub}"
        )));
    }
    if !(avg_sup >= 0.0) {
        return Err(AnalysisError::InvalidDomain(format!(
            "average superclass count must be nonnegative, got {avg_sup}"
        )));
    }
    if max_exts < 1 {
        return Err(AnalysisError::InvalidDomain(
            "extension count bound must be at least 1".to_string(),
        ));
    }
    let rows = (1..=max_exts)
        .map(|n| {
            let max_favorable_i = (1..=n)
                .rev()
                .find(|&i| (avg_sub + avg_sup) * (i - 1) as f64 <= avg_sub * (n - 1) as f64)
                .expect("i = 1 always satisfies the inequality");
            DominanceRow { ext_count: n, max_favorable_i }
        })
        .collect();
    Ok(rows)
}

/// Fraction of favorable (n, i) cells: each row n contributes n cells
/// (one per priority), of which the first `max_favorable_i` are favorable.
pub fn dominance_summary(rows: &[DominanceRow]) -> DominanceSummary {
    DominanceSummary {
        favorable: rows.iter().map(|r| r.max_favorable_i as u64).sum(),
        total: rows.iter().map(|r| r.ext_count as u64).sum(),
    }
}

/// Summaries over a grid of integer hierarchy shapes, row-major in
/// `subs` then `sups`.
pub fn dominance_sweep(
    subs: RangeInclusive<u32>,
    sups: RangeInclusive<u32>,
    max_exts: usize,
) -> Result<Vec<SweepCell>, AnalysisError> {
    let mut cells = Vec::new();
    for n_sub in subs {
        for n_sup in sups.clone() {
            let rows = dominance_table(n_sub as f64, n_sup as f64, max_exts)?;
            cells.push(SweepCell { n_sub, n_sup, summary: dominance_summary(&rows) });
        }
    }
    Ok(cells)
}
