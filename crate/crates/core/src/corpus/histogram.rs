use serde::{Deserialize, Serialize};

use super::{field_values, summary_fields};
use crate::error::{Error, Result};
use crate::scoring::ErsRecord;

pub const DEFAULT_BINS: usize = 40;

/// `bins + 1` uniform edges over `[0, 1]`.
pub fn bin_edges(bins: usize) -> Vec<f64> {
    (0..=bins).map(|i| i as f64 / bins as f64).collect()
}

/// Bin of `value` under right-open bins `[lo, hi)`, the last bin closed.
/// Values outside `[0, 1]` land in the end bins.
pub fn bin_index(value: f64, bins: usize) -> usize {
    let edge = |i: usize| i as f64 / bins as f64;
    let mut i = ((value * bins as f64).floor().max(0.0) as usize).min(bins - 1);
    while i > 0 && value < edge(i) {
        i -= 1;
    }
    while i + 1 < bins && value >= edge(i + 1) {
        i += 1;
    }
    i
}

/// Per-bin share of two corpora for one score field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramReport {
    pub field: String,
    pub edges: Vec<f64>,
    pub labels: [String; 2],
    pub counts: [Vec<usize>; 2],
    /// Percentage of each corpus per bin; each sums to 100.
    pub percentages: [Vec<f64>; 2],
}

impl HistogramReport {
    pub fn bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn mean(&self, corpus: usize) -> f64 {
        let pct = &self.percentages[corpus];
        (0..self.bins())
            .map(|i| 0.5 * (self.edges[i] + self.edges[i + 1]) * pct[i] / 100.0)
            .sum()
    }
}

fn histogram(values: impl Iterator<Item = f64>, bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    for v in values {
        counts[bin_index(v, bins)] += 1;
    }
    counts
}

/// One report for the aggregate score followed by one per sub-score.
pub fn compare_corpora(
    a: &[ErsRecord],
    b: &[ErsRecord],
    bins: usize,
    labels: [&str; 2],
) -> Result<Vec<HistogramReport>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if bins < 2 {
        return Err(Error::Config("histograms need at least 2 bins".into()));
    }
    let edges = bin_edges(bins);
    let reports = summary_fields()
        .into_iter()
        .enumerate()
        .map(|(field_idx, field)| {
            let counts = [a, b].map(|records| histogram(records.iter().map(|r| field_values(r)[field_idx]), bins));
            let percentages = [0, 1].map(|c| {
                let total = [a.len(), b.len()][c] as f64;
                counts[c].iter().map(|&n| 100.0 * n as f64 / total).collect()
            });
            HistogramReport {
                field,
                edges: edges.clone(),
                labels: labels.map(str::to_string),
                counts,
                percentages,
            }
        })
        .collect();
    Ok(reports)
}
