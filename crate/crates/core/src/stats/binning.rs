use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{SortedColumns, StatsError};

/// Sturges' rule: `ceil(log2(n)) + 1` bins for `n >= 1` samples.
///
/// Computed on integers; `ceil(log2(n))` is the bit length of `n - 1`.
pub fn sturges_bins(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    (usize::BITS - (n - 1).leading_zeros()) as usize + 1
}

/// `bins + 1` uniformly spaced edges; the last edge is exactly `max`.
pub fn uniform_edges(min: f64, max: f64, bins: usize) -> Result<Vec<f64>, StatsError> {
    if bins == 0 || !min.is_finite() || !max.is_finite() {
        return Err(StatsError::InvalidEdges);
    }
    if !(max > min) {
        return Err(StatsError::Constant);
    }
    let width = max - min;
    let mut edges: Vec<f64> = (0..bins)
        .map(|i| min + width * (i as f64) / (bins as f64))
        .collect();
    edges.push(max);
    if edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(StatsError::InvalidEdges);
    }
    Ok(edges)
}

/// Bin edges shared by every time step of one attribute.
///
/// The bin count is the largest Sturges estimate over the steps and the
/// edges span the attribute's global range.
pub fn shared_binning(columns: &SortedColumns, attribute: usize) -> Result<Vec<f64>, StatsError> {
    if attribute >= columns.attribute_count() {
        return Err(StatsError::UnknownAttribute(attribute));
    }
    let bins = (0..columns.step_count())
        .map(|t| sturges_bins(columns.column(t, attribute).len()))
        .max()
        .unwrap_or(1);
    let (min, max) = columns.global_range(attribute);
    uniform_edges(min, max, bins).map_err(|e| match e {
        StatsError::Constant => StatsError::DegenerateAttribute(attribute),
        other => other,
    })
}

/// Counts over half-open bins `[e_i, e_{i+1})`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(values: &[f64], edges: &[f64]) -> Result<Self, StatsError> {
        check_edges(edges)?;
        let mut counts = vec![0u64; edges.len() - 1];
        for &v in values {
            if let Some(bin) = bin_index(edges, v) {
                counts[bin] += 1;
            }
        }
        Ok(Self {
            edges: edges.to_vec(),
            counts,
        })
    }

    /// Same result as [`Histogram::new`] for ascending `sorted` input, in
    /// `O(bins * log n)`.
    pub fn from_sorted(sorted: &[f64], edges: &[f64]) -> Result<Self, StatsError> {
        check_edges(edges)?;
        let bins = edges.len() - 1;
        let below = |x: f64| sorted.partition_point(|&v| v < x);
        let mut counts = Vec::with_capacity(bins);
        let mut start = below(edges[0]);
        for i in 0..bins {
            let end = if i + 1 == bins {
                sorted.partition_point(|&v| v <= edges[bins])
            } else {
                below(edges[i + 1])
            };
            counts.push((end - start) as u64);
            start = end;
        }
        Ok(Self {
            edges: edges.to_vec(),
            counts,
        })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts divided by the total; all zeros for an empty histogram.
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total();
        if total == 0 {
            return vec![0.0; self.counts.len()];
        }
        let total = total as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// Whether `v` falls into `bin` under this histogram's boundary rule.
    pub fn bin_contains(&self, bin: usize, v: f64) -> bool {
        bin_index(&self.edges, v) == Some(bin)
    }
}

fn check_edges(edges: &[f64]) -> Result<(), StatsError> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(StatsError::InvalidEdges);
    }
    Ok(())
}

/// Bin of `v`, or `None` when outside `[e_0, e_B]`.
pub(crate) fn bin_index(edges: &[f64], v: f64) -> Option<usize> {
    let last = edges.len() - 1;
    if !(v >= edges[0] && v <= edges[last]) {
        return None;
    }
    if v == edges[last] {
        return Some(last - 1);
    }
    Some(edges.partition_point(|&e| e <= v) - 1)
}
