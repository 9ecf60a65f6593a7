use alloc::vec::Vec;

use crate::data::StudySeries;

/// Every attribute column of every time step, sorted ascending.
///
/// Indexed `[step][attribute]`. Quantiles, modality histograms, shared
/// binning and drift histograms all read from here.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedColumns {
    columns: Vec<Vec<Vec<f64>>>,
    ranges: Vec<(f64, f64)>,
}

impl SortedColumns {
    pub fn new(series: &StudySeries) -> Self {
        let columns = series
            .time_steps()
            .iter()
            .map(|ds| {
                (0..series.attribute_count())
                    .map(|a| sorted_column(ds.column(a)))
                    .collect()
            })
            .collect();
        Self::from_parts(columns)
    }

    /// Assembles columns sorted elsewhere (e.g., on worker threads).
    ///
    /// Panics when a column is not sorted or the steps disagree on the
    /// attribute count.
    pub fn from_parts(columns: Vec<Vec<Vec<f64>>>) -> Self {
        let attrs = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|step| step.len() == attrs));
        assert!(columns
            .iter()
            .flatten()
            .all(|c| c.windows(2).all(|w| w[0] <= w[1])));
        let ranges = (0..attrs)
            .map(|a| {
                columns.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), step| {
                    let c = &step[a];
                    match (c.first(), c.last()) {
                        (Some(&first), Some(&last)) => (lo.min(first), hi.max(last)),
                        _ => (lo, hi),
                    }
                })
            })
            .collect();
        Self { columns, ranges }
    }

    pub fn step_count(&self) -> usize {
        self.columns.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.ranges.len()
    }

    pub fn column(&self, step: usize, attribute: usize) -> &[f64] {
        &self.columns[step][attribute]
    }

    /// `(min, max)` over all steps.
    pub fn global_range(&self, attribute: usize) -> (f64, f64) {
        self.ranges[attribute]
    }

    pub fn is_degenerate(&self, attribute: usize) -> bool {
        let (lo, hi) = self.ranges[attribute];
        !(hi > lo)
    }
}

pub(crate) fn sorted_column(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_unstable_by(f64::total_cmp);
    v
}
