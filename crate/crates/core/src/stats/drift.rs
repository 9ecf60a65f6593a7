use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{shared_binning, Histogram, SortedColumns, StatsError};

/// Symmetric chi-square distance between normalized histograms:
/// `sum_i (p_i - q_i)^2 / (p_i + q_i)` over bins with mass. Lies in `[0, 2]`.
pub fn chi_square_distance(p: &Histogram, q: &Histogram) -> Result<f64, StatsError> {
    if p.edges() != q.edges() {
        return Err(StatsError::MismatchedEdges);
    }
    let d = p
        .frequencies()
        .into_iter()
        .zip(q.frequencies())
        .filter(|(a, b)| a + b > 0.0)
        .map(|(a, b)| (a - b) * (a - b) / (a + b))
        .sum::<f64>();
    // Each term is at most a + b; frequencies sum to 1 only up to rounding.
    Ok(d.min(2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftNormalization {
    /// One maximum over the whole matrix.
    #[default]
    Global,
    /// Each attribute scaled by its own maximum.
    PerAttribute,
}

/// Chi-square drift between consecutive time steps, `[pair][attribute]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftMatrix {
    raw: Vec<Vec<f64>>,
    normalized: Vec<Vec<f64>>,
    degenerate: Vec<bool>,
    normalization: DriftNormalization,
}

impl DriftMatrix {
    /// Normalizes `raw`. Degenerate attributes are forced to zero and never
    /// contribute to a maximum.
    pub fn from_raw(
        mut raw: Vec<Vec<f64>>,
        degenerate: Vec<bool>,
        normalization: DriftNormalization,
    ) -> Self {
        let attrs = degenerate.len();
        for row in &mut raw {
            assert_eq!(row.len(), attrs);
            for (a, v) in row.iter_mut().enumerate() {
                if degenerate[a] {
                    *v = 0.0;
                }
            }
        }
        let max_of = |a: Option<usize>| {
            raw.iter()
                .flat_map(|row| row.iter().enumerate())
                .filter(|(i, _)| a.is_none_or(|a| *i == a))
                .map(|(_, v)| *v)
                .fold(0.0f64, f64::max)
        };
        let scales: Vec<f64> = match normalization {
            DriftNormalization::Global => vec![max_of(None); attrs],
            DriftNormalization::PerAttribute => (0..attrs).map(|a| max_of(Some(a))).collect(),
        };
        let normalized = raw
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&scales)
                    .map(|(&v, &s)| if s > 0.0 { v / s } else { 0.0 })
                    .collect()
            })
            .collect();
        Self {
            raw,
            normalized,
            degenerate,
            normalization,
        }
    }

    pub fn pairs(&self) -> usize {
        self.raw.len()
    }

    pub fn attributes(&self) -> usize {
        self.degenerate.len()
    }

    pub fn raw(&self) -> &[Vec<f64>] {
        &self.raw
    }

    pub fn normalized(&self) -> &[Vec<f64>] {
        &self.normalized
    }

    pub fn raw_at(&self, pair: usize, attribute: usize) -> f64 {
        self.raw[pair][attribute]
    }

    pub fn normalized_at(&self, pair: usize, attribute: usize) -> f64 {
        self.normalized[pair][attribute]
    }

    pub fn is_degenerate(&self, attribute: usize) -> bool {
        self.degenerate[attribute]
    }

    pub fn normalization(&self) -> DriftNormalization {
        self.normalization
    }
}

/// Drift of every attribute between every pair of consecutive steps, on the
/// attribute's shared binning.
pub fn drift_matrix(columns: &SortedColumns, normalization: DriftNormalization) -> Result<DriftMatrix, StatsError> {
    let steps = columns.step_count();
    if steps < 2 {
        return Err(StatsError::TooFewSteps(steps));
    }
    let attrs = columns.attribute_count();
    let mut raw = vec![vec![0.0; attrs]; steps - 1];
    let mut degenerate = vec![false; attrs];
    for a in 0..attrs {
        let edges = match shared_binning(columns, a) {
            Ok(e) => e,
            Err(StatsError::DegenerateAttribute(_)) => {
                degenerate[a] = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        let hists = (0..steps)
            .map(|t| Histogram::from_sorted(columns.column(t, a), &edges))
            .collect::<Result<Vec<_>, _>>()?;
        for t in 0..steps - 1 {
            raw[t][a] = chi_square_distance(&hists[t], &hists[t + 1])?;
        }
    }
    Ok(DriftMatrix::from_raw(raw, degenerate, normalization))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hist(counts: &[u64]) -> Histogram {
        let edges: Vec<f64> = (0..=counts.len()).map(|i| i as f64).collect();
        let values: Vec<f64> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| core::iter::repeat_n(i as f64 + 0.5, c as usize))
            .collect();
        Histogram::new(&values, &edges).unwrap()
    }

    #[test]
    fn hand_cases() {
        assert_eq!(chi_square_distance(&hist(&[3, 4]), &hist(&[3, 4])).unwrap(), 0.0);
        assert_eq!(chi_square_distance(&hist(&[1, 0]), &hist(&[0, 1])).unwrap(), 2.0);
        // 0.0625 / 0.75 + 0.0625 / 1.25
        let d = chi_square_distance(&hist(&[2, 2]), &hist(&[1, 3])).unwrap();
        assert!((d - 0.133_333_333_333_333_33).abs() < 1e-12);
    }

    #[test]
    fn mismatched_edges_rejected() {
        let other = Histogram::new(&[0.5], &[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(
            chi_square_distance(&hist(&[1, 1]), &other),
            Err(StatsError::MismatchedEdges)
        );
    }

    #[test]
    fn normalization_modes() {
        let raw = vec![vec![0.2, 0.1, 5.0], vec![0.4, 0.05, 0.0]];
        let g = DriftMatrix::from_raw(raw.clone(), vec![false, false, true], DriftNormalization::Global);
        assert_eq!(g.normalized()[0], vec![0.5, 0.25, 0.0]);
        assert_eq!(g.normalized()[1], vec![1.0, 0.125, 0.0]);
        let p = DriftMatrix::from_raw(raw, vec![false, false, false], DriftNormalization::PerAttribute);
        assert_eq!(p.normalized()[0], vec![0.5, 1.0, 1.0]);
        let z = DriftMatrix::from_raw(vec![vec![0.0, 0.0]], vec![false, false], DriftNormalization::Global);
        assert_eq!(z.normalized()[0], vec![0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn metric_properties(
            a in prop::collection::vec(0u64..50, 6),
            b in prop::collection::vec(0u64..50, 6),
        ) {
            prop_assume!(a.iter().sum::<u64>() > 0 && b.iter().sum::<u64>() > 0);
            let (p, q) = (hist(&a), hist(&b));
            let d = chi_square_distance(&p, &q).unwrap();
            prop_assert_eq!(d, chi_square_distance(&q, &p).unwrap());
            prop_assert!((0.0..=2.0 + 1e-12).contains(&d));
            prop_assert_eq!(d == 0.0, p.frequencies() == q.frequencies());
        }
    }
}
