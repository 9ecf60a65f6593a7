use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{estimate_modality, quantile_sorted, skewness_kurtosis, ModalityClass, ModalityConfig, Shape, SortedColumns, StatsError};

/// Summary of one attribute at one time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeStats {
    pub median: f64,
    pub iqr: f64,
    /// `None` for zero-variance columns.
    pub shape: Option<Shape>,
    pub modality: ModalityClass,
    pub peak_count: usize,
    /// Global bounds of the attribute across all time steps.
    pub norm_min: f64,
    pub norm_max: f64,
}

impl AttributeStats {
    pub fn is_degenerate(&self) -> bool {
        self.shape.is_none()
    }

    pub fn normalized_median(&self) -> f64 {
        normalize_value(self.median, self.norm_min, self.norm_max)
    }

    pub fn normalized_iqr(&self) -> f64 {
        let span = self.norm_max - self.norm_min;
        if span > 0.0 {
            (self.iqr / span).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

/// `(x - min) / (max - min)`, or 0 when the bounds coincide.
pub fn normalize_value(x: f64, norm_min: f64, norm_max: f64) -> f64 {
    let span = norm_max - norm_min;
    if span > 0.0 {
        (x - norm_min) / span
    } else {
        0.0
    }
}

/// Summarizes one sorted, nonempty column.
///
/// Zero-variance columns get no shape and modality `Uniform`; columns too
/// short for modality estimation are reported `Uniform` as well.
pub fn summarize_column(
    sorted: &[f64],
    bounds: (f64, f64),
    cfg: &ModalityConfig,
) -> Result<AttributeStats, StatsError> {
    let median = quantile_sorted(sorted, 0.5)?;
    let iqr = (quantile_sorted(sorted, 0.75)? - quantile_sorted(sorted, 0.25)?).max(0.0);
    let shape = match skewness_kurtosis(sorted) {
        Ok(s) => Some(s),
        Err(StatsError::ZeroVariance | StatsError::TooFewSamples { .. }) => None,
        Err(e) => return Err(e),
    };
    let (modality, peak_count) = match estimate_modality(sorted, cfg) {
        Ok(est) => (est.class, est.peak_count),
        Err(StatsError::Constant | StatsError::TooFewSamples { .. }) => (ModalityClass::Uniform, 0),
        Err(e) => return Err(e),
    };
    let (norm_min, norm_max) = bounds;
    Ok(AttributeStats {
        median,
        iqr,
        shape,
        modality,
        peak_count,
        norm_min,
        norm_max,
    })
}

/// [`AttributeStats`] for every `[step][attribute]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsTable {
    cells: Vec<Vec<AttributeStats>>,
}

impl StatsTable {
    pub fn compute(columns: &SortedColumns, cfg: &ModalityConfig) -> Result<Self, StatsError> {
        let cells = (0..columns.step_count())
            .map(|t| {
                (0..columns.attribute_count())
                    .map(|a| summarize_column(columns.column(t, a), columns.global_range(a), cfg))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { cells })
    }

    /// Assembles cells computed elsewhere, indexed `[step][attribute]`.
    pub fn from_cells(cells: Vec<Vec<AttributeStats>>) -> Self {
        Self { cells }
    }

    pub fn get(&self, step: usize, attribute: usize) -> &AttributeStats {
        &self.cells[step][attribute]
    }

    pub fn step(&self, step: usize) -> &[AttributeStats] {
        &self.cells[step]
    }

    pub fn step_count(&self) -> usize {
        self.cells.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn normalize_endpoints() {
        assert_eq!(normalize_value(2.0, 0.0, 4.0), 0.5);
        assert_eq!(normalize_value(4.0, 4.0, 4.0), 0.0);
        assert_eq!(normalize_value(0.0, 0.0, 4.0), 0.0);
        assert_eq!(normalize_value(4.0, 0.0, 4.0), 1.0);
    }

    #[test]
    fn constant_column_is_degenerate_uniform() {
        let s = summarize_column(&vec![7.0; 30], (7.0, 7.0), &ModalityConfig::default()).unwrap();
        assert!(s.is_degenerate());
        assert_eq!(s.modality, ModalityClass::Uniform);
        assert_eq!((s.median, s.iqr), (7.0, 0.0));
        assert_eq!(s.normalized_median(), 0.0);
    }

    proptest! {
        #[test]
        fn median_and_iqr_are_affine_equivariant(
            mut v in prop::collection::vec(-100f64..100.0, 1..80),
            scale in 0.1f64..10.0,
            shift in -50f64..50.0,
        ) {
            v.sort_by(f64::total_cmp);
            let cfg = ModalityConfig::default();
            let base = summarize_column(&v, (v[0], v[v.len() - 1]), &cfg).unwrap();
            let mapped: Vec<f64> = v.iter().map(|x| x * scale + shift).collect();
            let m = summarize_column(&mapped, (mapped[0], mapped[mapped.len() - 1]), &cfg).unwrap();
            let tol = 1e-9 * (1.0 + base.median.abs() * scale + shift.abs());
            prop_assert!((m.median - (base.median * scale + shift)).abs() <= tol);
            prop_assert!((m.iqr - base.iqr * scale).abs() <= tol);
        }
    }
}
