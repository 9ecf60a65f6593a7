//! Peak-count estimation by histogram roughness maximization.
//!
//! The distribution is binned into `k` equal-width bins for every `k` in the
//! scan set. For each binning the absolute differences between neighboring
//! bin frequencies are summed; the binning with the largest sum is taken as
//! the one that best resolves the peaks, and its local maxima are counted.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{uniform_edges, Histogram, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModalityClass {
    Uniform,
    Unimodal,
    Bimodal,
    Multimodal,
}

impl ModalityClass {
    pub const ALL: [ModalityClass; 4] = [
        ModalityClass::Uniform,
        ModalityClass::Unimodal,
        ModalityClass::Bimodal,
        ModalityClass::Multimodal,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ModalityClass::Uniform => "Uniform",
            ModalityClass::Unimodal => "Unimodal",
            ModalityClass::Bimodal => "Bimodal",
            ModalityClass::Multimodal => "Multimodal",
        }
    }

    /// Non-uniform class for a peak count.
    pub fn from_peaks(peaks: usize) -> Self {
        match peaks {
            0 | 1 => ModalityClass::Unimodal,
            2 => ModalityClass::Bimodal,
            _ => ModalityClass::Multimodal,
        }
    }
}

/// Frozen modality parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalityConfig {
    pub min_samples: usize,
    pub min_bins: usize,
    pub max_bins: usize,
    /// Roughness below this classifies as uniform.
    pub uniformity_threshold: f64,
    /// Local maxima below this fraction of the tallest bin are not peaks.
    pub peak_floor: f64,
}

impl Default for ModalityConfig {
    fn default() -> Self {
        Self {
            min_samples: 10,
            min_bins: 4,
            max_bins: 64,
            uniformity_threshold: 0.25,
            peak_floor: 0.10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalityEstimate {
    /// Local maxima of the selected binning; 0 for uniform distributions.
    pub peak_count: usize,
    pub class: ModalityClass,
    pub bins: usize,
    pub roughness: f64,
}

/// `sum_i |f[i+1] - f[i]|` over normalized bin frequencies.
pub fn roughness(frequencies: &[f64]) -> f64 {
    frequencies.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Estimates modality of ascending-sorted `sorted` values.
pub fn estimate_modality(sorted: &[f64], cfg: &ModalityConfig) -> Result<ModalityEstimate, StatsError> {
    let n = sorted.len();
    if n < cfg.min_samples.max(2) {
        return Err(StatsError::TooFewSamples {
            needed: cfg.min_samples.max(2),
            found: n,
        });
    }
    if sorted.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let (min, max) = (sorted[0], sorted[n - 1]);
    if !(max > min) {
        return Err(StatsError::Constant);
    }
    let sqrt_ceil = {
        let s = n.isqrt();
        if s * s < n {
            s + 1
        } else {
            s
        }
    };
    let upper = cfg.max_bins.min(sqrt_ceil).max(cfg.min_bins);

    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for k in cfg.min_bins..=upper {
        let edges = uniform_edges(min, max, k)?;
        let freqs = Histogram::from_sorted(sorted, &edges)?.frequencies();
        let r = roughness(&freqs);
        // strict comparison keeps the smallest k on ties
        if best.as_ref().is_none_or(|(_, br, _)| r > *br) {
            best = Some((k, r, freqs));
        }
    }
    let (bins, roughness, freqs) = best.ok_or(StatsError::Empty)?;
    if roughness < cfg.uniformity_threshold {
        return Ok(ModalityEstimate {
            peak_count: 0,
            class: ModalityClass::Uniform,
            bins,
            roughness,
        });
    }
    let peak_count = count_peaks(&freqs, cfg.peak_floor);
    Ok(ModalityEstimate {
        peak_count,
        class: ModalityClass::from_peaks(peak_count),
        bins,
        roughness,
    })
}

/// Local maxima, interior or at an edge, that reach `floor * max`.
///
/// Runs of equal frequencies count once; a run is a maximum when every
/// neighboring run is lower.
pub(crate) fn count_peaks(freqs: &[f64], floor: f64) -> usize {
    let mut runs: Vec<f64> = Vec::with_capacity(freqs.len());
    for &f in freqs {
        if runs.last() != Some(&f) {
            runs.push(f);
        }
    }
    let top = runs.iter().copied().fold(0.0, f64::max);
    let threshold = floor * top;
    (0..runs.len())
        .filter(|&i| {
            let v = runs[i];
            let left_ok = i == 0 || runs[i - 1] < v;
            let right_ok = i + 1 == runs.len() || runs[i + 1] < v;
            left_ok && right_ok && v >= threshold && v > 0.0
        })
        .count()
}
