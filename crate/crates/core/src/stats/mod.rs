//! Per-attribute statistics consumed by the charts.
//!
//! Everything here is a pure function of its inputs. Callers that want
//! parallelism compute [`SortedColumns`] or per-attribute summaries on
//! worker threads and merge the results by attribute/step index.

mod binning;
mod columns;
mod drift;
mod modality;
mod moments;
mod quantile;
mod table;

pub use binning::{shared_binning, sturges_bins, uniform_edges, Histogram};
pub use columns::SortedColumns;
pub use drift::{chi_square_distance, drift_matrix, DriftMatrix, DriftNormalization};
pub use modality::{estimate_modality, roughness, ModalityClass, ModalityConfig, ModalityEstimate};
pub use moments::{skewness_kurtosis, Moments, Shape};
pub use quantile::{quantile, quantile_sorted};
pub use table::{normalize_value, summarize_column, AttributeStats, StatsTable};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("empty input")]
    Empty,
    #[error("quantile level {0} outside [0, 1]")]
    InvalidLevel(f64),
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("degenerate distribution: zero variance")]
    ZeroVariance,
    #[error("need at least {needed} samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("constant input: max equals min")]
    Constant,
    #[error("attribute {0} is degenerate: global max equals min")]
    DegenerateAttribute(usize),
    #[error("histograms have different bin edges")]
    MismatchedEdges,
    #[error("bin edges must be at least two strictly ascending values")]
    InvalidEdges,
    #[error("need at least 2 time steps, found {0}")]
    TooFewSteps(usize),
    #[error("attribute index {0} out of range")]
    UnknownAttribute(usize),
}
