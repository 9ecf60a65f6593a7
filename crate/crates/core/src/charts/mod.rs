//! Layout builders for the three abstract charts.
//!
//! Layouts are plain data in chart-local meters; [`crate::scene`] turns them
//! into scene nodes.

mod chrono;
mod mdd;
mod params;
mod tet;

pub use chrono::{build_chrono, BinLabel, ChronoBar, ChronoLayout, ChronoQuad, ChronoStack, DeltaClass};
pub use mdd::{build_mdd, MddGlyph, MddLayout, MddMode};
pub use params::LayoutParams;
pub use tet::{build_tet, rank_drift, rank_drift_above, DriftRank, TetColumn, TetLayout, TetLink};

use thiserror::Error;

use crate::stats::StatsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("series has no time steps")]
    EmptySeries,
    #[error("need at least 2 time steps, found {0}")]
    TooFewSteps(usize),
    #[error("statistics table does not match the series shape")]
    ShapeMismatch,
    #[error(transparent)]
    Stats(#[from] StatsError),
}
