//! Opening studies into sessions, and recorded request logs.

use std::path::Path;

use marv_core::data::GeometryBinding;
use marv_core::session::{Analysis, Mutation, Session, SessionConfig, SessionError};
use marv_core::stats::{summarize_column, SortedColumns, StatsError, StatsTable};
use marv_core::StudySeries;
use rayon::prelude::*;
use thiserror::Error;

use crate::codec::{self, CodecError};
use crate::ingest::{load_manifest, IngestError, TableFormat};

#[derive(Debug, Error)]
pub enum StudyError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// [`Analysis::compute`] spread over the rayon pool. Results are merged by
/// index, so they are identical to the serial computation.
pub fn analyze(series: &StudySeries, cfg: &SessionConfig) -> Result<Analysis, StatsError> {
    let attrs = series.attribute_count();
    let columns: Vec<Vec<Vec<f64>>> = series
        .time_steps()
        .par_iter()
        .map(|ds| {
            (0..attrs)
                .into_par_iter()
                .map(|a| {
                    let mut c = ds.column_vec(a);
                    c.sort_unstable_by(f64::total_cmp);
                    c
                })
                .collect()
        })
        .collect();
    let columns = SortedColumns::from_parts(columns);
    let cells = (0..columns.step_count())
        .into_par_iter()
        .map(|t| {
            (0..attrs)
                .into_par_iter()
                .map(|a| summarize_column(columns.column(t, a), columns.global_range(a), &cfg.modality))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Analysis::from_parts(columns, StatsTable::from_cells(cells), cfg.drift_normalization)
}

pub fn open_series(series: StudySeries, binding: &GeometryBinding, cfg: SessionConfig) -> Result<Session, StudyError> {
    let analysis = analyze(&series, &cfg)?;
    Ok(Session::with_analysis(series, binding, cfg, analysis)?)
}

/// Loads the manifest, computes statistics and drift, builds the initial scene.
pub fn open_study(manifest: &Path, format: TableFormat, cfg: SessionConfig) -> Result<Session, StudyError> {
    let study = load_manifest(manifest, format)?;
    open_series(study.series, &study.binding, cfg)
}

/// One JSON mutation per line; blank lines and lines starting with `#` are skipped.
pub fn parse_log(text: &str) -> Result<Vec<Mutation>, (usize, CodecError)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| codec::from_str_with_path(l).map_err(|e| (i + 1, e)))
        .collect()
}

pub fn format_log(log: &[Mutation]) -> String {
    log.iter().map(|m| codec::to_canonical_string(m) + "\n").collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayStep {
    /// Scene version after the request.
    pub version: u64,
    /// Canonical patch, or the error message of a rejected request.
    pub outcome: Result<String, String>,
    /// Canonical scene document at `version`.
    pub snapshot: String,
}

/// Applies `log` in order, recording every outcome and snapshot.
pub fn replay(session: &mut Session, log: &[Mutation]) -> Vec<ReplayStep> {
    log.iter()
        .map(|m| {
            let outcome = session
                .apply(m)
                .map(|p| codec::serialize_patch(&p))
                .map_err(|e| e.to_string());
            ReplayStep {
                version: session.version(),
                outcome,
                snapshot: codec::serialize_scene(session.scene()).expect("session scenes validate"),
            }
        })
        .collect()
}
