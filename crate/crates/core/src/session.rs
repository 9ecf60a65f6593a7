//! Analysis session state machine.
//!
//! A [`Session`] owns the immutable study, its statistics and fiber geometry,
//! plus the small mutable interaction state (SK Mapper, charts,
//! highlights). Every [`Mutation`] is applied transactionally: the next
//! scene is built from a candidate state and only committed when that
//! succeeds, so a failed request leaves the session untouched. The scene
//! version counts successful mutations.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charts::{build_chrono, build_mdd, build_tet, ChartError, LayoutParams, MddMode};
use crate::data::{DataError, GeometryBinding, GeometryColumns, StudySeries};
use crate::scene::{
    chrono_chart_id, chrono_chart_node, diff_scenes, fiber_colors, fiber_view_node, mdd_chart_node, tet_chart_node,
    FiberFrame, Scene, SceneError, SceneParams, ScenePatch, Transform,
};
use crate::skmapper::{select_cell, SkCell, SkError, SkMapperState, SkThresholds};
use crate::spatial::{build_fibers, grid_layout, select_by_range, FiberCylinder, HighlightSet, SpatialError, ValueRange};
use crate::stats::{
    drift_matrix, shared_binning, DriftMatrix, DriftNormalization, ModalityConfig, Shape, SortedColumns, StatsError,
    StatsTable,
};

/// Id of the one MDD/TET chart entity.
pub const MAIN_CHART: &str = "mdd";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Spatial(#[from] SpatialError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Sk(#[from] SkError),
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("chart `{chart_id}` is not a {expected} chart")]
    WrongChartKind { chart_id: String, expected: &'static str },
    #[error("a Chrono Bins chart for `{0}` already exists")]
    DuplicateChart(String),
    #[error("{what} {index} out of range (0..{len})")]
    OutOfRange { what: &'static str, index: usize, len: usize },
    #[error("the temporal evolution tracker needs at least 2 time steps")]
    NoTemporalData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Mdd,
    Tet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChartEntry {
    /// MDD Glyphs and TET are two representations of one chart.
    Distribution { representation: Representation },
    ChronoBins {
        attribute: usize,
        /// Placement slot next to the main chart.
        slot: usize,
        edges: Vec<f64>,
    },
}

/// State-changing requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Mutation {
    SetRepresentation {
        chart_id: String,
        representation: Representation,
    },
    ExtractChrono {
        attribute: String,
    },
    DismissChrono {
        chart_id: String,
    },
    ClickChronoQuad {
        chart_id: String,
        bin_index: usize,
        time_pair: usize,
        #[serde(default)]
        dim_others: bool,
    },
    SkSelect {
        col: u8,
        row: u8,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Highlight {
    pub set: HighlightSet,
    pub dim_others: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SessionConfig {
    pub modality: ModalityConfig,
    pub thresholds: SkThresholds,
    pub drift_normalization: DriftNormalization,
    pub layout: LayoutParams,
    pub scene: SceneParams,
}

/// Statistics derived once per study.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub columns: SortedColumns,
    pub stats: StatsTable,
    /// `None` for single-step studies.
    pub drift: Option<DriftMatrix>,
}

impl Analysis {
    pub fn compute(series: &StudySeries, cfg: &SessionConfig) -> Result<Self, StatsError> {
        let columns = SortedColumns::new(series);
        let stats = StatsTable::compute(&columns, &cfg.modality)?;
        Self::from_parts(columns, stats, cfg.drift_normalization)
    }

    /// Adds the drift matrix to columns and stats computed elsewhere.
    pub fn from_parts(columns: SortedColumns, stats: StatsTable, norm: DriftNormalization) -> Result<Self, StatsError> {
        let drift = if columns.step_count() > 1 {
            Some(drift_matrix(&columns, norm)?)
        } else {
            None
        };
        Ok(Self { columns, stats, drift })
    }
}

/// Mutable part of the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub sk: SkMapperState,
    pub charts: BTreeMap<String, ChartEntry>,
    /// At most one highlight per Chrono Bins chart.
    pub highlights: BTreeMap<String, Highlight>,
}

impl Interaction {
    fn initial() -> Self {
        let mut charts = BTreeMap::new();
        charts.insert(
            String::from(MAIN_CHART),
            ChartEntry::Distribution {
                representation: Representation::Mdd,
            },
        );
        Self {
            sk: SkMapperState::Categorical,
            charts,
            highlights: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    series: StudySeries,
    config: SessionConfig,
    analysis: Analysis,
    fibers: Vec<Vec<FiberCylinder>>,
    frame: FiberFrame,
    grid: Vec<Transform>,
    state: Interaction,
    scene: Scene,
    version: u64,
}

impl Session {
    pub fn open(series: StudySeries, binding: &GeometryBinding, config: SessionConfig) -> Result<Self, SessionError> {
        let analysis = Analysis::compute(&series, &config)?;
        Self::with_analysis(series, binding, config, analysis)
    }

    /// Opens with statistics computed by the caller, e.g. in parallel.
    pub fn with_analysis(
        series: StudySeries,
        binding: &GeometryBinding,
        config: SessionConfig,
        analysis: Analysis,
    ) -> Result<Self, SessionError> {
        let cols: GeometryColumns = binding.validate(&series)?;
        let fibers = series
            .time_steps()
            .iter()
            .map(|ds| build_fibers(ds, &cols))
            .collect::<Result<Vec<_>, _>>()?;
        let frame = FiberFrame::fit(fibers.iter().flatten(), config.scene.view_size);
        let origin = config.scene.grid_origin;
        let grid = grid_layout(series.len(), config.scene.grid_spacing)
            .into_iter()
            .map(|t| Transform::at(core::array::from_fn(|i| origin[i] + t.position[i])))
            .collect();
        let mut session = Self {
            series,
            config,
            analysis,
            fibers,
            frame,
            grid,
            state: Interaction::initial(),
            scene: Scene::empty(),
            version: 0,
        };
        session.scene = session.build_scene(&session.state)?;
        Ok(session)
    }

    pub fn series(&self) -> &StudySeries {
        &self.series
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn analysis(&self) -> &Analysis {
        &self.analysis
    }

    pub fn fibers(&self, step: usize) -> &[FiberCylinder] {
        &self.fibers[step]
    }

    pub fn interaction(&self) -> &Interaction {
        &self.state
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn mdd_mode(&self) -> MddMode {
        MddMode::for_steps(self.series.len())
    }

    /// Applies one mutation. On error nothing changes.
    pub fn apply(&mut self, m: &Mutation) -> Result<ScenePatch, SessionError> {
        let next = self.transition(m)?;
        let scene = self.build_scene(&next)?;
        let patch = diff_scenes(&self.scene, &scene);
        self.state = next;
        self.scene = scene;
        self.version += 1;
        Ok(patch)
    }

    fn transition(&self, m: &Mutation) -> Result<Interaction, SessionError> {
        let mut next = self.state.clone();
        match m {
            Mutation::SetRepresentation {
                chart_id,
                representation,
            } => {
                let entry = next
                    .charts
                    .get_mut(chart_id)
                    .ok_or_else(|| SessionError::UnknownChart(chart_id.clone()))?;
                let ChartEntry::Distribution { representation: r } = entry else {
                    return Err(SessionError::WrongChartKind {
                        chart_id: chart_id.clone(),
                        expected: "MDD/TET",
                    });
                };
                if *representation == Representation::Tet && self.analysis.drift.is_none() {
                    return Err(SessionError::NoTemporalData);
                }
                *r = *representation;
            }
            Mutation::ExtractChrono { attribute } => {
                let a = self.series.require_attribute(attribute)?;
                let id = chrono_chart_id(attribute);
                if next.charts.contains_key(&id) {
                    return Err(SessionError::DuplicateChart(attribute.clone()));
                }
                let edges = shared_binning(&self.analysis.columns, a)?;
                let used: Vec<usize> = next
                    .charts
                    .values()
                    .filter_map(|c| match c {
                        ChartEntry::ChronoBins { slot, .. } => Some(*slot),
                        _ => None,
                    })
                    .collect();
                let slot = (0..).find(|s| !used.contains(s)).expect("unbounded range");
                next.charts.insert(id, ChartEntry::ChronoBins { attribute: a, slot, edges });
            }
            Mutation::DismissChrono { chart_id } => {
                match next.charts.get(chart_id) {
                    Some(ChartEntry::ChronoBins { .. }) => {}
                    Some(_) => {
                        return Err(SessionError::WrongChartKind {
                            chart_id: chart_id.clone(),
                            expected: "Chrono Bins",
                        })
                    }
                    None => return Err(SessionError::UnknownChart(chart_id.clone())),
                }
                next.charts.remove(chart_id);
                next.highlights.remove(chart_id);
            }
            Mutation::ClickChronoQuad {
                chart_id,
                bin_index,
                time_pair,
                dim_others,
            } => {
                let (attribute, edges) = match next.charts.get(chart_id) {
                    Some(ChartEntry::ChronoBins { attribute, edges, .. }) => (*attribute, edges),
                    Some(_) => {
                        return Err(SessionError::WrongChartKind {
                            chart_id: chart_id.clone(),
                            expected: "Chrono Bins",
                        })
                    }
                    None => return Err(SessionError::UnknownChart(chart_id.clone())),
                };
                let bins = edges.len() - 1;
                if *bin_index >= bins {
                    return Err(SessionError::OutOfRange {
                        what: "bin",
                        index: *bin_index,
                        len: bins,
                    });
                }
                let pairs = self.series.len() - 1;
                if *time_pair >= pairs {
                    return Err(SessionError::OutOfRange {
                        what: "time pair",
                        index: *time_pair,
                        len: pairs,
                    });
                }
                let range = ValueRange::of_bin(edges, *bin_index)?;
                let set = select_by_range(&self.series, attribute, range, *time_pair, time_pair + 1)?;
                next.highlights.insert(
                    chart_id.clone(),
                    Highlight {
                        set,
                        dim_others: *dim_others,
                    },
                );
            }
            Mutation::SkSelect { col, row } => {
                let cell = SkCell::new(*col, *row)?;
                next.sk = select_cell(&next.sk, cell, &self.glyph_shapes(), &self.config.thresholds)?;
            }
        }
        Ok(next)
    }

    /// (skewness, kurtosis) of every non-degenerate glyph the MDD chart draws.
    pub fn glyph_shapes(&self) -> Vec<Shape> {
        let steps = match self.mdd_mode() {
            MddMode::SingleDataset => 1,
            MddMode::MultiDataset => self.series.len(),
        };
        (0..steps)
            .flat_map(|t| self.analysis.stats.step(t).iter().filter_map(|s| s.shape))
            .collect()
    }

    fn build_scene(&self, state: &Interaction) -> Result<Scene, SessionError> {
        let p = &self.config.layout;
        let s = &self.config.scene;
        let attrs = self.series.attributes();
        let mut nodes = Vec::with_capacity(state.charts.len() + self.series.len());
        for (id, chart) in &state.charts {
            let node = match chart {
                ChartEntry::Distribution {
                    representation: Representation::Mdd,
                } => {
                    let layout = build_mdd(
                        &self.series,
                        &self.analysis.stats,
                        &state.sk,
                        &self.config.thresholds,
                        self.mdd_mode(),
                        p,
                    )?;
                    mdd_chart_node(id, &layout, attrs, &state.sk, p, s, Transform::at(s.chart_anchor))
                }
                ChartEntry::Distribution {
                    representation: Representation::Tet,
                } => {
                    let drift = self.analysis.drift.as_ref().ok_or(SessionError::NoTemporalData)?;
                    let layout = build_tet(drift, p)?;
                    tet_chart_node(id, &layout, attrs, &state.sk, p, s, Transform::at(s.chart_anchor))
                }
                ChartEntry::ChronoBins { attribute, slot, edges } => {
                    let layout = build_chrono(&self.series, &self.analysis.columns, *attribute, edges, p)?;
                    chrono_chart_node(id, &layout, &attrs[*attribute], p, s, s.chrono_anchor(*slot))
                }
            };
            nodes.push(node);
        }
        let sets: Vec<&HighlightSet> = state.highlights.values().map(|h| &h.set).collect();
        let dim = state.highlights.values().any(|h| h.dim_others);
        for (t, ds) in self.series.time_steps().iter().enumerate() {
            let fibers = &self.fibers[t];
            let colors = fiber_colors(t, fibers.len(), &sets, dim);
            let title = alloc::format!("{} ({} N)", ds.label(), ds.load_newtons());
            nodes.push(fiber_view_node(t, &title, fibers, &colors, &self.frame, p, s, self.grid[t]));
        }
        Ok(Scene::new(nodes)?)
    }

    /// Scene of a single chart as the session would draw it in its initial
    /// state, e.g. for offline export.
    pub fn chart_scene(&self, chart: &str) -> Result<Scene, SessionError> {
        let p = &self.config.layout;
        let s = &self.config.scene;
        let attrs = self.series.attributes();
        let anchor = Transform::at(s.chart_anchor);
        let node = if chart == MAIN_CHART || chart == "tet" {
            let mut state = Interaction::initial();
            if chart == "tet" {
                if self.analysis.drift.is_none() {
                    return Err(SessionError::NoTemporalData);
                }
                state.charts.insert(
                    MAIN_CHART.to_string(),
                    ChartEntry::Distribution {
                        representation: Representation::Tet,
                    },
                );
            }
            let scene = self.build_scene(&state)?;
            return Ok(Scene::new(scene.nodes.into_iter().filter(|n| n.id == MAIN_CHART).collect())?);
        } else if let Some(name) = chart.strip_prefix("chrono:") {
            let a = self.series.require_attribute(name)?;
            let edges = shared_binning(&self.analysis.columns, a)?;
            let layout = build_chrono(&self.series, &self.analysis.columns, a, &edges, p)?;
            chrono_chart_node(chart, &layout, &attrs[a], p, s, anchor)
        } else {
            return Err(SessionError::UnknownChart(chart.to_string()));
        };
        Ok(Scene::new(alloc::vec![node])?)
    }
}
