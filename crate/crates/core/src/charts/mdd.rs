use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ChartError, LayoutParams};
use crate::data::StudySeries;
use crate::palette::Rgba;
use crate::skmapper::{glyph_color, SkMapperState, SkThresholds};
use crate::stats::{ModalityClass, StatsTable};

/// What the z-axis shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MddMode {
    /// One dataset; z is the modality class.
    SingleDataset,
    /// All time steps; z is the time-step index.
    MultiDataset,
}

impl MddMode {
    pub fn for_steps(steps: usize) -> Self {
        if steps > 1 {
            MddMode::MultiDataset
        } else {
            MddMode::SingleDataset
        }
    }
}

/// One bar: centered on the normalized median, as tall as the normalized IQR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MddGlyph {
    pub attribute_index: usize,
    pub time_step: usize,
    pub z_slot: usize,
    pub center_y: f64,
    pub height: f64,
    pub width: f64,
    pub color: Rgba,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MddLayout {
    pub mode: MddMode,
    pub glyphs: Vec<MddGlyph>,
    pub x_labels: Vec<String>,
    pub z_title: String,
    pub z_labels: Vec<String>,
}

/// Builds the glyphs. In single-dataset mode only step 0 is drawn.
pub fn build_mdd(
    series: &StudySeries,
    stats: &StatsTable,
    sk: &SkMapperState,
    thresholds: &SkThresholds,
    mode: MddMode,
    params: &LayoutParams,
) -> Result<MddLayout, ChartError> {
    if series.is_empty() {
        return Err(ChartError::EmptySeries);
    }
    let attrs = series.attribute_count();
    if stats.step_count() != series.len() || stats.attribute_count() != attrs {
        return Err(ChartError::ShapeMismatch);
    }
    let width = params.slot_width(attrs) * params.glyph_fill;
    let steps = match mode {
        MddMode::SingleDataset => 0..1,
        MddMode::MultiDataset => 0..series.len(),
    };
    let mut glyphs = Vec::with_capacity(attrs * steps.len());
    for a in 0..attrs {
        for t in steps.clone() {
            let s = stats.get(t, a);
            let (center_y, height) = clip_box(s.normalized_median(), s.normalized_iqr());
            glyphs.push(MddGlyph {
                attribute_index: a,
                time_step: t,
                z_slot: match mode {
                    MddMode::SingleDataset => s.modality.ordinal(),
                    MddMode::MultiDataset => t,
                },
                center_y,
                height,
                width,
                color: glyph_color(s.shape.as_ref(), sk, thresholds),
            });
        }
    }
    let (z_title, z_labels) = match mode {
        MddMode::SingleDataset => (
            String::from("Modality"),
            ModalityClass::ALL.iter().map(|m| String::from(m.name())).collect(),
        ),
        MddMode::MultiDataset => (
            String::from("Datasets"),
            series.time_steps().iter().map(|d| String::from(d.label())).collect(),
        ),
    };
    Ok(MddLayout {
        mode,
        glyphs,
        x_labels: series.attributes().iter().map(|a| a.name.clone()).collect(),
        z_title,
        z_labels,
    })
}

/// Clips `center ± height / 2` to `[0, 1]`.
fn clip_box(center: f64, height: f64) -> (f64, f64) {
    if center - height / 2.0 >= 0.0 && center + height / 2.0 <= 1.0 {
        return (center, height);
    }
    let lo = (center - height / 2.0).clamp(0.0, 1.0);
    let hi = (center + height / 2.0).clamp(0.0, 1.0);
    ((lo + hi) / 2.0, hi - lo)
}
