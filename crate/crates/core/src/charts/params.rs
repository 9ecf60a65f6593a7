use serde::{Deserialize, Serialize};

/// Frozen chart dimensions, in meters, for a roughly 1 m virtual chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    pub chart_width: f64,
    pub chart_height: f64,
    /// Glyph width (= depth) as a fraction of one attribute slot.
    pub glyph_fill: f64,
    pub z_spacing: f64,

    pub tet_gap_min: f64,
    pub tet_gap_scale: f64,
    pub tet_line_min: f64,
    pub tet_line_max: f64,
    pub tet_cube: f64,

    pub chrono_bar_width: f64,
    pub chrono_bin_gap: f64,
    pub chrono_step_spacing: f64,
    pub chrono_height: f64,
    pub chrono_alpha_min: f64,
    pub chrono_alpha_max: f64,

    pub label_size: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            chart_width: 1.0,
            chart_height: 1.0,
            glyph_fill: 0.6,
            z_spacing: 0.12,

            tet_gap_min: 0.02,
            tet_gap_scale: 0.2,
            tet_line_min: 0.002,
            tet_line_max: 0.02,
            tet_cube: 0.025,

            chrono_bar_width: 0.03,
            chrono_bin_gap: 0.004,
            chrono_step_spacing: 0.15,
            chrono_height: 1.0,
            chrono_alpha_min: 0.25,
            chrono_alpha_max: 0.9,

            label_size: 0.02,
        }
    }
}

impl LayoutParams {
    /// Width of one attribute slot on the x-axis.
    pub fn slot_width(&self, attributes: usize) -> f64 {
        self.chart_width / attributes.max(1) as f64
    }

    /// Center x of attribute slot `a`.
    pub fn slot_x(&self, a: usize, attributes: usize) -> f64 {
        (a as f64 + 0.5) * self.slot_width(attributes)
    }
}
