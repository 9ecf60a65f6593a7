//! Skewness/kurtosis bivariate color scheme.
//!
//! The Categorical View is a 3×3 matrix: columns split skewness (purple,
//! blue, red hue), rows split excess kurtosis (luminance). The normal
//! distribution sits in the center cell. Touching a cell zooms into its
//! value range (Detailed View); touching any cell again restores the
//! Categorical View.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::palette::{self, Hue, Rgba};
use crate::stats::Shape;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SkError {
    #[error("SK cell ({col}, {row}) out of range")]
    InvalidCell { col: u8, row: u8 },
    #[error("cannot zoom without any (skewness, kurtosis) samples")]
    EmptyPopulation,
}

/// Matrix cell: `col` indexes skewness, `row` indexes excess kurtosis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SkCell {
    pub col: u8,
    pub row: u8,
}

impl SkCell {
    pub const CENTER: SkCell = SkCell { col: 1, row: 1 };

    pub fn new(col: u8, row: u8) -> Result<Self, SkError> {
        if col > 2 || row > 2 {
            return Err(SkError::InvalidCell { col, row });
        }
        Ok(Self { col, row })
    }

    pub fn all() -> impl Iterator<Item = SkCell> {
        (0..3).flat_map(|row| (0..3).map(move |col| SkCell { col, row }))
    }
}

/// Category bounds. Values exactly on a bound belong to the center interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkThresholds {
    pub skewness: f64,
    pub kurtosis: f64,
}

impl Default for SkThresholds {
    fn default() -> Self {
        Self {
            skewness: 0.5,
            kurtosis: 0.5,
        }
    }
}

/// Closed real interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Which third of the interval `x` falls in (0..=2); `x` must be inside.
    fn third(&self, x: f64) -> usize {
        let t = (x - self.lo) / (self.hi - self.lo) * 3.0;
        (libm::floor(t).max(0.0) as usize).min(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkMode {
    Categorical,
    Detailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum SkMapperState {
    #[default]
    Categorical,
    Detailed {
        cell: SkCell,
        skew_range: Interval,
        kurt_range: Interval,
    },
}

impl SkMapperState {
    pub fn mode(&self) -> SkMode {
        match self {
            SkMapperState::Categorical => SkMode::Categorical,
            SkMapperState::Detailed { .. } => SkMode::Detailed,
        }
    }

    pub fn selected_cell(&self) -> Option<SkCell> {
        match self {
            SkMapperState::Categorical => None,
            SkMapperState::Detailed { cell, .. } => Some(*cell),
        }
    }
}

fn axis_index(x: f64, threshold: f64) -> u8 {
    if x < -threshold {
        0
    } else if x > threshold {
        2
    } else {
        1
    }
}

pub fn classify_categorical(skewness: f64, kurtosis_excess: f64, t: &SkThresholds) -> SkCell {
    SkCell {
        col: axis_index(skewness, t.skewness),
        row: axis_index(kurtosis_excess, t.kurtosis),
    }
}

pub fn color_categorical(cell: SkCell) -> Rgba {
    palette::SK_CATEGORICAL[usize::from(cell.col.min(2))][usize::from(cell.row.min(2))]
}

/// Bounds of one axis category; `None` marks an unbounded side.
fn axis_bounds(index: u8, threshold: f64) -> (Option<f64>, Option<f64>) {
    match index {
        0 => (None, Some(-threshold)),
        1 => (Some(-threshold), Some(threshold)),
        _ => (Some(threshold), None),
    }
}

/// Closes an axis category with the population extremes. When the
/// population does not reach past the bounded side, the interval takes the
/// width of the center category.
fn clamp_axis(bounds: (Option<f64>, Option<f64>), observed: (f64, f64), threshold: f64) -> Interval {
    let fallback = 2.0 * threshold.max(f64::EPSILON);
    match bounds {
        (Some(lo), Some(hi)) => Interval { lo, hi },
        (None, Some(hi)) => {
            let lo = if observed.0 < hi { observed.0 } else { hi - fallback };
            Interval { lo, hi }
        }
        (Some(lo), None) => {
            let hi = if observed.1 > lo { observed.1 } else { lo + fallback };
            Interval { lo, hi }
        }
        (None, None) => Interval {
            lo: observed.0,
            hi: observed.1.max(observed.0 + fallback),
        },
    }
}

/// Categorical → Detailed on `cell`; Detailed → Categorical for any cell.
pub fn select_cell(
    state: &SkMapperState,
    cell: SkCell,
    population: &[Shape],
    t: &SkThresholds,
) -> Result<SkMapperState, SkError> {
    SkCell::new(cell.col, cell.row)?;
    if population.is_empty() {
        return Err(SkError::EmptyPopulation);
    }
    if let SkMapperState::Detailed { .. } = state {
        return Ok(SkMapperState::Categorical);
    }
    let extremes = |f: fn(&Shape) -> f64| {
        population
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let skew = extremes(|s| s.skewness);
    let kurt = extremes(|s| s.kurtosis_excess);
    Ok(SkMapperState::Detailed {
        cell,
        skew_range: clamp_axis(axis_bounds(cell.col, t.skewness), skew, t.skewness),
        kurt_range: clamp_axis(axis_bounds(cell.row, t.kurtosis), kurt, t.kurtosis),
    })
}

/// Detailed View color: the selected cell's nine-step ramp, row-major by
/// (kurtosis third, skewness third) from darkest to lightest. Points outside
/// the focus range are grayed out.
pub fn color_detailed(skewness: f64, kurtosis_excess: f64, cell: SkCell, skew_range: &Interval, kurt_range: &Interval) -> Rgba {
    if !(skew_range.contains(skewness) && kurt_range.contains(kurtosis_excess)) {
        return palette::OUT_OF_FOCUS;
    }
    let i = skew_range.third(skewness);
    let j = kurt_range.third(kurtosis_excess);
    palette::sk_detailed_ramp(Hue::for_column(cell.col))[j * 3 + i]
}

/// Color of a glyph under the current mapper state.
pub fn glyph_color(shape: Option<&Shape>, state: &SkMapperState, t: &SkThresholds) -> Rgba {
    let Some(s) = shape else {
        return palette::DEGENERATE_GLYPH;
    };
    match state {
        SkMapperState::Categorical => color_categorical(classify_categorical(s.skewness, s.kurtosis_excess, t)),
        SkMapperState::Detailed {
            cell,
            skew_range,
            kurt_range,
        } => color_detailed(s.skewness, s.kurtosis_excess, *cell, skew_range, kurt_range),
    }
}

/// Color the widget shows for one of its nine cells.
pub fn widget_cell_color(cell: SkCell, state: &SkMapperState) -> Rgba {
    match state {
        SkMapperState::Categorical => color_categorical(cell),
        SkMapperState::Detailed { cell: selected, .. } => {
            palette::sk_detailed_ramp(Hue::for_column(selected.col))[usize::from(cell.row) * 3 + usize::from(cell.col)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    const T: SkThresholds = SkThresholds {
        skewness: 0.5,
        kurtosis: 0.5,
    };

    fn shape(skewness: f64, kurtosis_excess: f64) -> Shape {
        Shape {
            skewness,
            kurtosis_excess,
        }
    }

    #[test]
    fn categorical_classification() {
        assert_eq!(classify_categorical(0.0, 0.0, &T), SkCell::CENTER);
        assert_eq!(classify_categorical(-2.0, 3.0, &T), SkCell { col: 0, row: 2 });
        assert_eq!(classify_categorical(0.5, -0.5, &T), SkCell::CENTER);
    }

    #[test]
    fn categorical_colors() {
        assert_eq!(color_categorical(SkCell::CENTER), palette::SK_CATEGORICAL[1][1]);
        assert_eq!(color_categorical(SkCell { col: 2, row: 2 }), Rgba::rgb(237, 168, 146));
        assert_eq!(color_categorical(SkCell { col: 0, row: 0 }), Rgba::rgb(78, 22, 136));
    }

    #[test]
    fn zoom_into_center_and_clamped_cells() {
        let pop = vec![shape(-1.0, 0.0), shape(3.4, 2.0)];
        let s = select_cell(&SkMapperState::Categorical, SkCell::CENTER, &pop, &T).unwrap();
        assert_eq!(
            s,
            SkMapperState::Detailed {
                cell: SkCell::CENTER,
                skew_range: Interval { lo: -0.5, hi: 0.5 },
                kurt_range: Interval { lo: -0.5, hi: 0.5 },
            }
        );
        let s = select_cell(&SkMapperState::Categorical, SkCell { col: 2, row: 1 }, &pop, &T).unwrap();
        let SkMapperState::Detailed { skew_range, .. } = s else { panic!() };
        assert_eq!(skew_range, Interval { lo: 0.5, hi: 3.4 });
        let back = select_cell(&s, SkCell { col: 0, row: 0 }, &pop, &T).unwrap();
        assert_eq!(back, SkMapperState::Categorical);
    }

    #[test]
    fn clamp_falls_back_when_population_does_not_reach() {
        let pop = vec![shape(0.1, 0.1)];
        let s = select_cell(&SkMapperState::Categorical, SkCell { col: 0, row: 2 }, &pop, &T).unwrap();
        let SkMapperState::Detailed { skew_range, kurt_range, .. } = s else { panic!() };
        assert_eq!(skew_range, Interval { lo: -1.5, hi: -0.5 });
        assert_eq!(kurt_range, Interval { lo: 0.5, hi: 1.5 });
    }

    #[test]
    fn select_errors() {
        assert_eq!(
            select_cell(&SkMapperState::Categorical, SkCell::CENTER, &[], &T),
            Err(SkError::EmptyPopulation)
        );
        assert!(SkCell::new(3, 0).is_err());
    }

    #[test]
    fn detailed_ramp_positions() {
        let r = Interval { lo: -0.5, hi: 0.5 };
        let ramp = palette::SK_DETAILED_BLUE;
        assert_eq!(color_detailed(0.0, 0.0, SkCell::CENTER, &r, &r), ramp[4]);
        assert_eq!(color_detailed(-0.5, -0.5, SkCell::CENTER, &r, &r), ramp[0]);
        assert_eq!(color_detailed(0.5, 0.5, SkCell::CENTER, &r, &r), ramp[8]);
        assert_eq!(color_detailed(0.4, -0.4, SkCell::CENTER, &r, &r), ramp[2]);
        assert_eq!(color_detailed(0.9, 0.0, SkCell::CENTER, &r, &r), palette::OUT_OF_FOCUS);
    }

    #[test]
    fn degenerate_glyphs_keep_reserved_color() {
        assert_eq!(glyph_color(None, &SkMapperState::Categorical, &T), palette::DEGENERATE_GLYPH);
    }

    proptest! {
        #[test]
        fn cells_partition_the_plane(s in -1e3f64..1e3, k in -1e3f64..1e3) {
            let cell = classify_categorical(s, k, &T);
            let hits = SkCell::all()
                .filter(|c| {
                    let (slo, shi) = axis_bounds(c.col, T.skewness);
                    let (klo, khi) = axis_bounds(c.row, T.kurtosis);
                    let inside = |x: f64, lo: Option<f64>, hi: Option<f64>, center: bool| {
                        let above = lo.is_none_or(|l| if center { x >= l } else { x > l });
                        let below = hi.is_none_or(|h| if center { x <= h } else { x < h });
                        above && below
                    };
                    inside(s, slo, shi, c.col == 1) && inside(k, klo, khi, c.row == 1)
                })
                .collect::<alloc::vec::Vec<_>>();
            prop_assert_eq!(hits, vec![cell]);
        }

        #[test]
        fn select_twice_returns_to_categorical(col in 0u8..3, row in 0u8..3, s in -5f64..5.0, k in -3f64..8.0) {
            let pop = [shape(s, k), shape(-s, k + 1.0)];
            let cell = SkCell::new(col, row).unwrap();
            let once = select_cell(&SkMapperState::Categorical, cell, &pop, &T).unwrap();
            prop_assert_eq!(once.mode(), SkMode::Detailed);
            if let SkMapperState::Detailed { skew_range, kurt_range, .. } = once {
                prop_assert!(skew_range.lo < skew_range.hi && kurt_range.lo < kurt_range.hi);
            }
            let twice = select_cell(&once, cell, &pop, &T).unwrap();
            prop_assert_eq!(twice, SkMapperState::Categorical);
        }
    }
}
