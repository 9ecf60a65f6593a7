//! Model-based fiber geometry and bin-driven highlighting.
//!
//! Fibers are straight cylinders from their endpoints and diameter. A
//! highlight selects, independently in two adjacent time steps, the fibers
//! whose attribute value falls into one Chrono Bins bin; no correspondence
//! between the two index lists is implied.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Dataset, GeometryColumns, StudySeries};
use crate::palette::{self, Rgba};
use crate::scene::Transform;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpatialError {
    #[error("record {row}: diameter {diameter} is not positive")]
    NonPositiveDiameter { row: usize, diameter: f64 },
    #[error("record {row}: start and end points coincide")]
    CoincidentEndpoints { row: usize },
    #[error("steps {earlier} and {later} are not an adjacent pair of a {steps}-step series")]
    InvalidStepPair {
        earlier: usize,
        later: usize,
        steps: usize,
    },
    #[error("attribute index {0} out of range")]
    UnknownAttribute(usize),
    #[error("bin {bin} out of range for {bins} bins")]
    UnknownBin { bin: usize, bins: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberCylinder {
    pub fiber_index: usize,
    pub start: [f64; 3],
    pub end: [f64; 3],
    pub radius: f64,
}

impl FiberCylinder {
    pub fn length(&self) -> f64 {
        let d: [f64; 3] = core::array::from_fn(|i| self.end[i] - self.start[i]);
        libm::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
    }
}

/// One cylinder per record, radius = diameter / 2.
pub fn build_fibers(dataset: &Dataset, cols: &GeometryColumns) -> Result<Vec<FiberCylinder>, SpatialError> {
    dataset
        .records()
        .iter()
        .enumerate()
        .map(|(row, r)| {
            let diameter = r.values[cols.diameter];
            if !(diameter > 0.0) {
                return Err(SpatialError::NonPositiveDiameter { row, diameter });
            }
            let start = cols.start.map(|c| r.values[c]);
            let end = cols.end.map(|c| r.values[c]);
            if start == end {
                return Err(SpatialError::CoincidentEndpoints { row });
            }
            Ok(FiberCylinder {
                fiber_index: row,
                start,
                end,
                radius: diameter / 2.0,
            })
        })
        .collect()
}

/// Value interval `[lo, hi)`, or `[lo, hi]` when `closed_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub lo: f64,
    pub hi: f64,
    pub closed_hi: bool,
}

impl ValueRange {
    pub fn half_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, closed_hi: false }
    }

    /// The range of histogram bin `bin`; the last bin is closed.
    pub fn of_bin(edges: &[f64], bin: usize) -> Result<Self, SpatialError> {
        let bins = edges.len().saturating_sub(1);
        if bin >= bins {
            return Err(SpatialError::UnknownBin { bin, bins });
        }
        Ok(Self {
            lo: edges[bin],
            hi: edges[bin + 1],
            closed_hi: bin + 1 == bins,
        })
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && (v < self.hi || (self.closed_hi && v == self.hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HighlightRole {
    Earlier,
    Later,
}

impl HighlightRole {
    pub fn color(self) -> Rgba {
        match self {
            HighlightRole::Earlier => palette::HIGHLIGHT_EARLIER,
            HighlightRole::Later => palette::HIGHLIGHT_LATER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighlightSet {
    pub attribute: usize,
    pub range: ValueRange,
    pub earlier_step: usize,
    pub later_step: usize,
    pub earlier_indices: Vec<usize>,
    pub later_indices: Vec<usize>,
}

impl HighlightSet {
    /// `(step, fiber indices, role)` for both sides.
    pub fn sides(&self) -> [(usize, &[usize], HighlightRole); 2] {
        [
            (self.earlier_step, &self.earlier_indices, HighlightRole::Earlier),
            (self.later_step, &self.later_indices, HighlightRole::Later),
        ]
    }
}

/// Fibers of `earlier_step` and `later_step` whose `attribute` lies in `range`.
pub fn select_by_range(
    series: &StudySeries,
    attribute: usize,
    range: ValueRange,
    earlier_step: usize,
    later_step: usize,
) -> Result<HighlightSet, SpatialError> {
    if later_step != earlier_step + 1 || later_step >= series.len() {
        return Err(SpatialError::InvalidStepPair {
            earlier: earlier_step,
            later: later_step,
            steps: series.len(),
        });
    }
    if attribute >= series.attribute_count() {
        return Err(SpatialError::UnknownAttribute(attribute));
    }
    let members = |step: usize| -> Vec<usize> {
        series.time_steps()[step]
            .column(attribute)
            .enumerate()
            .filter(|(_, v)| range.contains(*v))
            .map(|(i, _)| i)
            .collect()
    };
    Ok(HighlightSet {
        attribute,
        range,
        earlier_step,
        later_step,
        earlier_indices: members(earlier_step),
        later_indices: members(later_step),
    })
}

/// Row-major near-square grid of anchors, centered on the origin, in
/// time-step order. Rows run top to bottom.
pub fn grid_layout(count: usize, spacing: f64) -> Vec<Transform> {
    if count == 0 {
        return Vec::new();
    }
    let cols = {
        let s = count.isqrt();
        if s * s < count {
            s + 1
        } else {
            s
        }
    };
    let rows = count.div_ceil(cols);
    (0..count)
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            let x = (c as f64 - (cols - 1) as f64 / 2.0) * spacing;
            let y = ((rows - 1) as f64 / 2.0 - r as f64) * spacing;
            Transform::at([x, y, 0.0])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{AttributeDescriptor, FiberRecord, GeometryBinding};
    use alloc::vec;

    fn geometry_dataset(rows: &[[f64; 7]]) -> (Dataset, GeometryColumns) {
        let b = GeometryBinding::standard();
        let attrs: Vec<_> = b.names().iter().map(|n| AttributeDescriptor::new(*n, "µm")).collect();
        let cols = b.resolve(&attrs).unwrap();
        let recs = rows.iter().map(|r| FiberRecord::new(r.to_vec())).collect();
        (Dataset::new("s", 0.0, attrs, recs).unwrap(), cols)
    }

    #[test]
    fn cylinder_from_endpoints() {
        let (ds, cols) = geometry_dataset(&[[0.0, 0.0, 0.0, 0.0, 0.0, 100.0, 10.0]]);
        let f = build_fibers(&ds, &cols).unwrap();
        assert_eq!(f[0].radius, 5.0);
        assert_eq!(f[0].length(), 100.0);
    }

    #[test]
    fn invalid_geometry_reports_row() {
        let (ds, cols) = geometry_dataset(&[[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0]]);
        assert_eq!(
            build_fibers(&ds, &cols),
            Err(SpatialError::NonPositiveDiameter { row: 1, diameter: 0.0 })
        );
        let (ds, cols) = geometry_dataset(&[[1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0]]);
        assert_eq!(build_fibers(&ds, &cols), Err(SpatialError::CoincidentEndpoints { row: 0 }));
    }

    #[test]
    fn grid_anchors() {
        assert_eq!(grid_layout(1, 1.0), vec![Transform::at([0.0, 0.0, 0.0])]);
        let g = grid_layout(8, 1.0);
        assert_eq!(g.len(), 8);
        assert_eq!(g[0].position, [-1.0, 1.0, 0.0]);
        assert_eq!(g[7].position, [0.0, -1.0, 0.0]);
        let g2 = grid_layout(8, 2.0);
        for (a, b) in g.iter().zip(&g2) {
            assert_eq!(a.position.map(|x| 2.0 * x), b.position);
        }
    }

    #[test]
    fn range_membership() {
        let edges = [0.0, 1.0, 2.0];
        assert!(!ValueRange::of_bin(&edges, 0).unwrap().contains(1.0));
        assert!(ValueRange::of_bin(&edges, 1).unwrap().contains(2.0));
        assert!(ValueRange::of_bin(&edges, 2).is_err());
    }
}
