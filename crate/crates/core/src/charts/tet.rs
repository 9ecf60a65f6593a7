use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ChartError, LayoutParams};
use crate::palette::{tet_line_color, Rgba};
use crate::stats::DriftMatrix;

/// Connection between cubes `t` and `t + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TetLink {
    pub drift: f64,
    pub thickness: f64,
    pub color: Rgba,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TetColumn {
    pub attribute_index: usize,
    /// One cube per time step, bottom to top.
    pub cube_y: Vec<f64>,
    pub links: Vec<TetLink>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TetLayout {
    pub columns: Vec<TetColumn>,
}

/// Vertical cube stacks whose gaps, line widths and line colors grow with
/// normalized drift.
pub fn build_tet(drift: &DriftMatrix, params: &LayoutParams) -> Result<TetLayout, ChartError> {
    if drift.pairs() == 0 {
        return Err(ChartError::TooFewSteps(drift.pairs() + 1));
    }
    let columns = (0..drift.attributes())
        .map(|a| {
            let mut y = 0.0;
            let mut cube_y = Vec::with_capacity(drift.pairs() + 1);
            cube_y.push(y);
            let mut links = Vec::with_capacity(drift.pairs());
            for t in 0..drift.pairs() {
                let d = drift.normalized_at(t, a).clamp(0.0, 1.0);
                y += params.tet_gap_min + params.tet_gap_scale * d;
                cube_y.push(y);
                links.push(TetLink {
                    drift: d,
                    thickness: params.tet_line_min * (1.0 - d) + params.tet_line_max * d,
                    color: tet_line_color(d),
                });
            }
            TetColumn {
                attribute_index: a,
                cube_y,
                links,
            }
        })
        .collect();
    Ok(TetLayout { columns })
}

/// One drift entry: attribute `attribute` between steps `pair` and `pair + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftRank {
    pub attribute: usize,
    pub pair: usize,
    pub value: f64,
}

/// Every matrix entry, largest normalized drift first; ties keep
/// (attribute, pair) order.
pub fn rank_drift(drift: &DriftMatrix) -> Vec<DriftRank> {
    let mut out: Vec<DriftRank> = (0..drift.attributes())
        .flat_map(|a| {
            (0..drift.pairs()).map(move |t| DriftRank {
                attribute: a,
                pair: t,
                value: drift.normalized_at(t, a),
            })
        })
        .collect();
    out.sort_by(|x, y| y.value.total_cmp(&x.value));
    out
}

/// [`rank_drift`] restricted to values strictly above `threshold`.
pub fn rank_drift_above(drift: &DriftMatrix, threshold: f64) -> Vec<DriftRank> {
    let mut r = rank_drift(drift);
    r.retain(|e| e.value > threshold);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::palette;
    use crate::stats::DriftNormalization;
    use alloc::vec;

    fn matrix(raw: Vec<Vec<f64>>) -> DriftMatrix {
        let attrs = raw[0].len();
        DriftMatrix::from_raw(raw, vec![false; attrs], DriftNormalization::Global)
    }

    #[test]
    fn zero_and_full_drift_extremes() {
        let p = LayoutParams::default();
        let l = build_tet(&matrix(vec![vec![0.0, 1.0]]), &p).unwrap();
        let still = &l.columns[0];
        assert_eq!(still.cube_y, vec![0.0, p.tet_gap_min]);
        assert_eq!(still.links[0].thickness, p.tet_line_min);
        assert_eq!(still.links[0].color, palette::TET_LINE_LOW);
        let moved = &l.columns[1];
        assert!((moved.cube_y[1] - (p.tet_gap_min + p.tet_gap_scale)).abs() < 1e-12);
        assert_eq!(moved.links[0].thickness, p.tet_line_max);
        assert_eq!(moved.links[0].color, palette::TET_LINE_HIGH);
    }

    #[test]
    fn quiet_ends_cluster() {
        let p = LayoutParams::default();
        let l = build_tet(&matrix(vec![vec![0.01], vec![1.0], vec![0.9], vec![0.01]]), &p).unwrap();
        let y = &l.columns[0].cube_y;
        let first_gap = y[1] - y[0];
        let last_gap = y[4] - y[3];
        let mid_gap = y[2] - y[1];
        assert!(first_gap < mid_gap / 5.0 && last_gap < mid_gap / 5.0);
        assert!(y.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ranking_order_and_ties() {
        let m = matrix(vec![vec![0.5, 0.0, 1.0], vec![0.5, 0.2, 0.0]]);
        let r = rank_drift(&m);
        assert_eq!(r.len(), 6);
        assert_eq!((r[0].attribute, r[0].pair, r[0].value), (2, 0, 1.0));
        assert_eq!((r[1].attribute, r[1].pair), (0, 0));
        assert_eq!((r[2].attribute, r[2].pair), (0, 1));
        let zero = matrix(vec![vec![0.0, 0.0]]);
        assert!(rank_drift_above(&zero, 0.0).is_empty());
    }
}
