use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ChartError, LayoutParams};
use crate::data::StudySeries;
use crate::palette::{self, Rgba};
use crate::stats::{Histogram, SortedColumns};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaClass {
    Increase,
    Decrease,
    Unchanged,
}

impl DeltaClass {
    pub fn of(delta: i64) -> Self {
        match delta.signum() {
            1 => DeltaClass::Increase,
            -1 => DeltaClass::Decrease,
            _ => DeltaClass::Unchanged,
        }
    }

    pub fn color(self) -> Rgba {
        match self {
            DeltaClass::Increase => palette::CHRONO_INCREASE,
            DeltaClass::Decrease => palette::CHRONO_DECREASE,
            DeltaClass::Unchanged => palette::CHRONO_UNCHANGED,
        }
    }
}

/// One histogram bar; `y0` is its bottom edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChronoBar {
    pub bin: usize,
    pub count: u64,
    pub y0: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChronoStack {
    pub step: usize,
    pub x: f64,
    pub label: String,
    /// Bin 0 (lowest values) at the bottom.
    pub bars: Vec<ChronoBar>,
}

impl ChronoStack {
    pub fn total(&self) -> u64 {
        self.bars.iter().map(|b| b.count).sum()
    }
}

/// Area joining bin `bin` of step `pair` to the same bin of step `pair + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChronoQuad {
    pub pair: usize,
    pub bin: usize,
    pub delta: i64,
    pub class: DeltaClass,
    pub opacity: f64,
    pub corners: [[f64; 2]; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinLabel {
    pub bin: usize,
    pub lo: f64,
    pub hi: f64,
    pub x: f64,
    pub y: f64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChronoLayout {
    pub attribute: usize,
    pub unit: String,
    pub edges: Vec<f64>,
    /// Height of one record.
    pub unit_height: f64,
    pub stacks: Vec<ChronoStack>,
    pub quads: Vec<ChronoQuad>,
    pub bin_labels: Vec<BinLabel>,
}

impl ChronoLayout {
    pub fn quad(&self, pair: usize, bin: usize) -> Option<&ChronoQuad> {
        let bins = self.edges.len() - 1;
        self.quads.get(pair * bins + bin).filter(|q| q.pair == pair && q.bin == bin)
    }
}

/// Stacked shared-binning histograms per time step, joined by delta areas.
pub fn build_chrono(
    series: &StudySeries,
    columns: &SortedColumns,
    attribute: usize,
    edges: &[f64],
    params: &LayoutParams,
) -> Result<ChronoLayout, ChartError> {
    if series.is_empty() {
        return Err(ChartError::EmptySeries);
    }
    if columns.step_count() != series.len() || attribute >= columns.attribute_count() {
        return Err(ChartError::ShapeMismatch);
    }
    let hists = (0..series.len())
        .map(|t| Histogram::from_sorted(columns.column(t, attribute), edges))
        .collect::<Result<Vec<_>, _>>()?;
    let bins = edges.len() - 1;
    let max_total = hists.iter().map(Histogram::total).max().unwrap_or(0).max(1);
    let gaps = params.chrono_bin_gap * (bins.saturating_sub(1)) as f64;
    let unit_height = (params.chrono_height - gaps).max(params.chrono_height * 0.5) / max_total as f64;

    let stacks: Vec<ChronoStack> = hists
        .iter()
        .enumerate()
        .map(|(t, h)| {
            let mut y = 0.0;
            let bars = h
                .counts()
                .iter()
                .enumerate()
                .map(|(bin, &count)| {
                    let bar = ChronoBar {
                        bin,
                        count,
                        y0: y,
                        height: count as f64 * unit_height,
                    };
                    y += bar.height + params.chrono_bin_gap;
                    bar
                })
                .collect();
            ChronoStack {
                step: t,
                x: t as f64 * params.chrono_step_spacing,
                label: format!("{} N", series.time_steps()[t].load_newtons()),
                bars,
            }
        })
        .collect();

    let mut quads = Vec::with_capacity(bins * stacks.len().saturating_sub(1));
    for pair in stacks.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let xa = a.x + params.chrono_bar_width / 2.0;
        let xb = b.x - params.chrono_bar_width / 2.0;
        for (ba, bb) in a.bars.iter().zip(&b.bars) {
            let delta = bb.count as i64 - ba.count as i64;
            quads.push(ChronoQuad {
                pair: a.step,
                bin: ba.bin,
                delta,
                class: DeltaClass::of(delta),
                opacity: 0.0,
                corners: [[xa, ba.y0], [xa, ba.y0 + ba.height], [xb, bb.y0 + bb.height], [xb, bb.y0]],
            });
        }
    }
    let max_abs = quads.iter().map(|q| q.delta.unsigned_abs()).max().unwrap_or(0);
    for q in &mut quads {
        let t = if max_abs == 0 {
            0.0
        } else {
            q.delta.unsigned_abs() as f64 / max_abs as f64
        };
        q.opacity = params.chrono_alpha_min + (params.chrono_alpha_max - params.chrono_alpha_min) * t;
    }

    let unit = series.attributes()[attribute].unit.clone();
    let last = stacks.last().expect("nonempty series");
    let label_x = last.x + params.chrono_bar_width;
    let bin_labels = last
        .bars
        .iter()
        .map(|bar| {
            let (lo, hi) = (edges[bar.bin], edges[bar.bin + 1]);
            BinLabel {
                bin: bar.bin,
                lo,
                hi,
                x: label_x,
                y: bar.y0 + bar.height / 2.0,
                text: format!("{lo:.2}-{hi:.2}"),
            }
        })
        .collect();

    Ok(ChronoLayout {
        attribute,
        unit,
        edges: edges.to_vec(),
        unit_height,
        stacks,
        quads,
        bin_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{AttributeDescriptor, Dataset, FiberRecord};
    use alloc::vec;

    fn series(steps: &[&[f64]]) -> StudySeries {
        let ds = steps
            .iter()
            .enumerate()
            .map(|(t, vals)| {
                Dataset::new(
                    format!("s{t}"),
                    t as f64 * 100.0,
                    vec![AttributeDescriptor::new("D", "µm")],
                    vals.iter().map(|&v| FiberRecord::new(vec![v])).collect(),
                )
                .unwrap()
            })
            .collect();
        StudySeries::new("t", ds).unwrap()
    }

    fn counts_to_values(counts: &[usize]) -> Vec<f64> {
        // bin i covers [i, i+1) on edges 0..=B
        counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| core::iter::repeat_n(i as f64 + 0.5, c))
            .collect()
    }

    #[test]
    fn sign_rule_and_colors() {
        let a = counts_to_values(&[10, 20]);
        let mut b = counts_to_values(&[12, 18]);
        b.push(0.0);
        b.push(2.0);
        let mut a2 = a.clone();
        a2.push(0.0);
        a2.push(2.0);
        let s = series(&[&a2, &b]);
        let cols = SortedColumns::new(&s);
        let edges = [0.0, 1.0, 2.0];
        let l = build_chrono(&s, &cols, 0, &edges, &LayoutParams::default()).unwrap();
        // 0.0 lands in bin 0, 2.0 in the closed last bin, in both steps
        assert_eq!(l.stacks[0].bars[0].count, 11);
        let q0 = l.quad(0, 0).unwrap();
        let q1 = l.quad(0, 1).unwrap();
        assert_eq!((q0.delta, q0.class), (2, DeltaClass::Increase));
        assert_eq!((q1.delta, q1.class), (-2, DeltaClass::Decrease));
        assert_eq!(q0.class.color(), palette::CHRONO_INCREASE);
        assert_eq!(q1.class.color(), palette::CHRONO_DECREASE);
        assert_eq!(q0.opacity, 0.9);
    }

    #[test]
    fn unchanged_is_gray_and_zero_safe() {
        let v = counts_to_values(&[5, 5]);
        let s = series(&[&v, &v]);
        let cols = SortedColumns::new(&s);
        let l = build_chrono(&s, &cols, 0, &[0.5, 1.0, 1.5], &LayoutParams::default()).unwrap();
        assert!(l.quads.iter().all(|q| q.class == DeltaClass::Unchanged));
        assert!(l.quads.iter().all(|q| q.opacity == LayoutParams::default().chrono_alpha_min));
        assert_eq!(DeltaClass::Unchanged.color(), palette::CHRONO_UNCHANGED);
    }

    #[test]
    fn labels_and_stack_heights() {
        let s = series(&[&[5.2, 10.0, 24.64], &[6.0, 8.0, 9.0, 24.0]]);
        let cols = SortedColumns::new(&s);
        let edges = crate::stats::shared_binning(&cols, 0).unwrap();
        let p = LayoutParams::default();
        let l = build_chrono(&s, &cols, 0, &edges, &p).unwrap();
        assert_eq!(l.bin_labels.len(), edges.len() - 1);
        assert!(l.bin_labels[0].text.starts_with("5.20-"));
        assert!(l.bin_labels.last().unwrap().text.ends_with("-24.64"));
        assert_eq!(l.stacks[1].label, "100 N");
        assert_eq!(l.stacks[0].total(), 3);
        assert_eq!(l.stacks[1].total(), 4);
        let h1: f64 = l.stacks[1].bars.iter().map(|b| b.height).sum();
        assert!((h1 / l.unit_height - 4.0).abs() < 1e-9);
        let delta: i64 = l.quads.iter().map(|q| q.delta).sum();
        assert_eq!(delta, 1);
    }
}
