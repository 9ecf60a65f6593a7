//! Scene node builders for every chart and spatial view.
//!
//! Node ids:
//!
//! | node | id |
//! |---|---|
//! | chart root (handle) | `{chart}` e.g. `mdd`, `chrono:Diameter` |
//! | MDD glyph | `{chart}/glyph/{a}/{t}` |
//! | TET cube / link | `{chart}/cube/{a}/{t}`, `{chart}/link/{a}/{t}` |
//! | SK Mapper cell | `{chart}/sk/{col}/{row}` |
//! | Chrono bar / quad | `{chart}/bin/{t}/{i}`, `{chart}/quad/{t}/{i}` |
//! | labels | `{chart}/xlabel/{a}`, `{chart}/zlabel/{i}`, `{chart}/binlabel/{i}`, `{chart}/steplabel/{t}`, ... |
//! | fiber view (handle) | `view/{t}` |
//! | fiber | `view/{t}/fiber/{i}` |
//!
//! Transforms are relative to the parent. A node's scale sizes its own
//! primitive and is not inherited by its children.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Geometry, NodeKind, PickInfo, SceneNode, Transform};
use crate::charts::{ChronoLayout, LayoutParams, MddLayout, TetLayout};
use crate::data::AttributeDescriptor;
use crate::palette::{self, Rgba};
use crate::skmapper::{widget_cell_color, SkCell, SkMapperState};
use crate::spatial::{FiberCylinder, HighlightSet};

/// Placement of charts and fiber views in the shared space, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneParams {
    pub chart_anchor: [f64; 3],
    /// Offset between successive Chrono Bins charts, the first one included.
    pub chrono_offset: [f64; 3],
    pub grid_origin: [f64; 3],
    pub grid_spacing: f64,
    /// Largest extent of one fiber view.
    pub view_size: f64,
    pub handle_size: f64,
    pub sk_cell_size: f64,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            chart_anchor: [0.0, 0.0, 0.0],
            chrono_offset: [1.6, 0.0, 0.0],
            grid_origin: [0.5, 0.5, -2.0],
            grid_spacing: 0.9,
            view_size: 0.7,
            handle_size: 0.04,
            sk_cell_size: 0.06,
        }
    }
}

impl SceneParams {
    pub fn chrono_anchor(&self, slot: usize) -> Transform {
        let k = (slot + 1) as f64;
        Transform::at(core::array::from_fn(|i| self.chart_anchor[i] + k * self.chrono_offset[i]))
    }
}

pub fn fiber_node_id(step: usize, fiber: usize) -> String {
    format!("view/{step}/fiber/{fiber}")
}

pub fn view_node_id(step: usize) -> String {
    format!("view/{step}")
}

pub fn chrono_chart_id(attribute: &str) -> String {
    format!("chrono:{attribute}")
}

fn label(id: String, text: impl Into<String>, unit: impl Into<String>, position: [f64; 3], size: f64) -> SceneNode {
    SceneNode::new(id, NodeKind::Label, palette::LABEL)
        .with_transform(Transform::at(position).with_scale([size; 3]))
        .with_label(text, unit)
}

fn chart_root(chart_id: &str, anchor: Transform, size: f64, children: Vec<SceneNode>) -> SceneNode {
    let mut t = anchor;
    t.scale = [size; 3];
    SceneNode::new(chart_id, NodeKind::Handle, palette::HANDLE)
        .with_transform(t)
        .with_pick(PickInfo::ChartHandle { chart_id: chart_id.into() })
        .with_children(children)
}

fn x_labels(chart_id: &str, attributes: &[AttributeDescriptor], p: &LayoutParams) -> Vec<SceneNode> {
    let n = attributes.len();
    attributes
        .iter()
        .enumerate()
        .map(|(a, attr)| {
            let pos = [p.slot_x(a, n), -0.05, 0.0];
            label(format!("{chart_id}/xlabel/{a}"), attr.name.clone(), attr.unit.clone(), pos, p.label_size)
        })
        .collect()
}

/// The 3x3 SK Mapper panel floating right of the chart.
pub fn sk_widget_nodes(chart_id: &str, sk: &SkMapperState, p: &LayoutParams, s: &SceneParams) -> Vec<SceneNode> {
    let x0 = p.chart_width + 0.1;
    let y0 = 0.3;
    let c = s.sk_cell_size;
    let mut out: Vec<SceneNode> = SkCell::all()
        .map(|cell| {
            let pos = [x0 + (f64::from(cell.col) + 0.5) * c, y0 + (f64::from(cell.row) + 0.5) * c, 0.0];
            SceneNode::new(format!("{chart_id}/sk/{}/{}", cell.col, cell.row), NodeKind::Box, widget_cell_color(cell, sk))
                .with_transform(Transform::at(pos).with_scale([c * 0.92, c * 0.92, 0.005]))
                .with_pick(PickInfo::SkCell {
                    chart_id: chart_id.into(),
                    col: cell.col,
                    row: cell.row,
                })
        })
        .collect();
    out.push(label(format!("{chart_id}/sk/skewness"), "Skewness", "", [x0 + 1.5 * c, y0 - 0.03, 0.0], p.label_size));
    out.push(label(format!("{chart_id}/sk/kurtosis"), "Kurtosis", "", [x0 - 0.03, y0 + 1.5 * c, 0.0], p.label_size));
    out
}

/// MDD chart: glyph boxes in the chart's x (attribute), y (value) and z
/// (modality or time step) axes, plus the SK Mapper panel.
pub fn mdd_chart_node(
    chart_id: &str,
    layout: &MddLayout,
    attributes: &[AttributeDescriptor],
    sk: &SkMapperState,
    p: &LayoutParams,
    s: &SceneParams,
    anchor: Transform,
) -> SceneNode {
    let n = attributes.len();
    let mut children = Vec::with_capacity(layout.glyphs.len() + n + layout.z_labels.len() + 12);
    for g in &layout.glyphs {
        let pos = [p.slot_x(g.attribute_index, n), g.center_y * p.chart_height, g.z_slot as f64 * p.z_spacing];
        children.push(
            SceneNode::new(format!("{chart_id}/glyph/{}/{}", g.attribute_index, g.time_step), NodeKind::Box, g.color)
                .with_transform(Transform::at(pos).with_scale([g.width, g.height * p.chart_height, g.width]))
                .with_pick(PickInfo::AttributeColumn {
                    chart_id: chart_id.into(),
                    attribute: attributes[g.attribute_index].name.clone(),
                }),
        );
    }
    children.extend(x_labels(chart_id, attributes, p));
    for (i, z) in layout.z_labels.iter().enumerate() {
        children.push(label(format!("{chart_id}/zlabel/{i}"), z.clone(), "", [-0.05, 0.0, i as f64 * p.z_spacing], p.label_size));
    }
    let depth = layout.z_labels.len().saturating_sub(1) as f64 * p.z_spacing;
    children.push(label(format!("{chart_id}/ztitle"), layout.z_title.clone(), "", [-0.12, 0.0, depth / 2.0], p.label_size));
    children.extend(sk_widget_nodes(chart_id, sk, p, s));
    chart_root(chart_id, anchor, s.handle_size, children)
}

/// TET chart. Seen from above, the MDD z-axis becomes the vertical, so the
/// layout's cube stacking axis maps onto the chart's z.
pub fn tet_chart_node(
    chart_id: &str,
    layout: &TetLayout,
    attributes: &[AttributeDescriptor],
    sk: &SkMapperState,
    p: &LayoutParams,
    s: &SceneParams,
    anchor: Transform,
) -> SceneNode {
    let n = attributes.len();
    let mut children = Vec::new();
    for col in &layout.columns {
        let a = col.attribute_index;
        let x = p.slot_x(a, n);
        let at = |t: usize| [x, 0.0, col.cube_y[t]];
        for t in 0..col.cube_y.len() {
            children.push(
                SceneNode::new(format!("{chart_id}/cube/{a}/{t}"), NodeKind::Cube, palette::TET_CUBE)
                    .with_transform(Transform::at(at(t)).with_scale([p.tet_cube; 3]))
                    .with_pick(PickInfo::TetCube {
                        chart_id: chart_id.into(),
                        attribute: attributes[a].name.clone(),
                        time_step: t,
                    }),
            );
        }
        for (t, link) in col.links.iter().enumerate() {
            children.push(
                SceneNode::new(format!("{chart_id}/link/{a}/{t}"), NodeKind::Line, link.color).with_geometry(Geometry::Segment {
                    start: at(t),
                    end: at(t + 1),
                    radius: link.thickness / 2.0,
                }),
            );
        }
    }
    children.extend(x_labels(chart_id, attributes, p));
    children.extend(sk_widget_nodes(chart_id, sk, p, s));
    chart_root(chart_id, anchor, s.handle_size, children)
}

/// Chrono Bins chart in its local x (time step) / y (count) plane.
pub fn chrono_chart_node(
    chart_id: &str,
    layout: &ChronoLayout,
    attribute: &AttributeDescriptor,
    p: &LayoutParams,
    s: &SceneParams,
    anchor: Transform,
) -> SceneNode {
    let bw = p.chrono_bar_width;
    let mut children = Vec::new();
    for stack in &layout.stacks {
        for bar in &stack.bars {
            children.push(
                SceneNode::new(format!("{chart_id}/bin/{}/{}", stack.step, bar.bin), NodeKind::Box, palette::CHRONO_BIN)
                    .with_transform(Transform::at([stack.x, bar.y0 + bar.height / 2.0, 0.0]).with_scale([bw, bar.height, bw]))
                    .with_pick(PickInfo::ChronoBin {
                        chart_id: chart_id.into(),
                        attribute: attribute.name.clone(),
                        bin_index: bar.bin,
                        time_step: stack.step,
                    }),
            );
        }
        children.push(label(
            format!("{chart_id}/steplabel/{}", stack.step),
            stack.label.clone(),
            "",
            [stack.x, -0.05, 0.0],
            p.label_size,
        ));
    }
    for q in &layout.quads {
        children.push(
            SceneNode::new(format!("{chart_id}/quad/{}/{}", q.pair, q.bin), NodeKind::Quad, q.class.color().with_opacity(q.opacity))
                .with_geometry(Geometry::Quad {
                    corners: q.corners.map(|[x, y]| [x, y, 0.0]),
                })
                .with_pick(PickInfo::ChronoQuad {
                    chart_id: chart_id.into(),
                    attribute: attribute.name.clone(),
                    bin_index: q.bin,
                    time_pair: q.pair,
                }),
        );
    }
    for b in &layout.bin_labels {
        children.push(label(format!("{chart_id}/binlabel/{}", b.bin), b.text.clone(), layout.unit.clone(), [b.x, b.y, 0.0], p.label_size));
    }
    let top = layout
        .stacks
        .iter()
        .filter_map(|st| st.bars.last().map(|b| b.y0 + b.height))
        .fold(0.0, f64::max);
    children.push(label(format!("{chart_id}/title"), attribute.name.clone(), attribute.unit.clone(), [0.0, top + 0.06, 0.0], p.label_size));
    chart_root(chart_id, anchor, s.handle_size, children)
}

/// Maps fiber coordinates (attribute units) into a view of `view_size`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberFrame {
    pub center: [f64; 3],
    pub scale: f64,
}

impl FiberFrame {
    /// Common frame for all views, so the same length looks the same everywhere.
    pub fn fit<'a>(fibers: impl IntoIterator<Item = &'a FiberCylinder>, view_size: f64) -> Self {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for f in fibers {
            for p in [f.start, f.end] {
                for i in 0..3 {
                    lo[i] = lo[i].min(p[i]);
                    hi[i] = hi[i].max(p[i]);
                }
            }
        }
        if !lo[0].is_finite() {
            return Self { center: [0.0; 3], scale: 1.0 };
        }
        let extent = (0..3).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
        Self {
            center: core::array::from_fn(|i| (lo[i] + hi[i]) / 2.0),
            scale: if extent > 0.0 { view_size / extent } else { 1.0 },
        }
    }

    pub fn map(&self, p: [f64; 3]) -> [f64; 3] {
        core::array::from_fn(|i| (p[i] - self.center[i]) * self.scale)
    }
}

/// Fiber colors of one step: the default, overridden by every highlight
/// touching the step in list order. Unhighlighted fibers are dimmed when
/// `dim_others` is set and some highlight touches the step.
pub fn fiber_colors(step: usize, count: usize, highlights: &[&HighlightSet], dim_others: bool) -> Vec<Rgba> {
    let touching: Vec<_> = highlights
        .iter()
        .flat_map(|h| h.sides())
        .filter(|(s, _, _)| *s == step)
        .collect();
    let base = if dim_others && !touching.is_empty() {
        palette::FIBER_DEFAULT.with_alpha(palette::FIBER_DIM_ALPHA)
    } else {
        palette::FIBER_DEFAULT
    };
    let mut colors = alloc::vec![base; count];
    for (_, indices, role) in touching {
        for &i in indices {
            if let Some(c) = colors.get_mut(i) {
                *c = role.color();
            }
        }
    }
    colors
}

/// One spatial view: a handle at `anchor` carrying a label and one
/// cylinder per fiber.
pub fn fiber_view_node(
    step: usize,
    title: &str,
    fibers: &[FiberCylinder],
    colors: &[Rgba],
    frame: &FiberFrame,
    p: &LayoutParams,
    s: &SceneParams,
    anchor: Transform,
) -> SceneNode {
    let view = view_node_id(step);
    let mut children = Vec::with_capacity(fibers.len() + 1);
    children.push(label(format!("{view}/label"), title, "", [0.0, -s.view_size / 2.0 - 0.05, 0.0], p.label_size));
    for (f, &color) in fibers.iter().zip(colors) {
        children.push(
            SceneNode::new(fiber_node_id(step, f.fiber_index), NodeKind::Cylinder, color).with_geometry(Geometry::Segment {
                start: frame.map(f.start),
                end: frame.map(f.end),
                radius: f.radius * frame.scale,
            }),
        );
    }
    let mut t = anchor;
    t.scale = [s.handle_size; 3];
    SceneNode::new(view, NodeKind::Handle, palette::HANDLE)
        .with_transform(t)
        .with_pick(PickInfo::GridItem { time_step: step })
        .with_children(children)
}
