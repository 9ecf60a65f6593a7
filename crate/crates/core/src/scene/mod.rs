//! Retained-mode scene graph shared by the engine and every viewer.
//!
//! Nodes are addressed by stable string ids. Interaction responses are
//! [`ScenePatch`]es computed by [`diff_scenes`] and replayed by
//! [`apply_patch`]. Sibling order is canonical (ascending id), so two scenes
//! with the same nodes compare equal however they were assembled.

mod build;
mod diff;

pub use build::*;
pub use diff::{apply_patch, diff_scenes, AddedNode, ScenePatch};

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::palette::Rgba;

/// Schema tag carried by serialized scene documents.
pub const SCENE_SCHEMA: &str = "marv-scene/1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),
    #[error("node `{0}` is a handle without pick metadata")]
    HandleNotPickable(String),
    #[error("node `{id}` of kind {kind:?} lacks {what}")]
    MissingPayload {
        id: String,
        kind: NodeKind,
        what: &'static str,
    },
    #[error("patch references unknown node `{0}`")]
    UnknownNode(String),
    #[error("patch adds node `{id}` under unknown parent `{parent}`")]
    UnknownParent { id: String, parent: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Box,
    Cube,
    Quad,
    Line,
    Label,
    Handle,
    Cylinder,
}

/// Position, unit-quaternion rotation `[x, y, z, w]` and per-axis scale,
/// relative to the parent node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transform {
    pub position: [f64; 3],
    pub rotation: [f64; 4],
    pub scale: [f64; 3],
}

impl Default for Transform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Transform {
    pub const IDENTITY: Transform = Transform {
        position: [0.0; 3],
        rotation: [0.0, 0.0, 0.0, 1.0],
        scale: [1.0; 3],
    };

    pub fn at(position: [f64; 3]) -> Self {
        Self {
            position,
            ..Self::IDENTITY
        }
    }

    pub fn with_scale(mut self, scale: [f64; 3]) -> Self {
        self.scale = scale;
        self
    }
}

/// Explicit geometry for nodes whose shape is not a transformed unit primitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Geometry {
    /// Cylinder or line from `start` to `end`.
    Segment {
        start: [f64; 3],
        end: [f64; 3],
        radius: f64,
    },
    /// Planar quad, corners in winding order.
    Quad { corners: [[f64; 3]; 4] },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelText {
    pub text: String,
    #[serde(default)]
    pub unit: String,
}

/// What a pick on a node means. Every variant carries all keys its
/// semantic needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "semantic", rename_all = "snake_case")]
pub enum PickInfo {
    AttributeColumn {
        chart_id: String,
        attribute: String,
    },
    SkCell {
        chart_id: String,
        col: u8,
        row: u8,
    },
    /// Area between `bin_index` at step `time_pair` and at `time_pair + 1`.
    ChronoQuad {
        chart_id: String,
        attribute: String,
        bin_index: usize,
        time_pair: usize,
    },
    ChronoBin {
        chart_id: String,
        attribute: String,
        bin_index: usize,
        time_step: usize,
    },
    TetCube {
        chart_id: String,
        attribute: String,
        time_step: usize,
    },
    GridItem {
        time_step: usize,
    },
    ChartHandle {
        chart_id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneNode {
    pub id: String,
    pub kind: NodeKind,
    #[serde(default)]
    pub transform: Transform,
    pub color: Rgba,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pick: Option<PickInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<LabelText>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<SceneNode>,
}

impl SceneNode {
    pub fn new(id: impl Into<String>, kind: NodeKind, color: Rgba) -> Self {
        Self {
            id: id.into(),
            kind,
            transform: Transform::IDENTITY,
            color,
            pick: None,
            geometry: None,
            label: None,
            children: Vec::new(),
        }
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    pub fn with_pick(mut self, pick: PickInfo) -> Self {
        self.pick = Some(pick);
        self
    }

    pub fn with_geometry(mut self, geometry: Geometry) -> Self {
        self.geometry = Some(geometry);
        self
    }

    pub fn with_label(mut self, text: impl Into<String>, unit: impl Into<String>) -> Self {
        self.label = Some(LabelText {
            text: text.into(),
            unit: unit.into(),
        });
        self
    }

    pub fn with_children(mut self, children: Vec<SceneNode>) -> Self {
        self.children = children;
        self
    }

    /// Equality ignoring children, color and transform.
    pub(crate) fn same_identity(&self, other: &SceneNode) -> bool {
        self.kind == other.kind && self.pick == other.pick && self.geometry == other.geometry && self.label == other.label
    }

    fn canonicalize(&mut self) {
        self.children.sort_by(|a, b| a.id.cmp(&b.id));
        for c in &mut self.children {
            c.canonicalize();
        }
    }

    fn check(&self) -> Result<(), SceneError> {
        let missing = |what| SceneError::MissingPayload {
            id: self.id.clone(),
            kind: self.kind,
            what,
        };
        match self.kind {
            NodeKind::Handle if self.pick.is_none() => return Err(SceneError::HandleNotPickable(self.id.clone())),
            NodeKind::Label if self.label.is_none() => return Err(missing("label text")),
            NodeKind::Line | NodeKind::Cylinder if !matches!(self.geometry, Some(Geometry::Segment { .. })) => {
                return Err(missing("segment geometry"))
            }
            NodeKind::Quad if !matches!(self.geometry, Some(Geometry::Quad { .. })) => {
                return Err(missing("quad geometry"))
            }
            _ => {}
        }
        Ok(())
    }
}

/// A whole scene: a forest of nodes in canonical order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scene {
    pub nodes: Vec<SceneNode>,
}

impl Scene {
    /// Canonicalizes sibling order and validates the result.
    pub fn new(mut nodes: Vec<SceneNode>) -> Result<Self, SceneError> {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        for n in &mut nodes {
            n.canonicalize();
        }
        let scene = Self { nodes };
        scene.validate()?;
        Ok(scene)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Unique ids, pickable handles, complete kind payloads.
    pub fn validate(&self) -> Result<(), SceneError> {
        let mut ids = BTreeSet::new();
        let mut stack: Vec<&SceneNode> = self.nodes.iter().collect();
        while let Some(n) = stack.pop() {
            if !ids.insert(n.id.as_str()) {
                return Err(SceneError::DuplicateId(n.id.clone()));
            }
            n.check()?;
            stack.extend(n.children.iter());
        }
        Ok(())
    }

    /// Depth-first pre-order walk.
    pub fn walk(&self) -> impl Iterator<Item = &SceneNode> {
        let mut stack: Vec<&SceneNode> = self.nodes.iter().rev().collect();
        core::iter::from_fn(move || {
            let n = stack.pop()?;
            stack.extend(n.children.iter().rev());
            Some(n)
        })
    }

    pub fn find(&self, id: &str) -> Option<&SceneNode> {
        self.walk().find(|n| n.id == id)
    }

    pub fn node_count(&self) -> usize {
        self.walk().count()
    }

    pub(crate) fn canonicalize(&mut self) {
        self.nodes.sort_by(|a, b| a.id.cmp(&b.id));
        for n in &mut self.nodes {
            n.canonicalize();
        }
    }
}
