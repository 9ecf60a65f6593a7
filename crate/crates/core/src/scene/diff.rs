use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Scene, SceneError, SceneNode, Transform};
use crate::palette::Rgba;

/// A subtree inserted under `parent` (`None` for a root).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddedNode {
    pub parent: Option<String>,
    pub node: SceneNode,
}

/// Id-addressed delta between two scenes.
///
/// Applying removes the `removed` subtrees, inserts `added`, then sets the
/// `recolored` and `retransformed` attributes. A node whose kind, pick,
/// geometry, label or parent changes is removed and re-added.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenePatch {
    pub added: Vec<AddedNode>,
    pub removed: Vec<String>,
    pub recolored: BTreeMap<String, Rgba>,
    pub retransformed: BTreeMap<String, Transform>,
}

impl ScenePatch {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.recolored.is_empty() && self.retransformed.is_empty()
    }

    /// Number of entries across the four lists.
    pub fn len(&self) -> usize {
        self.added.len() + self.removed.len() + self.recolored.len() + self.retransformed.len()
    }
}

struct Entry<'a> {
    parent: Option<&'a str>,
    node: &'a SceneNode,
}

fn flatten(scene: &Scene) -> BTreeMap<&str, Entry<'_>> {
    let mut out = BTreeMap::new();
    let mut stack: Vec<(Option<&str>, &SceneNode)> = scene.nodes.iter().map(|n| (None, n)).collect();
    while let Some((parent, node)) = stack.pop() {
        out.insert(node.id.as_str(), Entry { parent, node });
        stack.extend(node.children.iter().map(|c| (Some(node.id.as_str()), c)));
    }
    out
}

/// Minimal id-based patch turning `old` into `new`.
pub fn diff_scenes(old: &Scene, new: &Scene) -> ScenePatch {
    let old_flat = flatten(old);
    let new_flat = flatten(new);

    // Old nodes that do not survive in place, with cascade to descendants.
    let mut gone: BTreeSet<&str> = BTreeSet::new();
    let mut removed = Vec::new();
    let mut stack: Vec<(&SceneNode, bool)> = old.nodes.iter().map(|n| (n, false)).collect();
    while let Some((node, parent_gone)) = stack.pop() {
        let id = node.id.as_str();
        let survives = !parent_gone
            && new_flat.get(id).is_some_and(|e| {
                e.parent == old_flat[id].parent && e.node.same_identity(node)
            });
        if !survives {
            gone.insert(id);
            if !parent_gone {
                removed.push(String::from(id));
            }
        }
        stack.extend(node.children.iter().map(|c| (c, !survives)));
    }

    let mut added = Vec::new();
    let mut recolored = BTreeMap::new();
    let mut retransformed = BTreeMap::new();
    // Descendants of an added node are never survivors, so each added
    // subtree is shipped whole.
    let mut stack: Vec<(Option<&str>, &SceneNode)> = new.nodes.iter().map(|n| (None, n)).collect();
    while let Some((parent, node)) = stack.pop() {
        let id = node.id.as_str();
        if !old_flat.contains_key(id) || gone.contains(id) {
            added.push(AddedNode {
                parent: parent.map(String::from),
                node: node.clone(),
            });
            continue;
        }
        let prior = old_flat[id].node;
        if prior.color != node.color {
            recolored.insert(String::from(id), node.color);
        }
        if prior.transform != node.transform {
            retransformed.insert(String::from(id), node.transform);
        }
        stack.extend(node.children.iter().map(|c| (Some(id), c)));
    }

    removed.sort();
    added.sort_by(|a, b| a.node.id.cmp(&b.node.id));
    ScenePatch {
        added,
        removed,
        recolored,
        retransformed,
    }
}

/// Applies `patch` to `scene`. Fails without partial effects when the patch
/// references ids the scene does not contain.
pub fn apply_patch(scene: &Scene, patch: &ScenePatch) -> Result<Scene, SceneError> {
    {
        let flat = flatten(scene);
        let known = patch
            .removed
            .iter()
            .chain(patch.recolored.keys())
            .chain(patch.retransformed.keys());
        for id in known {
            if !flat.contains_key(id.as_str()) {
                return Err(SceneError::UnknownNode(id.clone()));
            }
        }
    }

    let mut out = scene.clone();
    let removed: BTreeSet<&str> = patch.removed.iter().map(String::as_str).collect();
    if !removed.is_empty() {
        prune(&mut out.nodes, &removed);
    }

    let mut pending: BTreeMap<&str, Vec<SceneNode>> = BTreeMap::new();
    for a in &patch.added {
        match a.parent.as_deref() {
            None => out.nodes.push(a.node.clone()),
            Some(p) => pending.entry(p).or_default().push(a.node.clone()),
        }
    }
    while !pending.is_empty() {
        let before = pending.len();
        graft(&mut out.nodes, &mut pending);
        if pending.len() == before {
            let (parent, nodes) = pending.into_iter().next().expect("nonempty");
            return Err(SceneError::UnknownParent {
                id: nodes[0].id.clone(),
                parent: String::from(parent),
            });
        }
    }

    if !patch.recolored.is_empty() || !patch.retransformed.is_empty() {
        let mut stack: Vec<&mut SceneNode> = out.nodes.iter_mut().collect();
        while let Some(n) = stack.pop() {
            if let Some(c) = patch.recolored.get(&n.id) {
                n.color = *c;
            }
            if let Some(t) = patch.retransformed.get(&n.id) {
                n.transform = *t;
            }
            stack.extend(n.children.iter_mut());
        }
    }

    out.canonicalize();
    out.validate()?;
    Ok(out)
}

fn prune(nodes: &mut Vec<SceneNode>, removed: &BTreeSet<&str>) {
    nodes.retain(|n| !removed.contains(n.id.as_str()));
    for n in nodes {
        prune(&mut n.children, removed);
    }
}

fn graft(nodes: &mut [SceneNode], pending: &mut BTreeMap<&str, Vec<SceneNode>>) {
    for n in nodes {
        if pending.is_empty() {
            return;
        }
        if let Some(children) = pending.remove(n.id.as_str()) {
            n.children.extend(children);
        }
        graft(&mut n.children, pending);
    }
}
