#![allow(dead_code)]

use marv::synth::{demo_spec, generate_fiber_study, AttributeSpec, GeneratorSpec, Sampler};
use marv_core::session::{Session, SessionConfig};
use marv_core::{GeometryBinding, StudySeries};

/// Eight demo steps with `records` fibers at the first step and 12 attributes.
pub fn demo_series(records: usize, seed: u64) -> StudySeries {
    generate_fiber_study(&demo_spec(records, 12), seed).unwrap()
}

pub fn demo_session(records: usize, seed: u64) -> Session {
    Session::open(demo_series(records, seed), &GeometryBinding::standard(), SessionConfig::default()).unwrap()
}

pub fn single_step_session(records: usize) -> Session {
    let spec = GeneratorSpec::with_steps("single scan", &[0.0], &[records])
        .attribute(AttributeSpec::constant_over("Length", "µm", Sampler::normal(200.0, 30.0), 1))
        .attribute(AttributeSpec::constant_over("Phi", "°", Sampler::uniform(0.0, 90.0), 1));
    let series = generate_fiber_study(&spec, 5).unwrap();
    Session::open(series, &GeometryBinding::standard(), SessionConfig::default()).unwrap()
}

pub mod scenes {
    use marv::codec::round_sig6;
    use marv_core::scene::{Geometry, NodeKind, PickInfo, Scene, SceneNode, Transform};
    use marv_core::Rgba;
    use rand::seq::SliceRandom;
    use rand::Rng;

    const KINDS: [NodeKind; 7] = [
        NodeKind::Box,
        NodeKind::Cube,
        NodeKind::Quad,
        NodeKind::Line,
        NodeKind::Label,
        NodeKind::Handle,
        NodeKind::Cylinder,
    ];

    fn real(rng: &mut impl Rng, rounded: bool) -> f64 {
        let x = match rng.random_range(0..10) {
            0 => 0.0,
            1 => -0.0,
            2 => rng.random_range(-1e-7..1e-7),
            3 => rng.random_range(-1e6..1e6),
            _ => rng.random_range(-2.0..2.0),
        };
        if rounded {
            round_sig6(x)
        } else {
            x
        }
    }

    fn vec3(rng: &mut impl Rng, rounded: bool) -> [f64; 3] {
        std::array::from_fn(|_| real(rng, rounded))
    }

    pub fn transform(rng: &mut impl Rng, rounded: bool) -> Transform {
        if rng.random_bool(0.3) {
            return Transform::IDENTITY;
        }
        Transform {
            position: vec3(rng, rounded),
            rotation: std::array::from_fn(|_| real(rng, rounded)),
            scale: vec3(rng, rounded),
        }
    }

    pub fn color(rng: &mut impl Rng) -> Rgba {
        Rgba(rng.random())
    }

    fn pick(rng: &mut impl Rng) -> PickInfo {
        let chart_id = format!("c{}", rng.random_range(0..3));
        let attribute = ["Diameter", "Phi", "Länge µm", "a\"b"][rng.random_range(0..4)].to_string();
        match rng.random_range(0..7) {
            0 => PickInfo::AttributeColumn { chart_id, attribute },
            1 => PickInfo::SkCell {
                chart_id,
                col: rng.random_range(0..3),
                row: rng.random_range(0..3),
            },
            2 => PickInfo::ChronoQuad {
                chart_id,
                attribute,
                bin_index: rng.random_range(0..16),
                time_pair: rng.random_range(0..7),
            },
            3 => PickInfo::ChronoBin {
                chart_id,
                attribute,
                bin_index: rng.random_range(0..16),
                time_step: rng.random_range(0..8),
            },
            4 => PickInfo::TetCube {
                chart_id,
                attribute,
                time_step: rng.random_range(0..8),
            },
            5 => PickInfo::GridItem {
                time_step: rng.random_range(0..8),
            },
            _ => PickInfo::ChartHandle { chart_id },
        }
    }

    /// A single node satisfying its kind's payload rules, without children.
    pub fn node(rng: &mut impl Rng, id: String, rounded: bool) -> SceneNode {
        let kind = KINDS[rng.random_range(0..KINDS.len())];
        let mut n = SceneNode::new(id, kind, color(rng)).with_transform(transform(rng, rounded));
        match kind {
            NodeKind::Line | NodeKind::Cylinder => {
                n = n.with_geometry(Geometry::Segment {
                    start: vec3(rng, rounded),
                    end: vec3(rng, rounded),
                    radius: real(rng, rounded).abs(),
                })
            }
            NodeKind::Quad => {
                n = n.with_geometry(Geometry::Quad {
                    corners: std::array::from_fn(|_| vec3(rng, rounded)),
                })
            }
            NodeKind::Label => n = n.with_label(format!("t{}", rng.random_range(0..100)), ["", "µm", "°"][rng.random_range(0..3)]),
            _ => {}
        }
        if kind == NodeKind::Handle || rng.random_bool(0.4) {
            n = n.with_pick(pick(rng));
        }
        n
    }

    /// A random forest of up to `max_nodes` nodes with unique ids.
    pub fn scene(rng: &mut impl Rng, max_nodes: usize, rounded: bool) -> Scene {
        let count = rng.random_range(0..=max_nodes);
        let mut ids: Vec<usize> = (0..count * 2).collect();
        ids.shuffle(rng);
        let mut flat: Vec<(Option<usize>, SceneNode)> = Vec::with_capacity(count);
        for (i, &idn) in ids.iter().take(count).enumerate() {
            let parent = if i > 0 && rng.random_bool(0.6) { Some(rng.random_range(0..i)) } else { None };
            flat.push((parent, node(rng, format!("n{idn}"), rounded)));
        }
        Scene::new(assemble(flat)).unwrap()
    }

    fn assemble(mut flat: Vec<(Option<usize>, SceneNode)>) -> Vec<SceneNode> {
        // Children always come after their parent, so fold from the back.
        let mut roots = Vec::new();
        while let Some((parent, n)) = flat.pop() {
            match parent {
                Some(p) => flat[p].1.children.push(n),
                None => roots.push(n),
            }
        }
        roots
    }

    /// A random edit of `s`: drops, recolors, moves, re-kinds and adds nodes.
    pub fn mutate(rng: &mut impl Rng, s: &Scene, rounded: bool) -> Scene {
        fn edit(rng: &mut impl Rng, nodes: &[SceneNode], rounded: bool, fresh: &mut usize) -> Vec<SceneNode> {
            let mut out = Vec::new();
            for n in nodes {
                let r: f64 = rng.random();
                if r < 0.1 {
                    continue;
                }
                let mut m = if r < 0.15 {
                    let mut re = node(rng, n.id.clone(), rounded);
                    re.children = n.children.clone();
                    re
                } else {
                    n.clone()
                };
                if rng.random_bool(0.2) {
                    m.color = color(rng);
                }
                if rng.random_bool(0.2) {
                    m.transform = transform(rng, rounded);
                }
                m.children = edit(rng, &m.children, rounded, fresh);
                if rng.random_bool(0.1) {
                    *fresh += 1;
                    m.children.push(node(rng, format!("new{fresh}"), rounded));
                }
                out.push(m);
            }
            if rng.random_bool(0.2) {
                *fresh += 1;
                out.push(node(rng, format!("new{fresh}"), rounded));
            }
            out
        }
        let mut fresh = 0;
        Scene::new(edit(rng, &s.nodes, rounded, &mut fresh)).unwrap()
    }
}
