//! Seeded synthetic studies for tests, benchmarks and demos.
//!
//! Every `(step, attribute)` column draws from its own ChaCha8 stream of the
//! one seed, so output is bit-identical for a fixed seed and independent of
//! thread scheduling.

use marv_core::{AttributeDescriptor, DataError, Dataset, FiberRecord, GeometryBinding, StudySeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("attribute `{attribute}`, step {step}: {message}")]
    InvalidSampler {
        attribute: String,
        step: usize,
        message: String,
    },
    #[error("attribute `{attribute}` has {found} samplers for {expected} steps")]
    StepCount {
        attribute: String,
        found: usize,
        expected: usize,
    },
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampler {
    Normal { mean: f64, std_dev: f64 },
    Uniform { low: f64, high: f64 },
    Mixture { components: Vec<Component> },
    Constant { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub sampler: Sampler,
}

impl Sampler {
    pub fn normal(mean: f64, std_dev: f64) -> Self {
        Sampler::Normal { mean, std_dev }
    }

    pub fn uniform(low: f64, high: f64) -> Self {
        Sampler::Uniform { low, high }
    }

    pub fn mixture(components: impl IntoIterator<Item = (f64, Sampler)>) -> Self {
        Sampler::Mixture {
            components: components
                .into_iter()
                .map(|(weight, sampler)| Component { weight, sampler })
                .collect(),
        }
    }

    /// Same distribution moved by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        match self {
            Sampler::Normal { mean, std_dev } => Sampler::normal(mean + delta, *std_dev),
            Sampler::Uniform { low, high } => Sampler::uniform(low + delta, high + delta),
            Sampler::Mixture { components } => Sampler::Mixture {
                components: components
                    .iter()
                    .map(|c| Component {
                        weight: c.weight,
                        sampler: c.sampler.shifted(delta),
                    })
                    .collect(),
            },
            Sampler::Constant { value } => Sampler::Constant { value: value + delta },
        }
    }

    fn compile(&self) -> Result<Compiled, String> {
        Ok(match *self {
            Sampler::Normal { mean, std_dev } => {
                if !mean.is_finite() {
                    return Err(format!("mean {mean} is not finite"));
                }
                if !(std_dev >= 0.0 && std_dev.is_finite()) {
                    return Err(format!("standard deviation {std_dev} must be finite and non-negative"));
                }
                Compiled::Normal(Normal::new(mean, std_dev).map_err(|e| e.to_string())?)
            }
            Sampler::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return Err(format!("uniform bounds [{low}, {high}) must be finite with low < high"));
                }
                Compiled::Uniform(Uniform::new(low, high).map_err(|e| e.to_string())?)
            }
            Sampler::Constant { value } => {
                if !value.is_finite() {
                    return Err(format!("constant {value} is not finite"));
                }
                Compiled::Constant(value)
            }
            Sampler::Mixture { ref components } => {
                if components.is_empty() {
                    return Err("mixture has no components".into());
                }
                let mut cumulative = Vec::with_capacity(components.len());
                let mut total = 0.0;
                let mut parts = Vec::with_capacity(components.len());
                for c in components {
                    if !(c.weight > 0.0 && c.weight.is_finite()) {
                        return Err(format!("mixture weight {} must be positive", c.weight));
                    }
                    total += c.weight;
                    cumulative.push(total);
                    parts.push(c.sampler.compile()?);
                }
                Compiled::Mixture {
                    cumulative: cumulative.into_iter().map(|w| w / total).collect(),
                    parts,
                }
            }
        })
    }
}

enum Compiled {
    Normal(Normal<f64>),
    Uniform(Uniform<f64>),
    Constant(f64),
    Mixture { cumulative: Vec<f64>, parts: Vec<Compiled> },
}

impl Compiled {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Compiled::Normal(d) => d.sample(rng),
            Compiled::Uniform(d) => d.sample(rng),
            Compiled::Constant(v) => *v,
            Compiled::Mixture { cumulative, parts } => {
                let u: f64 = rng.random();
                let i = cumulative.partition_point(|&c| c <= u).min(parts.len() - 1);
                parts[i].sample(rng)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSpec {
    pub label: String,
    pub load_newtons: f64,
    pub records: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    #[serde(default)]
    pub unit: String,
    /// One sampler per time step.
    pub steps: Vec<Sampler>,
}

impl AttributeSpec {
    pub fn new(name: &str, unit: &str, steps: Vec<Sampler>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            steps,
        }
    }

    /// The same sampler at every step.
    pub fn constant_over(name: &str, unit: &str, sampler: Sampler, steps: usize) -> Self {
        Self::new(name, unit, vec![sampler; steps])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub steps: Vec<StepSpec>,
    pub attributes: Vec<AttributeSpec>,
}

impl GeneratorSpec {
    /// Steps labelled `step {i}` with the given loads and record counts.
    pub fn with_steps(name: &str, loads: &[f64], records: &[usize]) -> Self {
        assert_eq!(loads.len(), records.len());
        Self {
            name: name.into(),
            steps: loads
                .iter()
                .zip(records)
                .enumerate()
                .map(|(i, (&load_newtons, &records))| StepSpec {
                    label: format!("step {i}"),
                    load_newtons,
                    records,
                })
                .collect(),
            attributes: Vec::new(),
        }
    }

    pub fn attribute(mut self, a: AttributeSpec) -> Self {
        self.attributes.push(a);
        self
    }
}

fn stream(seed: u64, step: usize, column: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((step as u64) << 32) | column as u64);
    rng
}

fn compile_all(spec: &GeneratorSpec) -> Result<Vec<Vec<Compiled>>, SynthError> {
    spec.attributes
        .iter()
        .map(|a| {
            if a.steps.len() != spec.steps.len() {
                return Err(SynthError::StepCount {
                    attribute: a.name.clone(),
                    found: a.steps.len(),
                    expected: spec.steps.len(),
                });
            }
            a.steps
                .iter()
                .enumerate()
                .map(|(step, s)| {
                    s.compile().map_err(|message| SynthError::InvalidSampler {
                        attribute: a.name.clone(),
                        step,
                        message,
                    })
                })
                .collect()
        })
        .collect()
}

fn assemble(label: &str, load: f64, attributes: Vec<AttributeDescriptor>, columns: Vec<Vec<f64>>, n: usize) -> Result<Dataset, DataError> {
    let records = (0..n)
        .map(|i| FiberRecord::new(columns.iter().map(|c| c[i]).collect()))
        .collect();
    Dataset::new(label, load, attributes, records)
}

/// Draws a study from `spec`.
pub fn generate_synthetic(spec: &GeneratorSpec, seed: u64) -> Result<StudySeries, SynthError> {
    let compiled = compile_all(spec)?;
    let attributes: Vec<AttributeDescriptor> = spec
        .attributes
        .iter()
        .map(|a| AttributeDescriptor::new(a.name.clone(), a.unit.clone()))
        .collect();
    let steps = spec
        .steps
        .par_iter()
        .enumerate()
        .map(|(t, st)| {
            let columns = compiled
                .iter()
                .enumerate()
                .map(|(a, per_step)| {
                    let mut rng = stream(seed, t, a);
                    (0..st.records).map(|_| per_step[t].sample(&mut rng)).collect()
                })
                .collect();
            assemble(&st.label, st.load_newtons, attributes.clone(), columns, st.records)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StudySeries::new(spec.name.clone(), steps)?)
}

/// Extent of the synthetic specimen cube, µm.
pub const SPECIMEN_SIZE: f64 = 1000.0;

/// Like [`generate_synthetic`], with the seven geometry columns of
/// [`GeometryBinding::standard`] prepended. Start points are uniform in the
/// specimen cube, directions uniform on the sphere and lengths ~N(250, 60)
/// µm, at least 20 µm. A spec attribute named `Diameter` replaces the
/// default N(13, 2.5) µm diameter; diameters are clamped to at least 1 µm.
pub fn generate_fiber_study(spec: &GeneratorSpec, seed: u64) -> Result<StudySeries, SynthError> {
    let binding = GeometryBinding::standard();
    let custom_diameter = spec.attributes.iter().position(|a| a.name == binding.diameter);
    let mut full = spec.clone();
    let diameter = match custom_diameter {
        Some(i) => full.attributes.remove(i),
        None => AttributeSpec::constant_over(&binding.diameter, "µm", Sampler::normal(13.0, 2.5), spec.steps.len()),
    };
    let extras = compile_all(&full)?;
    let diameter_samplers = compile_all(&GeneratorSpec {
        name: String::new(),
        steps: spec.steps.clone(),
        attributes: vec![diameter.clone()],
    })?
    .remove(0);

    let mut attributes: Vec<AttributeDescriptor> = binding.names()[..6]
        .iter()
        .map(|n| AttributeDescriptor::new(*n, "µm"))
        .collect();
    attributes.push(AttributeDescriptor::new(binding.diameter.clone(), diameter.unit.clone()));
    attributes.extend(full.attributes.iter().map(|a| AttributeDescriptor::new(a.name.clone(), a.unit.clone())));

    let geometry_stream = spec.attributes.len() + 1;
    let steps = spec
        .steps
        .par_iter()
        .enumerate()
        .map(|(t, st)| {
            let n = st.records;
            let mut rng = stream(seed, t, geometry_stream);
            let mut geo = vec![Vec::with_capacity(n); 6];
            let pos = Uniform::new(0.0, SPECIMEN_SIZE).expect("valid bounds");
            let len = Normal::new(250.0f64, 60.0).expect("valid normal");
            for _ in 0..n {
                let start: [f64; 3] = std::array::from_fn(|_| pos.sample(&mut rng));
                let dir: [f64; 3] = UnitSphere.sample(&mut rng);
                let l = len.sample(&mut rng).max(20.0);
                for k in 0..3 {
                    geo[k].push(start[k]);
                    geo[3 + k].push(start[k] + l * dir[k]);
                }
            }
            let mut drng = stream(seed, t, geometry_stream + 1);
            let mut columns = geo;
            columns.push((0..n).map(|_| diameter_samplers[t].sample(&mut drng).max(1.0)).collect());
            for (a, per_step) in extras.iter().enumerate() {
                let mut rng = stream(seed, t, a);
                columns.push((0..n).map(|_| per_step[t].sample(&mut rng)).collect());
            }
            assemble(&st.label, st.load_newtons, attributes.clone(), columns, n)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StudySeries::new(spec.name.clone(), steps)?)
}

/// Loads of the eight-step demo study, N.
pub const DEMO_LOADS: [f64; 8] = [0.0, 132.0, 228.0, 276.0, 316.0, 352.0, 380.0, 404.0];

/// Eight-step tensile-test-like study with geometry, `attributes` extra
/// attributes (at least the named ones below) and `records` fibers per step.
///
/// Named attributes: `Diameter` drifts slowly, `CurvedLength` shifts between
/// steps 1 and 2, `Phi` is bimodal, `Theta` is uniform. Further attributes
/// are `Attr{i}` normal columns with small per-step jitter.
pub fn demo_spec(records: usize, attributes: usize) -> GeneratorSpec {
    let steps = DEMO_LOADS.len();
    let counts: Vec<usize> = (0..steps).map(|t| records - (t * records / 100).min(records / 2)).collect();
    let mut spec = GeneratorSpec::with_steps("synthetic tensile test", &DEMO_LOADS, &counts)
        .attribute(AttributeSpec::new(
            "Diameter",
            "µm",
            (0..steps).map(|t| Sampler::normal(13.0 - 0.1 * t as f64, 2.5)).collect(),
        ))
        .attribute(AttributeSpec::new(
            "CurvedLength",
            "µm",
            (0..steps)
                .map(|t| Sampler::normal(if t >= 2 { 200.0 } else { 260.0 }, 60.0))
                .collect(),
        ))
        .attribute(AttributeSpec::constant_over(
            "Phi",
            "°",
            Sampler::mixture([(0.5, Sampler::normal(30.0, 8.0)), (0.5, Sampler::normal(120.0, 8.0))]),
            steps,
        ))
        .attribute(AttributeSpec::constant_over("Theta", "°", Sampler::uniform(0.0, 90.0), steps));
    for i in spec.attributes.len()..attributes.saturating_sub(6) {
        let base = 10.0 * (i + 1) as f64;
        spec = spec.attribute(AttributeSpec::new(
            &format!("Attr{i}"),
            "",
            (0..steps).map(|t| Sampler::normal(base + 0.01 * t as f64, 1.0 + i as f64 * 0.1)).collect(),
        ));
    }
    spec
}
