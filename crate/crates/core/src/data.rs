//! In-memory fiber tables.
//!
//! A [`Dataset`] is one time step: a table with one [`FiberRecord`] per
//! segmented fiber. A [`StudySeries`] is the ordered list of time steps of
//! one experiment. Fiber identity is never assumed across steps; every
//! cross-step comparison in this crate works on distributions.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("dataset `{label}` has no records")]
    NoRecords { label: String },
    #[error("dataset `{label}` declares attribute `{name}` more than once")]
    DuplicateAttribute { label: String, name: String },
    #[error("dataset `{label}` record {row} has {found} values, expected {expected}")]
    RaggedRecord {
        label: String,
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("dataset `{label}` record {row} column `{column}` is not finite")]
    NonFinite {
        label: String,
        row: usize,
        column: String,
    },
    #[error("negative load {load} in dataset `{label}`")]
    NegativeLoad { label: String, load: f64 },
    #[error("study has no time steps")]
    NoTimeSteps,
    #[error("time step {step} (`{label}`): {detail}")]
    AttributeMismatch {
        step: usize,
        label: String,
        detail: String,
    },
    #[error("geometry binding references unknown attribute `{name}`")]
    MissingBindingAttribute { name: String },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
}

/// Attribute column header. The unit is an opaque label used for axis text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AttributeDescriptor {
    pub name: String,
    #[serde(default)]
    pub unit: String,
}

impl AttributeDescriptor {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

/// One fiber's attribute row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberRecord {
    pub values: Vec<f64>,
}

impl FiberRecord {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }
}

/// One time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    label: String,
    load_newtons: f64,
    attributes: Vec<AttributeDescriptor>,
    records: Vec<FiberRecord>,
}

impl Dataset {
    /// Builds a validated dataset: unique attribute names, at least one
    /// record, every record full width and finite.
    pub fn new(
        label: impl Into<String>,
        load_newtons: f64,
        attributes: Vec<AttributeDescriptor>,
        records: Vec<FiberRecord>,
    ) -> Result<Self, DataError> {
        let label = label.into();
        if !load_newtons.is_finite() || load_newtons < 0.0 {
            return Err(DataError::NegativeLoad {
                label,
                load: load_newtons,
            });
        }
        let mut seen = BTreeSet::new();
        for attr in &attributes {
            if !seen.insert(attr.name.as_str()) {
                return Err(DataError::DuplicateAttribute {
                    label,
                    name: attr.name.clone(),
                });
            }
        }
        if records.is_empty() {
            return Err(DataError::NoRecords { label });
        }
        for (row, record) in records.iter().enumerate() {
            if record.values.len() != attributes.len() {
                return Err(DataError::RaggedRecord {
                    label,
                    row,
                    found: record.values.len(),
                    expected: attributes.len(),
                });
            }
            if let Some(col) = record.values.iter().position(|v| !v.is_finite()) {
                return Err(DataError::NonFinite {
                    label,
                    row,
                    column: attributes[col].name.clone(),
                });
            }
        }
        Ok(Self {
            label,
            load_newtons,
            attributes,
            records,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn load_newtons(&self) -> f64 {
        self.load_newtons
    }

    pub fn attributes(&self) -> &[AttributeDescriptor] {
        &self.attributes
    }

    pub fn records(&self) -> &[FiberRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// Values of one attribute in record order.
    pub fn column(&self, attribute: usize) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.records.iter().map(move |r| r.values[attribute])
    }

    pub fn column_vec(&self, attribute: usize) -> Vec<f64> {
        self.column(attribute).collect()
    }
}

/// The ordered time steps of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySeries {
    name: String,
    time_steps: Vec<Dataset>,
}

impl StudySeries {
    /// Time-step order is the order given here; loads may repeat.
    pub fn new(name: impl Into<String>, time_steps: Vec<Dataset>) -> Result<Self, DataError> {
        let Some(first) = time_steps.first() else {
            return Err(DataError::NoTimeSteps);
        };
        for (step, ds) in time_steps.iter().enumerate().skip(1) {
            if let Some(detail) = attribute_list_mismatch(first.attributes(), ds.attributes()) {
                return Err(DataError::AttributeMismatch {
                    step,
                    label: ds.label.clone(),
                    detail,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            time_steps,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn time_steps(&self) -> &[Dataset] {
        &self.time_steps
    }

    pub fn step(&self, index: usize) -> Option<&Dataset> {
        self.time_steps.get(index)
    }

    pub fn len(&self) -> usize {
        self.time_steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_steps.is_empty()
    }

    pub fn attributes(&self) -> &[AttributeDescriptor] {
        self.time_steps[0].attributes()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes().len()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.time_steps[0].attribute_index(name)
    }

    pub fn require_attribute(&self, name: &str) -> Result<usize, DataError> {
        self.attribute_index(name)
            .ok_or_else(|| DataError::UnknownAttribute(name.into()))
    }

    /// Global `(min, max)` of one attribute over every time step.
    pub fn attribute_range(&self, attribute: usize) -> (f64, f64) {
        self.time_steps
            .iter()
            .flat_map(|ds| ds.column(attribute))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn record_counts(&self) -> Vec<usize> {
        self.time_steps.iter().map(Dataset::len).collect()
    }
}

/// Describes how `found` deviates from `expected`, or `None` when identical.
pub fn attribute_list_mismatch(
    expected: &[AttributeDescriptor],
    found: &[AttributeDescriptor],
) -> Option<String> {
    use alloc::format;
    for attr in expected {
        match found.iter().find(|f| f.name == attr.name) {
            None => return Some(format!("missing column `{}`", attr.name)),
            Some(f) if f.unit != attr.unit => {
                return Some(format!(
                    "column `{}` has unit `{}`, expected `{}`",
                    attr.name, f.unit, attr.unit
                ))
            }
            _ => {}
        }
    }
    if let Some(extra) = found.iter().find(|f| !expected.iter().any(|e| e.name == f.name)) {
        return Some(format!("unexpected column `{}`", extra.name));
    }
    if expected != found {
        return Some(String::from("columns are in a different order"));
    }
    None
}

/// Column names carrying fiber endpoints (µm) and diameter (µm).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryBinding {
    pub start_x: String,
    pub start_y: String,
    pub start_z: String,
    pub end_x: String,
    pub end_y: String,
    pub end_z: String,
    pub diameter: String,
}

/// Attribute indices resolved from a [`GeometryBinding`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeometryColumns {
    pub start: [usize; 3],
    pub end: [usize; 3],
    pub diameter: usize,
}

impl GeometryBinding {
    /// The column names used by the fiber characterization exports.
    pub fn standard() -> Self {
        Self {
            start_x: "RealX1".into(),
            start_y: "RealY1".into(),
            start_z: "RealZ1".into(),
            end_x: "RealX2".into(),
            end_y: "RealY2".into(),
            end_z: "RealZ2".into(),
            diameter: "Diameter".into(),
        }
    }

    pub fn names(&self) -> [&str; 7] {
        [
            &self.start_x,
            &self.start_y,
            &self.start_z,
            &self.end_x,
            &self.end_y,
            &self.end_z,
            &self.diameter,
        ]
    }

    pub fn resolve(&self, attributes: &[AttributeDescriptor]) -> Result<GeometryColumns, DataError> {
        let find = |name: &str| {
            attributes
                .iter()
                .position(|a| a.name == name)
                .ok_or_else(|| DataError::MissingBindingAttribute { name: name.into() })
        };
        Ok(GeometryColumns {
            start: [find(&self.start_x)?, find(&self.start_y)?, find(&self.start_z)?],
            end: [find(&self.end_x)?, find(&self.end_y)?, find(&self.end_z)?],
            diameter: find(&self.diameter)?,
        })
    }

    /// Checks that every referenced column exists in every time step.
    pub fn validate(&self, series: &StudySeries) -> Result<GeometryColumns, DataError> {
        let mut cols = None;
        for ds in series.time_steps() {
            cols = Some(self.resolve(ds.attributes())?);
        }
        cols.ok_or(DataError::NoTimeSteps)
    }
}
