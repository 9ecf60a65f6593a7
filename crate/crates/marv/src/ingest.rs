//! Study manifests and per-step fiber tables.
//!
//! A manifest is TOML:
//!
//! ```toml
//! name = "in-situ tensile test"
//!
//! [geometry_binding]
//! start_x = "RealX1"
//! start_y = "RealY1"
//! start_z = "RealZ1"
//! end_x = "RealX2"
//! end_y = "RealY2"
//! end_z = "RealZ2"
//! diameter = "Diameter"
//!
//! [[time_steps]]
//! label = "step 0"
//! load_newtons = 0.0
//! table_path = "step0.csv"
//! ```
//!
//! Table paths are relative to the manifest's directory. Tables are
//! delimiter-separated with one header row; a header cell `Name [unit]`
//! declares attribute `Name` with unit `unit`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use marv_core::{AttributeDescriptor, DataError, Dataset, FiberRecord, GeometryBinding, StudySeries};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: malformed manifest: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
    #[error("{}: empty file", path.display())]
    EmptyTable { path: PathBuf },
    #[error("{}: no records", path.display())]
    NoRecords { path: PathBuf },
    #[error("{}: header: {message}", path.display())]
    Header { path: PathBuf, message: String },
    #[error("{}: row {row} has {found} cells, expected {expected}", path.display())]
    Ragged {
        path: PathBuf,
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("{}: row {row}, column {column}: {message}", path.display())]
    Cell {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Data(#[from] DataError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    pub geometry_binding: GeometryBinding,
    pub time_steps: Vec<ManifestStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestStep {
    pub label: String,
    pub load_newtons: f64,
    pub table_path: PathBuf,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self, IngestError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        toml::from_str(&text).map_err(|e| IngestError::Manifest {
            path: path.to_path_buf(),
            message: e.to_string().trim_end().to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableFormat {
    pub delimiter: u8,
}

impl Default for TableFormat {
    fn default() -> Self {
        Self { delimiter: b',' }
    }
}

/// `"Diameter [µm]"` → (`Diameter`, `µm`); no brackets → empty unit.
pub fn parse_header_cell(cell: &str) -> AttributeDescriptor {
    let cell = cell.trim();
    if let Some(open) = cell.rfind('[') {
        if cell.ends_with(']') && open > 0 {
            return AttributeDescriptor::new(cell[..open].trim(), cell[open + 1..cell.len() - 1].trim());
        }
    }
    AttributeDescriptor::new(cell, "")
}

pub fn format_header_cell(a: &AttributeDescriptor) -> String {
    if a.unit.is_empty() {
        a.name.clone()
    } else {
        format!("{} [{}]", a.name, a.unit)
    }
}

/// Parses one table. Rows are numbered from 1 for the first data row.
pub fn parse_table(path: &Path, label: &str, load_newtons: f64, format: TableFormat) -> Result<Dataset, IngestError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    parse_table_bytes(&bytes, path, label, load_newtons, format)
}

pub fn parse_table_bytes(
    bytes: &[u8],
    path: &Path,
    label: &str,
    load_newtons: f64,
    format: TableFormat,
) -> Result<Dataset, IngestError> {
    let p = || path.to_path_buf();
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(IngestError::EmptyTable { path: p() });
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|source| IngestError::Csv { path: p(), source })?
        .clone();
    let attributes: Vec<AttributeDescriptor> = header.iter().map(parse_header_cell).collect();
    if let Some(i) = attributes.iter().position(|a| a.name.is_empty()) {
        return Err(IngestError::Header {
            path: p(),
            message: format!("column {} has an empty name", i + 1),
        });
    }
    let width = attributes.len();
    let mut records = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut row = 0;
    while reader
        .read_record(&mut record)
        .map_err(|source| IngestError::Csv { path: p(), source })?
    {
        row += 1;
        if record.len() != width {
            return Err(IngestError::Ragged {
                path: p(),
                row,
                found: record.len(),
                expected: width,
            });
        }
        let mut values = Vec::with_capacity(width);
        for (c, cell) in record.iter().enumerate() {
            let err = |message: &str| IngestError::Cell {
                path: p(),
                row,
                column: attributes[c].name.clone(),
                message: message.to_string(),
            };
            let cell = cell.trim();
            if cell.is_empty() {
                return Err(err("empty cell"));
            }
            let v: f64 = cell.parse().map_err(|_| err(&format!("`{cell}` is not a number")))?;
            if !v.is_finite() {
                return Err(err(&format!("`{cell}` is not finite")));
            }
            values.push(v);
        }
        records.push(FiberRecord::new(values));
    }
    if records.is_empty() {
        return Err(IngestError::NoRecords { path: p() });
    }
    Dataset::new(label, load_newtons, attributes, records).map_err(|e| match e {
        DataError::DuplicateAttribute { name, .. } => IngestError::Header {
            path: p(),
            message: format!("duplicate attribute `{name}`"),
        },
        other => IngestError::Data(other),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedStudy {
    pub series: StudySeries,
    pub binding: GeometryBinding,
}

/// Reads a manifest and all of its tables; tables parse in parallel.
pub fn load_manifest(path: &Path, format: TableFormat) -> Result<LoadedStudy, IngestError> {
    let manifest = Manifest::read(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let steps = manifest
        .time_steps
        .par_iter()
        .map(|s| parse_table(&dir.join(&s.table_path), &s.label, s.load_newtons, format))
        .collect::<Result<Vec<_>, _>>()?;
    let series = StudySeries::new(manifest.name, steps)?;
    manifest.geometry_binding.validate(&series)?;
    Ok(LoadedStudy {
        series,
        binding: manifest.geometry_binding,
    })
}

/// Writes values with the shortest exactly re-parsing representation.
pub fn write_table(path: &Path, dataset: &Dataset, format: TableFormat) -> Result<(), IngestError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new()
        .delimiter(format.delimiter)
        .from_writer(io::BufWriter::new(file));
    let csv_err = |source| IngestError::Csv {
        path: path.to_path_buf(),
        source,
    };
    w.write_record(dataset.attributes().iter().map(format_header_cell))
        .map_err(csv_err)?;
    let mut buf = Vec::with_capacity(dataset.attributes().len());
    for r in dataset.records() {
        buf.clear();
        buf.extend(r.values.iter().map(f64::to_string));
        w.write_record(&buf).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes `manifest.toml` plus one `step{i}.csv` per time step into `dir`;
/// returns the manifest path.
pub fn write_study(dir: &Path, series: &StudySeries, binding: &GeometryBinding, format: TableFormat) -> Result<PathBuf, IngestError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut steps = Vec::with_capacity(series.len());
    for (i, ds) in series.time_steps().iter().enumerate() {
        let table = PathBuf::from(format!("step{i}.csv"));
        write_table(&dir.join(&table), ds, format)?;
        steps.push(ManifestStep {
            label: ds.label().to_string(),
            load_newtons: ds.load_newtons(),
            table_path: table,
        });
    }
    let manifest = Manifest {
        name: series.name().to_string(),
        geometry_binding: binding.clone(),
        time_steps: steps,
    };
    let path = dir.join("manifest.toml");
    let text = toml::to_string(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}
