//! Statistics, color mapping, chart layout and the retained scene model behind
//! MARV's immersive charts for time series of per-fiber material datasets.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the session
//! event loop, the wire protocol and the CLI live in the `marv` crate.
//!
//! Module map:
//! - [`data`]: fiber tables, time-step series and geometry bindings.
//! - [`stats`]: quartiles, moments, modality, Sturges binning, histograms and chi-square drift.
//! - [`skmapper`]: the skewness/kurtosis bivariate color scheme.
//! - [`palette`]: every color constant the engine emits.
//! - [`charts`]: MDD Glyphs, Temporal Evolution Tracker and Chrono Bins layouts.
//! - [`spatial`]: fiber cylinders, grid anchors and bin-driven highlight selection.
//! - [`scene`]: typed scene graph, diffs and patches.

#![no_std]
#![deny(rustdoc::broken_intra_doc_links)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod charts;
pub mod data;
pub mod palette;
pub mod scene;
pub mod session;
pub mod skmapper;
pub mod spatial;
pub mod stats;

pub use data::{AttributeDescriptor, DataError, Dataset, FiberRecord, GeometryBinding, StudySeries};
pub use palette::Rgba;
