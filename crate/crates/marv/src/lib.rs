//! Host side of the marv engine: study ingest, synthetic studies, the
//! canonical scene codec, the palette file, session helpers and the
//! `marv-wire/1` service.

pub mod codec;
pub mod ingest;
pub mod palette_file;
pub mod study;
pub mod synth;
pub mod wire;

pub use marv_core as core;
