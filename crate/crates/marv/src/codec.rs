//! Canonical JSON for scenes, patches and wire frames.
//!
//! Output is compact JSON. Object keys appear in schema order (map keys
//! sorted), and every non-integer number is rounded to six significant
//! digits, with `-0` written as `0`. Equal values therefore serialize to
//! identical bytes, and `serialize(parse(serialize(s)))` equals
//! `serialize(s)`.
//!
//! A scene document is `{"schema":"marv-scene/1","nodes":[...]}`; the README
//! documents the node schema.

use std::io;

use marv_core::scene::{Scene, SceneError, SceneNode, ScenePatch, SCENE_SCHEMA};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("malformed document at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported schema `{0}`, expected `{SCENE_SCHEMA}`")]
    Version(String),
    #[error("invalid scene: {0}")]
    Invalid(#[from] SceneError),
}

/// Rounds to six significant digits; `-0` becomes `0`.
pub fn round_sig6(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = if x == 0.0 {
        0.0
    } else {
        format!("{x:.5e}").parse().expect("formatted float parses")
    };
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

struct Sig6;

impl Formatter for Sig6 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        CompactFormatter.write_f64(writer, round_sig6(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        CompactFormatter.write_f64(writer, round_sig6(f64::from(value)))
    }
}

pub fn to_canonical_string<T: Serialize + ?Sized>(item: &T) -> String {
    let mut out = Vec::with_capacity(256);
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig6);
    item.serialize(&mut ser).expect("engine types serialize to JSON");
    String::from_utf8(out).expect("JSON output is UTF-8")
}

/// Deserializes with a path-qualified error.
pub fn from_str_with_path<T: DeserializeOwned>(text: &str) -> Result<T, CodecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let v = serde_path_to_error::deserialize(&mut *de).map_err(|e| CodecError::Schema {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    de.end().map_err(|e| CodecError::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    Ok(v)
}

pub fn from_value_with_path<T: DeserializeOwned>(v: serde_json::Value) -> Result<T, CodecError> {
    serde_path_to_error::deserialize(v).map_err(|e| CodecError::Schema {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

/// Borrowed scene document, for embedding in larger frames.
#[derive(Serialize)]
pub struct SceneDocument<'a> {
    pub schema: &'static str,
    pub nodes: &'a [SceneNode],
}

impl<'a> SceneDocument<'a> {
    pub fn new(scene: &'a Scene) -> Self {
        Self {
            schema: SCENE_SCHEMA,
            nodes: &scene.nodes,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentIn {
    schema: String,
    nodes: Vec<SceneNode>,
}

/// Canonical scene document. Fails on scenes that do not validate.
pub fn serialize_scene(scene: &Scene) -> Result<String, CodecError> {
    scene.validate()?;
    Ok(to_canonical_string(&SceneDocument::new(scene)))
}

pub fn parse_scene(text: &str) -> Result<Scene, CodecError> {
    let doc: DocumentIn = from_str_with_path(text)?;
    if doc.schema != SCENE_SCHEMA {
        return Err(CodecError::Version(doc.schema));
    }
    Ok(Scene::new(doc.nodes)?)
}

pub fn serialize_patch(patch: &ScenePatch) -> String {
    to_canonical_string(patch)
}

pub fn parse_patch(text: &str) -> Result<ScenePatch, CodecError> {
    from_str_with_path(text)
}
