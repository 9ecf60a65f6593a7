//! The palette file shared with viewers.
//!
//! `assets/palette.json` lists every named engine color as `[r, g, b, a]`
//! bytes. Scene documents carry colors as unit reals `c / 255`; a viewer
//! recovers the bytes by rounding `c * 255`.

use std::collections::BTreeMap;

use marv_core::palette;
use serde::{Deserialize, Serialize};

pub const PALETTE_SCHEMA: &str = "marv-palette/1";

/// The file as shipped in the repository.
pub const SHIPPED_PALETTE: &str = include_str!("../assets/palette.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteFile {
    pub schema: String,
    /// Alpha of unhighlighted fibers when a highlight dims the others.
    pub fiber_dim_alpha: u8,
    pub colors: BTreeMap<String, [u8; 4]>,
}

impl PaletteFile {
    pub fn current() -> Self {
        Self {
            schema: PALETTE_SCHEMA.into(),
            fiber_dim_alpha: palette::FIBER_DIM_ALPHA,
            colors: palette::named_colors().into_iter().map(|(n, c)| (n, c.0)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("palette serializes");
        s.push('\n');
        s
    }
}
