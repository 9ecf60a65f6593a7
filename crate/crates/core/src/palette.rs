//! Every color the engine emits. Viewers receive these bytes in the wire
//! handshake and in the shipped palette file; they must not substitute their
//! own data colors.

use core::fmt;

use serde::{Deserialize, Serialize};

/// 8-bit sRGB color with alpha.
///
/// Serializes as four reals in `[0, 1]`; deserializing rounds each to the
/// nearest byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rgba(pub [u8; 4]);

impl Serialize for Rgba {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_unit().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rgba {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let c = <[f64; 4]>::deserialize(d)?;
        if c.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(serde::de::Error::custom("color channels must lie in [0, 1]"));
        }
        Ok(Rgba::from_unit(c))
    }
}

impl Rgba {
    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Self([r, g, b, 255])
    }

    pub const fn with_alpha(self, a: u8) -> Self {
        let [r, g, b, _] = self.0;
        Self([r, g, b, a])
    }

    /// Channels scaled to `[0, 1]`.
    pub fn to_unit(self) -> [f64; 4] {
        self.0.map(|c| f64::from(c) / 255.0)
    }

    /// Nearest color to unit-scaled channels; inputs are clamped.
    pub fn from_unit(c: [f64; 4]) -> Self {
        Self(c.map(|x| libm::round(x.clamp(0.0, 1.0) * 255.0) as u8))
    }

    /// Alpha from a `[0, 1]` opacity.
    pub fn with_opacity(self, opacity: f64) -> Self {
        self.with_alpha(libm::round(opacity.clamp(0.0, 1.0) * 255.0) as u8)
    }

    /// Channel-wise linear interpolation, rounded to the nearest byte.
    pub fn lerp(self, other: Rgba, t: f64) -> Self {
        let t = t.clamp(0.0, 1.0);
        let mut out = [0u8; 4];
        for (i, o) in out.iter_mut().enumerate() {
            let a = f64::from(self.0[i]);
            let b = f64::from(other.0[i]);
            *o = libm::round(a + (b - a) * t) as u8;
        }
        Self(out)
    }

    pub fn alpha(self) -> u8 {
        self.0[3]
    }
}

impl fmt::Display for Rgba {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [r, g, b, a] = self.0;
        write!(f, "#{r:02x}{g:02x}{b:02x}{a:02x}")
    }
}

/// SK Mapper hue families, one per skewness column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hue {
    Purple,
    Blue,
    Red,
}

impl Hue {
    pub const ALL: [Hue; 3] = [Hue::Purple, Hue::Blue, Hue::Red];

    pub fn for_column(col: u8) -> Hue {
        match col {
            0 => Hue::Purple,
            1 => Hue::Blue,
            _ => Hue::Red,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Hue::Purple => "purple",
            Hue::Blue => "blue",
            Hue::Red => "red",
        }
    }
}

/// Categorical SK colors `[col][row]`; rows run dark to light with rising kurtosis.
pub const SK_CATEGORICAL: [[Rgba; 3]; 3] = [
    [Rgba::rgb(78, 22, 136), Rgba::rgb(131, 96, 173), Rgba::rgb(202, 196, 224)],
    [Rgba::rgb(27, 65, 120), Rgba::rgb(92, 123, 165), Rgba::rgb(179, 202, 226)],
    [Rgba::rgb(118, 19, 28), Rgba::rgb(169, 82, 78), Rgba::rgb(237, 168, 146)],
];

/// Detailed View ramps, darkest to lightest.
pub const SK_DETAILED_PURPLE: [Rgba; 9] = [
    Rgba::rgb(63, 0, 125),
    Rgba::rgb(82, 27, 139),
    Rgba::rgb(102, 54, 152),
    Rgba::rgb(121, 82, 166),
    Rgba::rgb(140, 109, 180),
    Rgba::rgb(160, 136, 194),
    Rgba::rgb(179, 164, 208),
    Rgba::rgb(199, 191, 221),
    Rgba::rgb(218, 218, 235),
];

pub const SK_DETAILED_BLUE: [Rgba; 9] = [
    Rgba::rgb(8, 48, 107),
    Rgba::rgb(32, 69, 124),
    Rgba::rgb(56, 91, 140),
    Rgba::rgb(79, 112, 156),
    Rgba::rgb(103, 134, 173),
    Rgba::rgb(127, 155, 190),
    Rgba::rgb(150, 176, 206),
    Rgba::rgb(174, 198, 222),
    Rgba::rgb(198, 219, 239),
];

pub const SK_DETAILED_RED: [Rgba; 9] = [
    Rgba::rgb(103, 0, 13),
    Rgba::rgb(122, 23, 32),
    Rgba::rgb(140, 47, 50),
    Rgba::rgb(159, 70, 68),
    Rgba::rgb(178, 94, 87),
    Rgba::rgb(196, 117, 106),
    Rgba::rgb(215, 140, 124),
    Rgba::rgb(233, 164, 142),
    Rgba::rgb(252, 187, 161),
];

pub fn sk_detailed_ramp(hue: Hue) -> &'static [Rgba; 9] {
    match hue {
        Hue::Purple => &SK_DETAILED_PURPLE,
        Hue::Blue => &SK_DETAILED_BLUE,
        Hue::Red => &SK_DETAILED_RED,
    }
}

/// Glyphs of zero-variance attributes.
pub const DEGENERATE_GLYPH: Rgba = Rgba::rgb(128, 128, 128);
/// Glyphs outside the Detailed View focus range.
pub const OUT_OF_FOCUS: Rgba = Rgba::rgb(189, 189, 189);

pub const CHRONO_INCREASE: Rgba = Rgba::rgb(221, 52, 151);
pub const CHRONO_DECREASE: Rgba = Rgba::rgb(27, 158, 119);
pub const CHRONO_UNCHANGED: Rgba = Rgba::rgb(150, 150, 150);
pub const CHRONO_BIN: Rgba = Rgba::rgb(110, 110, 110);

pub const TET_CUBE: Rgba = Rgba::rgb(120, 120, 120);
pub const TET_LINE_LOW: Rgba = Rgba::rgb(217, 217, 217);
pub const TET_LINE_HIGH: Rgba = Rgba::rgb(166, 54, 3);

pub const HIGHLIGHT_EARLIER: Rgba = Rgba::rgb(228, 26, 28);
pub const HIGHLIGHT_LATER: Rgba = Rgba::rgb(255, 217, 47);
pub const FIBER_DEFAULT: Rgba = Rgba::rgb(176, 190, 197);
/// Alpha applied to non-highlighted fibers when dimming is requested.
pub const FIBER_DIM_ALPHA: u8 = 77;

pub const HANDLE: Rgba = Rgba::rgb(128, 128, 128);
pub const AXIS: Rgba = Rgba::rgb(90, 90, 90);
pub const LABEL: Rgba = Rgba::rgb(60, 60, 60);

/// TET line color for a normalized drift in `[0, 1]`.
pub fn tet_line_color(drift: f64) -> Rgba {
    TET_LINE_LOW.lerp(TET_LINE_HIGH, drift)
}

/// All named constants, in a fixed order, for export.
pub fn named_colors() -> alloc::vec::Vec<(alloc::string::String, Rgba)> {
    use alloc::format;
    use alloc::string::ToString;
    let mut out = alloc::vec::Vec::new();
    for (col, hue) in Hue::ALL.iter().enumerate() {
        for (row, c) in SK_CATEGORICAL[col].iter().enumerate() {
            out.push((format!("sk.categorical.{}.{}", hue.name(), row), *c));
        }
    }
    for hue in Hue::ALL {
        for (i, c) in sk_detailed_ramp(hue).iter().enumerate() {
            out.push((format!("sk.detailed.{}.{}", hue.name(), i), *c));
        }
    }
    let singles = [
        ("glyph.degenerate", DEGENERATE_GLYPH),
        ("glyph.out_of_focus", OUT_OF_FOCUS),
        ("chrono.increase", CHRONO_INCREASE),
        ("chrono.decrease", CHRONO_DECREASE),
        ("chrono.unchanged", CHRONO_UNCHANGED),
        ("chrono.bin", CHRONO_BIN),
        ("tet.cube", TET_CUBE),
        ("tet.line.low", TET_LINE_LOW),
        ("tet.line.high", TET_LINE_HIGH),
        ("highlight.earlier", HIGHLIGHT_EARLIER),
        ("highlight.later", HIGHLIGHT_LATER),
        ("fiber.default", FIBER_DEFAULT),
        ("handle", HANDLE),
        ("axis", AXIS),
        ("label", LABEL),
    ];
    out.extend(singles.into_iter().map(|(n, c)| (n.to_string(), c)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::string::ToString;

    fn luminance(c: Rgba) -> u32 {
        let [r, g, b, _] = c.0;
        299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b)
    }

    #[test]
    fn sk_colors_are_distinct_and_opaque() {
        let sk: BTreeSet<Rgba> = SK_CATEGORICAL
            .iter()
            .flatten()
            .chain(SK_DETAILED_PURPLE.iter())
            .chain(SK_DETAILED_BLUE.iter())
            .chain(SK_DETAILED_RED.iter())
            .copied()
            .collect();
        assert_eq!(sk.len(), 9 + 27);
        assert!(sk.iter().all(|c| c.alpha() == 255));
        assert!(!sk.contains(&DEGENERATE_GLYPH) && !sk.contains(&OUT_OF_FOCUS));
    }

    #[test]
    fn luminance_rises_along_rows_and_ramps() {
        for col in SK_CATEGORICAL {
            assert!(luminance(col[0]) < luminance(col[1]) && luminance(col[1]) < luminance(col[2]));
        }
        for hue in Hue::ALL {
            let ramp = sk_detailed_ramp(hue);
            assert!(ramp.windows(2).all(|w| luminance(w[0]) < luminance(w[1])));
        }
    }

    #[test]
    fn hex_and_unit_conversions() {
        assert_eq!(Rgba::rgb(255, 0, 16).to_string(), "#ff0010ff");
        let c = Rgba([1, 2, 250, 128]);
        assert_eq!(Rgba::from_unit(c.to_unit()), c);
        assert_eq!(tet_line_color(0.0), TET_LINE_LOW);
        assert_eq!(tet_line_color(1.0), TET_LINE_HIGH);
    }
}
