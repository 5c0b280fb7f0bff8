//! Color tokens, categorical palettes and the continuous ramp.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid color token `{0}`")]
pub struct ColorParseError(pub String);

/// 8-bit sRGB color, written as `#rrggbb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    /// Componentwise interpolation, exact at `t = 0` and `t = 1`.
    pub fn lerp(self, other: Rgb, t: f64) -> Rgb {
        let mix = |a: u8, b: u8| ((1.0 - t) * a as f64 + t * b as f64).round().clamp(0.0, 255.0) as u8;
        Rgb(mix(self.0, other.0), mix(self.1, other.1), mix(self.2, other.2))
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl FromStr for Rgb {
    type Err = ColorParseError;

    fn from_str(s: &str) -> Result<Rgb, ColorParseError> {
        let err = || ColorParseError(s.to_string());
        let hex = s.strip_prefix('#').ok_or_else(err)?;
        if hex.len() != 6 || !hex.is_ascii() {
            return Err(err());
        }
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| err());
        Ok(Rgb(byte(0)?, byte(2)?, byte(4)?))
    }
}

impl Serialize for Rgb {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Rgb, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Categorical palette (Tableau 10).
pub const CATEGORY10: [Rgb; 10] = [
    Rgb(0x1f, 0x77, 0xb4),
    Rgb(0xff, 0x7f, 0x0e),
    Rgb(0x2c, 0xa0, 0x2c),
    Rgb(0xd6, 0x27, 0x28),
    Rgb(0x94, 0x67, 0xbd),
    Rgb(0x8c, 0x56, 0x4b),
    Rgb(0xe3, 0x77, 0xc2),
    Rgb(0x7f, 0x7f, 0x7f),
    Rgb(0xbc, 0xbd, 0x22),
    Rgb(0x17, 0xbe, 0xcf),
];

/// How mark fills encode data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorEncoding {
    /// One fill for every mark.
    #[default]
    None,
    Nominal,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColorScheme {
    pub palette: Vec<Rgb>,
    /// Low and high ends of the continuous ramp.
    pub ramp: (Rgb, Rgb),
    /// Fill when no color dimension is bound.
    pub default_fill: Rgb,
    /// Fill for marks whose color value is missing.
    pub missing_fill: Rgb,
}

impl Default for ColorScheme {
    fn default() -> ColorScheme {
        ColorScheme {
            palette: CATEGORY10.to_vec(),
            // Light yellow to dark blue, ordered by lightness.
            ramp: (Rgb(0xff, 0xe0, 0x8a), Rgb(0x08, 0x30, 0x6b)),
            default_fill: CATEGORY10[0],
            missing_fill: Rgb(0xcc, 0xcc, 0xcc),
        }
    }
}

impl ColorScheme {
    pub fn categorical(&self, index: usize) -> Rgb {
        if self.palette.is_empty() {
            return self.default_fill;
        }
        self.palette[index % self.palette.len()]
    }

    /// Ramp color for `t` in `[0, 1]`.
    pub fn continuous(&self, t: f64) -> Rgb {
        let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
        self.ramp.0.lerp(self.ramp.1, t)
    }
}
