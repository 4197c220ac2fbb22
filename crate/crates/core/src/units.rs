//! Fixed whitelist of unit tags and their conversion to internal SI.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Angular frequency tagged "MHz" is 1e6 rad/s (not 2π·1e6).
pub const MHZ: f64 = 1.0e6;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    MHz,
    RadPerSecond,
    Centimeter,
    Meter,
    SquareCentimeter,
    SquareMeter,
    Milliwatt,
    Watt,
    Second,
    PerCubicMeter,
    PerCubicCentimeter,
}

impl Unit {
    pub const ALL: [Unit; 11] = [
        Unit::MHz,
        Unit::RadPerSecond,
        Unit::Centimeter,
        Unit::Meter,
        Unit::SquareCentimeter,
        Unit::SquareMeter,
        Unit::Milliwatt,
        Unit::Watt,
        Unit::Second,
        Unit::PerCubicMeter,
        Unit::PerCubicCentimeter,
    ];

    /// Multiplier taking a value in this unit to internal SI.
    pub fn factor(self) -> f64 {
        match self {
            Unit::MHz => MHZ,
            Unit::RadPerSecond => 1.0,
            Unit::Centimeter => 1e-2,
            Unit::Meter => 1.0,
            Unit::SquareCentimeter => 1e-4,
            Unit::SquareMeter => 1.0,
            Unit::Milliwatt => 1e-3,
            Unit::Watt => 1.0,
            Unit::Second => 1.0,
            Unit::PerCubicMeter => 1.0,
            Unit::PerCubicCentimeter => 1e6,
        }
    }

    /// Tag as used in config key suffixes.
    pub fn tag(self) -> &'static str {
        match self {
            Unit::MHz => "MHz",
            Unit::RadPerSecond => "rad_s",
            Unit::Centimeter => "cm",
            Unit::Meter => "m",
            Unit::SquareCentimeter => "cm2",
            Unit::SquareMeter => "m2",
            Unit::Milliwatt => "mW",
            Unit::Watt => "W",
            Unit::Second => "s",
            Unit::PerCubicMeter => "per_m3",
            Unit::PerCubicCentimeter => "per_cm3",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Unit::ALL
            .iter()
            .copied()
            .find(|u| u.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown unit tag '{s}'")))
    }
}

/// Convert `value` given in `unit` to internal SI (rad/s, m, m², s, W, m⁻³).
pub fn convert_units(value: f64, unit: Unit) -> f64 {
    value * unit.factor()
}

/// Inverse of [`convert_units`].
pub fn from_si(value: f64, unit: Unit) -> f64 {
    value / unit.factor()
}

/// Parse a tag and convert in one go.
pub fn convert_tagged(value: f64, tag: &str) -> Result<f64> {
    Ok(convert_units(value, tag.parse()?))
}

/// Mean photon number of a pulse of power `power` (W) lasting `t_m` (s) at
/// vacuum wavelength `wavelength` (m).
pub fn photon_budget(power: f64, t_m: f64, wavelength: f64) -> f64 {
    power * t_m * wavelength / (2.0 * std::f64::consts::PI * HBAR * SPEED_OF_LIGHT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_conversions() {
        assert_eq!(convert_units(60.0, Unit::MHz), 6.0e7);
        assert_eq!(convert_units(1.0, Unit::MHz), 1.0e6);
        assert!((convert_units(10.0, Unit::Centimeter) - 0.1).abs() < 1e-16);
    }

    #[test]
    fn unknown_tag_is_config_error() {
        assert!(matches!("furlong".parse::<Unit>(), Err(Error::Config(_))));
        assert!(convert_tagged(1.0, "GHz").is_err());
    }

    #[test]
    fn photon_budget_matches_fig2() {
        let n = photon_budget(0.1, 1.0, 500e-9);
        assert!((n / 2.517e17 - 1.0).abs() < 1e-3, "{n}");
    }
}
