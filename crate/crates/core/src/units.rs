//! Spectroscopic unit conversion.
//!
//! Everything in the crate works with angular frequencies in one consistent
//! unit. Wavenumbers only appear when a scenario is specified in cm⁻¹; this
//! module is the single place where they are converted.

use std::f64::consts::PI;

/// Speed of light in cm per nanosecond.
pub const SPEED_OF_LIGHT_CM_PER_NS: f64 = 29.979_245_8;

/// Converts a wavenumber ν̃ (cm⁻¹) to an angular frequency 2πcν̃, where `c` is
/// the speed of light in cm per time unit.
pub fn wavenumber_to_angular(wavenumber: f64, c: f64) -> f64 {
    2.0 * PI * c * wavenumber
}

pub fn angular_to_wavenumber(angular: f64, c: f64) -> f64 {
    angular / (2.0 * PI * c)
}

/// Angular frequency in rad/ns for a wavenumber in cm⁻¹.
pub fn wavenumber_to_rad_per_ns(wavenumber: f64) -> f64 {
    wavenumber_to_angular(wavenumber, SPEED_OF_LIGHT_CM_PER_NS)
}
