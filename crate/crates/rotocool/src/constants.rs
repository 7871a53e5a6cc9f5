//! Physical constants, SI 2019 exact values.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054571817e-34;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.99792458e8;
