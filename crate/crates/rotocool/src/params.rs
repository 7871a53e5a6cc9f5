//! Physical parameters, unit conventions, and derived constants.
//!
//! Everything downstream consumes a validated [`SystemParams`]. All
//! quantities are strict SI internally: kilograms, metres, seconds, radians,
//! watts, kelvin. The one convenience accepted on input is specifying the
//! optical frequency through a vacuum wavelength instead of an angular
//! frequency.
//!
//! The config file format is TOML with `[mirror]`, `[cavity]`, `[env]`
//! sections and one or more `[[beam]]` tables; see `docs/config.md` for the
//! annotated schema.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

use crate::constants::{BOLTZMANN, HBAR, SPEED_OF_LIGHT};

/// Validation failure for a raw parameter document.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParamsError {
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("field `{field}` must be strictly positive, got {value}")]
    NonPositive { field: String, value: f64 },
    #[error("field `{field}` must be finite, got {value}")]
    NonFinite { field: String, value: f64 },
    #[error("beam `{label}`: input_power must be non-negative, got {value}")]
    NegativePower { label: String, value: f64 },
    #[error("exactly one of `mirror.quality_factor` and `mirror.damping_constant` must be given")]
    DampingOverOrUnderSpecified,
    #[error(
        "exactly one of `cavity.optical_angular_frequency` and `cavity.wavelength` must be given"
    )]
    FrequencyOverOrUnderSpecified,
    #[error("at least one `[[beam]]` section is required")]
    NoBeams,
    #[error("config parse error: {0}")]
    Parse(String),
}

fn positive(field: &str, value: f64) -> Result<f64, ParamsError> {
    if !value.is_finite() {
        return Err(ParamsError::NonFinite {
            field: field.to_owned(),
            value,
        });
    }
    if value <= 0.0 {
        return Err(ParamsError::NonPositive {
            field: field.to_owned(),
            value,
        });
    }
    Ok(value)
}

/// Torsional mirror: a thin disk of mass `mass` and radius `radius` on a
/// rotational support with resonance `omega_phi`.
///
/// Exactly one of `quality_factor` / `damping_constant` is supplied; the
/// other follows from `D_phi = I * omega_phi / Q`, which makes `D_phi / I`
/// the energy decay rate of the mode.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorParams {
    /// kg
    pub mass: f64,
    /// m
    pub radius: f64,
    /// rad/s, torsional resonance
    pub omega_phi: f64,
    /// dimensionless, `None` when the damping constant was given directly
    pub quality_factor: Option<f64>,
    /// kg·m²/s, `None` when the quality factor was given directly
    pub damping_constant: Option<f64>,
}

impl MirrorParams {
    /// Moment of inertia about the cavity axis, `I = M R² / 2` (thin disk).
    pub fn moment_of_inertia(&self) -> f64 {
        0.5 * self.mass * self.radius * self.radius
    }
}

/// Intrinsic angular damping constant from the quality factor,
/// `D_phi = I * omega_phi / Q`.
pub fn derived_damping(mirror: &MirrorParams) -> Result<f64, ParamsError> {
    let q = mirror
        .quality_factor
        .ok_or(ParamsError::MissingField("mirror.quality_factor"))?;
    if q <= 0.0 {
        return Err(ParamsError::NonPositive {
            field: "mirror.quality_factor".to_owned(),
            value: q,
        });
    }
    Ok(mirror.moment_of_inertia() * mirror.omega_phi / q)
}

/// Driven optical cavity supporting a mode with orbital angular momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityParams {
    /// m
    pub length: f64,
    /// rad/s, field energy decay rate
    pub linewidth: f64,
    /// winding number of the mode's azimuthal phase; 0 switches the
    /// rotational coupling off entirely
    pub topological_charge: u32,
    /// rad/s
    pub optical_angular_frequency: f64,
}

impl CavityParams {
    /// Optorotational coupling `xi_phi = c * l / L`: the reflection torque is
    /// `hbar * xi_phi` per intracavity photon.
    pub fn coupling(&self) -> f64 {
        SPEED_OF_LIGHT * f64::from(self.topological_charge) / self.length
    }
}

/// One laser drive.
///
/// `detuning` is the static detuning in the sign convention where a positive
/// value puts the laser below the cavity resonance. Under the static-feedback
/// operating mode used by all linear-response and thermometry paths it is
/// held at this value independent of the mirror angle (the full static
/// detuning); the unclamped steady-state solver instead treats it as the bare
/// laser-cavity detuning, from which the angle-pulled detuning follows.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamDrive {
    /// W
    pub input_power: f64,
    /// rad/s
    pub detuning: f64,
    pub label: String,
}

impl BeamDrive {
    /// Squared input field amplitude `|a_in|² = P_in / (hbar * omega_c)`,
    /// photons per second.
    pub fn input_photon_rate(&self, optical_angular_frequency: f64) -> f64 {
        self.input_power / (HBAR * optical_angular_frequency)
    }
}

/// Thermal environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvParams {
    /// K, bath temperature
    pub temperature: f64,
}

/// Validated system: mirror, cavity, beams, environment, plus cached derived
/// constants. Immutable after construction; cheap to clone and safe to share
/// across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    mirror: MirrorParams,
    cavity: CavityParams,
    beams: Vec<BeamDrive>,
    env: EnvParams,
    // cached derived constants
    moment_of_inertia: f64,
    coupling: f64,
    damping_constant: f64,
    quality_factor: f64,
}

impl SystemParams {
    /// Validates the parts and caches the derived constants.
    pub fn new(
        mirror: MirrorParams,
        cavity: CavityParams,
        beams: Vec<BeamDrive>,
        env: EnvParams,
    ) -> Result<Self, ParamsError> {
        positive("mirror.mass", mirror.mass)?;
        positive("mirror.radius", mirror.radius)?;
        positive("mirror.omega_phi", mirror.omega_phi)?;
        let moment_of_inertia = mirror.moment_of_inertia();

        let (damping_constant, quality_factor) =
            match (mirror.quality_factor, mirror.damping_constant) {
                (Some(q), None) => {
                    positive("mirror.quality_factor", q)?;
                    (moment_of_inertia * mirror.omega_phi / q, q)
                }
                (None, Some(d)) => {
                    positive("mirror.damping_constant", d)?;
                    (d, moment_of_inertia * mirror.omega_phi / d)
                }
                _ => return Err(ParamsError::DampingOverOrUnderSpecified),
            };

        positive("cavity.length", cavity.length)?;
        positive("cavity.linewidth", cavity.linewidth)?;
        positive(
            "cavity.optical_angular_frequency",
            cavity.optical_angular_frequency,
        )?;
        let coupling = cavity.coupling();

        if beams.is_empty() {
            return Err(ParamsError::NoBeams);
        }
        for beam in &beams {
            if !beam.input_power.is_finite() || beam.input_power < 0.0 {
                return Err(ParamsError::NegativePower {
                    label: beam.label.clone(),
                    value: beam.input_power,
                });
            }
            if !beam.detuning.is_finite() {
                return Err(ParamsError::NonFinite {
                    field: format!("beam `{}`.detuning", beam.label),
                    value: beam.detuning,
                });
            }
        }

        positive("env.temperature", env.temperature)?;

        Ok(Self {
            mirror,
            cavity,
            beams,
            env,
            moment_of_inertia,
            coupling,
            damping_constant,
            quality_factor,
        })
    }

    pub fn mirror(&self) -> &MirrorParams {
        &self.mirror
    }

    pub fn cavity(&self) -> &CavityParams {
        &self.cavity
    }

    pub fn beams(&self) -> &[BeamDrive] {
        &self.beams
    }

    pub fn env(&self) -> &EnvParams {
        &self.env
    }

    /// kg·m², cached `I = M R² / 2`.
    pub fn moment_of_inertia(&self) -> f64 {
        self.moment_of_inertia
    }

    /// 1/s, cached optorotational coupling `xi_phi = c l / L`.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// kg·m²/s, cached `D_phi`.
    pub fn damping_constant(&self) -> f64 {
        self.damping_constant
    }

    /// Cached mechanical quality factor `Q = I omega_phi / D_phi`.
    pub fn quality_factor(&self) -> f64 {
        self.quality_factor
    }

    /// rad/s, torsional resonance.
    pub fn omega_phi(&self) -> f64 {
        self.mirror.omega_phi
    }

    /// rad/s, cavity field energy decay rate.
    pub fn linewidth(&self) -> f64 {
        self.cavity.linewidth
    }

    /// rad/s, optical carrier frequency.
    pub fn optical_angular_frequency(&self) -> f64 {
        self.cavity.optical_angular_frequency
    }

    /// True when `k_B T > 10 * hbar * omega_phi`, the regime in which the
    /// white-noise (high-temperature) Brownian torque model is valid.
    pub fn high_temperature_valid(&self) -> bool {
        BOLTZMANN * self.env.temperature > 10.0 * HBAR * self.mirror.omega_phi
    }

    /// Copy of this system with the beam list replaced (re-validated).
    pub fn with_beams(&self, beams: Vec<BeamDrive>) -> Result<Self, ParamsError> {
        Self::new(
            self.mirror.clone(),
            self.cavity.clone(),
            beams,
            self.env.clone(),
        )
    }

    /// Serializable raw document reproducing this system.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            mirror: RawMirror {
                mass: Some(self.mirror.mass),
                radius: Some(self.mirror.radius),
                omega_phi: Some(self.mirror.omega_phi),
                quality_factor: self.mirror.quality_factor,
                damping_constant: self.mirror.damping_constant,
            },
            cavity: RawCavity {
                length: Some(self.cavity.length),
                linewidth: Some(self.cavity.linewidth),
                topological_charge: Some(self.cavity.topological_charge),
                optical_angular_frequency: Some(self.cavity.optical_angular_frequency),
                wavelength: None,
            },
            beam: self
                .beams
                .iter()
                .map(|b| RawBeam {
                    input_power: Some(b.input_power),
                    detuning: Some(b.detuning),
                    label: Some(b.label.clone()),
                })
                .collect(),
            env: RawEnv {
                temperature: Some(self.env.temperature),
            },
        }
    }
}

/// Raw, unvalidated config document. Fields are optional so that validation
/// can report which one is missing instead of failing at parse time.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct RawConfig {
    pub mirror: RawMirror,
    pub cavity: RawCavity,
    #[serde(default)]
    pub beam: Vec<RawBeam>,
    pub env: RawEnv,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct RawMirror {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quality_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damping_constant: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct RawCavity {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linewidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topological_charge: Option<u32>,
    /// rad/s; mutually exclusive with `wavelength`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optical_angular_frequency: Option<f64>,
    /// m, vacuum wavelength; converted via `omega_c = 2 pi c / lambda`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct RawBeam {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct RawEnv {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

impl RawConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ParamsError> {
        toml::from_str(text).map_err(|e| ParamsError::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }
}

/// Validates a raw document into a [`SystemParams`] with derived constants
/// populated. Rejects violations with field-level diagnostics.
pub fn build_system(raw: &RawConfig) -> Result<SystemParams, ParamsError> {
    let mirror = MirrorParams {
        mass: raw
            .mirror
            .mass
            .ok_or(ParamsError::MissingField("mirror.mass"))?,
        radius: raw
            .mirror
            .radius
            .ok_or(ParamsError::MissingField("mirror.radius"))?,
        omega_phi: raw
            .mirror
            .omega_phi
            .ok_or(ParamsError::MissingField("mirror.omega_phi"))?,
        quality_factor: raw.mirror.quality_factor,
        damping_constant: raw.mirror.damping_constant,
    };

    let optical_angular_frequency = match (
        raw.cavity.optical_angular_frequency,
        raw.cavity.wavelength,
    ) {
        (Some(w), None) => w,
        (None, Some(lambda)) => {
            positive("cavity.wavelength", lambda)?;
            TAU * SPEED_OF_LIGHT / lambda
        }
        _ => return Err(ParamsError::FrequencyOverOrUnderSpecified),
    };
    let cavity = CavityParams {
        length: raw
            .cavity
            .length
            .ok_or(ParamsError::MissingField("cavity.length"))?,
        linewidth: raw
            .cavity
            .linewidth
            .ok_or(ParamsError::MissingField("cavity.linewidth"))?,
        topological_charge: raw
            .cavity
            .topological_charge
            .ok_or(ParamsError::MissingField("cavity.topological_charge"))?,
        optical_angular_frequency,
    };

    let beams = raw
        .beam
        .iter()
        .enumerate()
        .map(|(i, b)| {
            Ok(BeamDrive {
                input_power: b
                    .input_power
                    .ok_or(ParamsError::MissingField("beam.input_power"))?,
                detuning: b.detuning.ok_or(ParamsError::MissingField("beam.detuning"))?,
                label: b.label.clone().unwrap_or_else(|| format!("beam{i}")),
            })
        })
        .collect::<Result<Vec<_>, ParamsError>>()?;

    let env = EnvParams {
        temperature: raw
            .env
            .temperature
            .ok_or(ParamsError::MissingField("env.temperature"))?,
    };

    SystemParams::new(mirror, cavity, beams, env)
}
