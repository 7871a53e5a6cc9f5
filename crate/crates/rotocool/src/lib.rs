//! Optical trapping and cooling of the rotational mode of a mirror driven by
//! an orbital-angular-momentum cavity field.
//!
//! The library models a torsional oscillator (a thin-disk rear mirror mounted
//! on a rotational support) coupled to one or more driven cavity modes that
//! carry orbital angular momentum. It provides:
//!
//! * [`params`] — validated physical parameters and the config file format,
//! * [`steady`] — steady-state branches of the coupled field/angle equations,
//!   including bistability detection,
//! * [`response`] — the linearized drift matrix, Routh–Hurwitz stability
//!   classification, the mechanical susceptibility, and the radiation-induced
//!   effective frequency and damping,
//! * [`thermo`] — effective temperature, rotational quantum occupancy, and
//!   the equipartition integral cross-check,
//! * [`langevin`] — stochastic time-domain integration of the classical
//!   mean-field equations with thermal torque noise,
//! * [`psd`] — averaged-periodogram spectral estimation for trajectory
//!   ensembles,
//! * [`sweep`] — parameter-space maps and a constrained search for the
//!   minimum occupancy,
//! * [`presets`] — bundled parameter sets, including the published worked
//!   example this design follows.

pub mod constants;
pub mod langevin;
pub mod params;
pub mod presets;
pub mod psd;
pub mod response;
pub mod steady;
pub mod sweep;
pub mod thermo;

pub use params::{BeamDrive, CavityParams, EnvParams, MirrorParams, RawConfig, SystemParams};
pub use response::{DriftMatrix, ResponseResult, StabilityVerdict};
pub use steady::SteadyState;
pub use thermo::Thermometry;
