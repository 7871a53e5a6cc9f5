//! Effective temperature and rotational quantum occupancy.
//!
//! With the torque fluctuations dominated by Brownian noise, the stationary
//! angular variance follows from the Lorentzian susceptibility with frozen
//! coefficients, and equipartition assigns the mode an effective temperature
//! `T_eff = T · D_φ / D_eff`. The occupancy is `n = k_B T_eff / (ħ ω_eff)`.
//! [`equipartition_integral_check`] verifies the Lorentzian integral
//! identity `∫|χ|² dω = π / (I ω_eff² D_eff)` by adaptive quadrature.

use thiserror::Error;

use crate::constants::{BOLTZMANN, HBAR};
use crate::params::SystemParams;
use crate::response::ResponseResult;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ThermoError {
    #[error("anti-damped response (D_eff = {d_eff} ≤ 0): no stationary temperature")]
    AntiDamped { d_eff: f64 },
    #[error("anti-trapped response (ω_eff² = {omega_eff_sq} ≤ 0): occupancy undefined")]
    AntiTrapped { omega_eff_sq: f64 },
    #[error("non-positive damping constant {0}")]
    NonPositiveDamping(f64),
    #[error("non-positive moment of inertia or frequency")]
    BadOscillator,
}

/// Thermometry of the cooled (or heated) rotational mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Thermometry {
    /// K
    pub t_eff: f64,
    /// mean rotational quanta
    pub n_quanta: f64,
    /// rad², stationary ⟨δφ²⟩
    pub variance_phi: f64,
    /// true when n < 1
    pub ground_state: bool,
}

/// Effective temperature, occupancy, and angular variance from a
/// linear-response result. The identity `T_eff · D_eff = T · D_φ` holds to
/// machine precision by construction.
pub fn effective_temperature(
    sys: &SystemParams,
    response: &ResponseResult,
) -> Result<Thermometry, ThermoError> {
    if response.d_eff <= 0.0 {
        return Err(ThermoError::AntiDamped {
            d_eff: response.d_eff,
        });
    }
    if response.omega_eff_sq <= 0.0 {
        return Err(ThermoError::AntiTrapped {
            omega_eff_sq: response.omega_eff_sq,
        });
    }
    let t_eff = sys.env().temperature * sys.damping_constant() / response.d_eff;
    let omega_eff = response.omega_eff_sq.sqrt();
    let n_quanta = BOLTZMANN * t_eff / (HBAR * omega_eff);
    let variance_phi = BOLTZMANN * t_eff / (sys.moment_of_inertia() * response.omega_eff_sq);
    Ok(Thermometry {
        t_eff,
        n_quanta,
        variance_phi,
        ground_state: n_quanta < 1.0,
    })
}

/// Adaptive Simpson quadrature with interval subdivision until the local
/// Richardson estimate meets the tolerance.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 64)
}

/// Numerically integrates `|χ(ω)|²` for the frozen-coefficient Lorentzian
/// and returns the relative deviation from the analytic value
/// `π / (I ω_eff² D_eff)`. The symmetric integration window is widened until
/// the analytic tail bound drops below 1e-6 of the accumulated integral.
pub fn equipartition_integral_check(
    moment_of_inertia: f64,
    omega_eff: f64,
    d_eff: f64,
) -> Result<f64, ThermoError> {
    if d_eff <= 0.0 {
        return Err(ThermoError::NonPositiveDamping(d_eff));
    }
    if moment_of_inertia <= 0.0 || omega_eff <= 0.0 {
        return Err(ThermoError::BadOscillator);
    }
    let inertia_sq = moment_of_inertia * moment_of_inertia;
    let chi_sq = |w: f64| {
        let d = omega_eff * omega_eff - w * w;
        1.0 / (inertia_sq * d * d + d_eff * d_eff * w * w)
    };

    // |chi|^2 is even: integrate [0, w_max] and double. Start past the peak
    // and widen until the tail (bounded by 16/(9 I² ω⁴) for ω ≥ 2 ω_eff)
    // is negligible.
    let linewidth = d_eff / moment_of_inertia;
    let mut w_max = 8.0 * (omega_eff + linewidth);
    let analytic = std::f64::consts::PI / (moment_of_inertia * omega_eff * omega_eff * d_eff);
    let mut integral;
    loop {
        integral = 2.0 * adaptive_simpson(&chi_sq, 0.0, w_max, 1e-9 * analytic / 2.0);
        let tail = 2.0 * 16.0 / (27.0 * inertia_sq * w_max * w_max * w_max);
        if tail < 1e-6 * integral.abs() {
            break;
        }
        w_max *= 2.0;
    }
    Ok((integral - analytic) / analytic)
}
