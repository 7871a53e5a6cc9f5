//! Steady states of the coupled field/angle equations.
//!
//! For a single drive the intracavity intensity and the equilibrium mirror
//! angle satisfy
//!
//! ```text
//! a_s² [ (γ/2)² + (δ − ξ φ_s)² ] = γ |a_in|²,    φ_s = ħ ξ a_s² / (I ω_φ²),
//! ```
//!
//! which collapses to a cubic in the photon number `n = a_s²`. All real
//! non-negative roots are returned as branches; three distinct branches is
//! the bistable regime. Static feedback on the cavity length removes the
//! angle pulling and fixes the detuning; [`clamped_detuning_state`] models
//! that operating mode and is what every linear-response path consumes.

use crate::constants::HBAR;
use crate::params::{BeamDrive, SystemParams};

/// One self-consistent steady-state branch. `angular_momentum` is always
/// exactly zero; it is kept as a field because downstream code treats the
/// triple (amplitude, angle, angular momentum) as the full state.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// dimensionless, real and non-negative by phase convention
    pub amplitude: f64,
    /// rad
    pub angle: f64,
    /// kg·m²/s, exactly 0
    pub angular_momentum: f64,
    /// intracavity photon number `a_s²`
    pub photon_number: f64,
    /// ascending in photon number
    pub branch_index: usize,
    /// rad/s, `Δ = δ − ξ φ_s`
    pub full_detuning: f64,
    /// relative residuals of the amplitude and angle relations
    pub residuals: (f64, f64),
}

/// Bistability classification for one drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bistability {
    pub bistable: bool,
    pub branch_count: usize,
    /// a double root sits within tolerance of the fold point
    pub marginal: bool,
}

/// Photon-number cubic for one beam:
/// `κ² n³ − 2 δ κ n² + ((γ/2)² + δ²) n − C = 0` with
/// `κ = ħ ξ² / (I ω_φ²)` (angle pull per photon times ξ) and
/// `C = γ |a_in|²`.
fn cubic_coefficients(sys: &SystemParams, beam: &BeamDrive) -> [f64; 4] {
    let gamma = sys.linewidth();
    let delta = beam.detuning;
    let xi = sys.coupling();
    let kappa = HBAR * xi * xi / (sys.moment_of_inertia() * sys.omega_phi() * sys.omega_phi());
    let drive = gamma * beam.input_photon_rate(sys.optical_angular_frequency());
    [
        kappa * kappa,
        -2.0 * delta * kappa,
        0.25 * gamma * gamma + delta * delta,
        -drive,
    ]
}

fn eval_cubic(c: &[f64; 4], x: f64) -> f64 {
    ((c[0] * x + c[1]) * x + c[2]) * x + c[3]
}

fn eval_cubic_derivative(c: &[f64; 4], x: f64) -> f64 {
    (3.0 * c[0] * x + 2.0 * c[1]) * x + c[2]
}

/// Real roots of `c[0] x³ + c[1] x² + c[2] x + c[3]` with `c[0] > 0`,
/// ascending. Roots closer than `1e-9` of the root scale are merged and
/// reported once with `double_root` set.
fn real_cubic_roots(c: &[f64; 4]) -> (Vec<f64>, bool) {
    // Monic form x³ + p x² + q x + r, then depressed t³ + a t + b with
    // x = t − p/3.
    let p = c[1] / c[0];
    let q = c[2] / c[0];
    let r = c[3] / c[0];
    let shift = -p / 3.0;
    let a = q - p * p / 3.0;
    let b = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;

    let disc = -4.0 * a * a * a - 27.0 * b * b;
    let scale = shift.abs().max(a.abs().sqrt()).max(b.abs().cbrt());

    let mut roots = if disc > 0.0 {
        // three real roots, trigonometric form (a < 0 here)
        let m = 2.0 * (-a / 3.0).sqrt();
        let arg = (3.0 * b / (a * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let third = 2.0 * std::f64::consts::PI / 3.0;
        vec![
            m * theta.cos() + shift,
            m * (theta - third).cos() + shift,
            m * (theta + third).cos() + shift,
        ]
    } else {
        // one real root, Cardano with the numerically benign branch
        let half_b = b / 2.0;
        let inner = (half_b * half_b + a * a * a / 27.0).max(0.0).sqrt();
        let u = (-half_b + inner).cbrt();
        let v = (-half_b - inner).cbrt();
        vec![u + v + shift]
    };

    // Newton polish against the original coefficients.
    for root in &mut roots {
        for _ in 0..4 {
            let f = eval_cubic(c, *root);
            let df = eval_cubic_derivative(c, *root);
            if df != 0.0 {
                let step = f / df;
                *root -= step;
                if step.abs() <= 1e-16 * root.abs().max(scale) {
                    break;
                }
            }
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).expect("cubic roots are finite"));

    // Merge near-coincident roots (fold points).
    let merge_tol = 1e-9 * roots.iter().fold(scale, |m, r| m.max(r.abs()));
    let mut merged: Vec<f64> = Vec::with_capacity(roots.len());
    let mut double_root = false;
    for r in roots {
        match merged.last() {
            Some(&last) if (r - last).abs() <= merge_tol => double_root = true,
            _ => merged.push(r),
        }
    }
    (merged, double_root)
}

fn branch_from_photon_number(
    sys: &SystemParams,
    beam: &BeamDrive,
    photon_number: f64,
    branch_index: usize,
) -> SteadyState {
    let n = photon_number.max(0.0);
    let xi = sys.coupling();
    let angle = HBAR * xi * n / (sys.moment_of_inertia() * sys.omega_phi() * sys.omega_phi());
    let full_detuning = beam.detuning - xi * angle;
    let amplitude = n.sqrt();

    let gamma = sys.linewidth();
    let drive = gamma * beam.input_photon_rate(sys.optical_angular_frequency());
    let lorentz = 0.25 * gamma * gamma + full_detuning * full_detuning;
    // amplitude relation in the squared form n·[(γ/2)² + Δ²] = γ|a_in|²
    let res_amp = (n * lorentz - drive).abs() / drive.abs().max(n * lorentz).max(f64::MIN_POSITIVE);
    let angle_rhs = HBAR * xi * n;
    let angle_lhs = angle * sys.moment_of_inertia() * sys.omega_phi() * sys.omega_phi();
    let res_angle =
        (angle_lhs - angle_rhs).abs() / angle_rhs.abs().max(angle_lhs.abs()).max(f64::MIN_POSITIVE);

    SteadyState {
        amplitude,
        angle,
        angular_momentum: 0.0,
        photon_number: n,
        branch_index,
        full_detuning,
        residuals: (res_amp, res_angle),
    }
}

/// All steady-state branches for one beam acting alone, ascending in photon
/// number. The undriven and uncoupled cases degenerate to a single branch.
pub fn steady_states(sys: &SystemParams, beam: &BeamDrive) -> Vec<SteadyState> {
    if beam.input_power == 0.0 {
        return vec![SteadyState {
            amplitude: 0.0,
            angle: 0.0,
            angular_momentum: 0.0,
            photon_number: 0.0,
            branch_index: 0,
            full_detuning: beam.detuning,
            residuals: (0.0, 0.0),
        }];
    }

    let c = cubic_coefficients(sys, beam);
    if c[0] == 0.0 {
        // no rotational backaction: plain Lorentzian response
        let n = -c[3] / c[2];
        return vec![branch_from_photon_number(sys, beam, n, 0)];
    }

    let (roots, _) = real_cubic_roots(&c);
    let n_scale = roots.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    roots
        .into_iter()
        .filter(|&n| n >= -1e-12 * n_scale)
        .enumerate()
        .map(|(i, n)| branch_from_photon_number(sys, beam, n, i))
        .collect()
}

/// Bistability verdict for one beam: true iff three distinct non-negative
/// branches coexist; a fold (double root) is reported as marginal.
pub fn is_bistable(sys: &SystemParams, beam: &BeamDrive) -> Bistability {
    if beam.input_power == 0.0 {
        return Bistability {
            bistable: false,
            branch_count: 1,
            marginal: false,
        };
    }
    let c = cubic_coefficients(sys, beam);
    if c[0] == 0.0 {
        return Bistability {
            bistable: false,
            branch_count: 1,
            marginal: false,
        };
    }
    let (roots, double_root) = real_cubic_roots(&c);
    let n_scale = roots.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let count = roots.iter().filter(|&&n| n >= -1e-12 * n_scale).count();
    Bistability {
        bistable: count == 3,
        branch_count: count,
        marginal: double_root,
    }
}

/// Steady state under static feedback: the cavity length is servoed so the
/// full static detuning stays at `target_full_detuning` regardless of the
/// radiation torque, which removes bistability and decouples the intensity
/// from the angle pull. This is the operating mode of every downstream
/// linear-response and thermometry path.
pub fn clamped_detuning_state(
    sys: &SystemParams,
    beam: &BeamDrive,
    target_full_detuning: f64,
) -> SteadyState {
    let gamma = sys.linewidth();
    let delta = target_full_detuning;
    let n = gamma * beam.input_photon_rate(sys.optical_angular_frequency())
        / (0.25 * gamma * gamma + delta * delta);
    let xi = sys.coupling();
    let angle = HBAR * xi * n / (sys.moment_of_inertia() * sys.omega_phi() * sys.omega_phi());
    SteadyState {
        amplitude: n.sqrt(),
        angle,
        angular_momentum: 0.0,
        photon_number: n,
        branch_index: 0,
        full_detuning: delta,
        residuals: (0.0, 0.0),
    }
}
