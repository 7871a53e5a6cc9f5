//! Linearized fluctuation dynamics around a steady state.
//!
//! The fluctuation vector is `u = (δX_a, δY_a, δφ, δL_z)` with the field
//! quadratures `δX_a = (δa + δa†)/√2`, `δY_a = (δa − δa†)/(i√2)`, and obeys
//! `u̇ = B u + n(t)`. First-order expansion of the equations of motion
//! around the steady state gives
//!
//! ```text
//!     ⎛   −γ/2        Δ          0        0    ⎞
//! B = ⎜   −Δ        −γ/2     √2 ξ a_s     0    ⎟
//!     ⎜    0          0          0       1/I   ⎟
//!     ⎝ √2 ħ ξ a_s    0      −I ω_φ²   −D_φ/I  ⎠
//! ```
//!
//! (see `docs/derivation.md` for the full derivation). The entries are not
//! taken on faith: the closed-form susceptibility evaluated from the
//! effective frequency/damping expressions must agree with the transfer
//! function obtained by inverting `(−iω·1 − B)`, and the test suite enforces
//! that equivalence to 1e-9 relative over wide frequency grids.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use num_complex::Complex64;
use thiserror::Error;

use crate::constants::HBAR;
use crate::params::SystemParams;
use crate::steady::{clamped_detuning_state, SteadyState};

/// Index of δφ in the fluctuation vector.
const ANGLE_ROW: usize = 2;
/// Index of δL_z in the fluctuation vector.
const TORQUE_ROW: usize = 3;

/// Hurwitz determinants below this relative size are treated as marginal.
const MARGINAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ResponseError {
    #[error("drift matrix contains a non-finite entry")]
    NonFinite,
    #[error("response has a pole at angular frequency {0}")]
    Pole(f64),
}

/// Linearization of the fluctuation dynamics around one steady state.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    pub matrix: Matrix4<f64>,
    /// steady state this linearization is anchored to
    pub steady: SteadyState,
}

/// Drift matrix for a single-beam system around the given steady state.
pub fn drift_matrix(sys: &SystemParams, steady: &SteadyState) -> DriftMatrix {
    let gamma = sys.linewidth();
    let delta = steady.full_detuning;
    let xi = sys.coupling();
    let a_s = steady.amplitude;
    let inertia = sys.moment_of_inertia();
    let omega_phi = sys.omega_phi();
    let d_phi = sys.damping_constant();
    let g = std::f64::consts::SQRT_2 * xi * a_s;

    let matrix = Matrix4::new(
        -0.5 * gamma, delta,        0.0,                      0.0,
        -delta,       -0.5 * gamma, g,                        0.0,
        0.0,          0.0,          0.0,                      1.0 / inertia,
        HBAR * g,     0.0,          -inertia * omega_phi * omega_phi, -d_phi / inertia,
    );
    DriftMatrix {
        matrix,
        steady: steady.clone(),
    }
}

/// Composite drift matrix for all beams under clamped detuning, state
/// ordering `(δX_1, δY_1, …, δX_k, δY_k, δφ, δL_z)`. Each beam keeps its own
/// intracavity field; the radiation torques add.
pub fn system_drift_matrix(sys: &SystemParams) -> DMatrix<f64> {
    let k = sys.beams().len();
    let dim = 2 * k + 2;
    let gamma = sys.linewidth();
    let xi = sys.coupling();
    let inertia = sys.moment_of_inertia();
    let omega_phi = sys.omega_phi();
    let d_phi = sys.damping_constant();

    let mut m = DMatrix::zeros(dim, dim);
    let (phi, lz) = (dim - 2, dim - 1);
    for (j, beam) in sys.beams().iter().enumerate() {
        let ss = clamped_detuning_state(sys, beam, beam.detuning);
        let g = std::f64::consts::SQRT_2 * xi * ss.amplitude;
        let (x, y) = (2 * j, 2 * j + 1);
        m[(x, x)] = -0.5 * gamma;
        m[(x, y)] = ss.full_detuning;
        m[(y, x)] = -ss.full_detuning;
        m[(y, y)] = -0.5 * gamma;
        m[(y, phi)] = g;
        m[(lz, x)] = HBAR * g;
    }
    m[(phi, lz)] = 1.0 / inertia;
    m[(lz, phi)] = -inertia * omega_phi * omega_phi;
    m[(lz, lz)] = -d_phi / inertia;
    m
}

/// Stability classification of a linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityVerdict {
    Stable,
    Unstable,
    /// some stability determinant sits within tolerance of zero
    Marginal,
}

/// Monic characteristic polynomial of a square matrix by the
/// Faddeev–LeVerrier recursion; coefficients in descending powers,
/// `[1, c_1, …, c_n]`.
pub fn characteristic_polynomial(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(1.0);
    let mut aux = m.clone();
    for k in 1..=n {
        let c = -aux.trace() / k as f64;
        coeffs.push(c);
        if k < n {
            for i in 0..n {
                aux[(i, i)] += c;
            }
            aux = m * aux;
        }
    }
    coeffs
}

/// Hurwitz determinant chain for a monic quartic
/// `s⁴ + a₁s³ + a₂s² + a₃s + a₄`: stable iff every determinant is strictly
/// positive; any determinant within [`MARGINAL_TOL`] of zero relative to its
/// own term scale is marginal.
pub fn hurwitz_quartic(coeffs: &[f64; 5]) -> StabilityVerdict {
    let (a1, a2, a3, a4) = (
        coeffs[1] / coeffs[0],
        coeffs[2] / coeffs[0],
        coeffs[3] / coeffs[0],
        coeffs[4] / coeffs[0],
    );
    let d1 = a1;
    let d2 = a1 * a2 - a3;
    let d3 = a3 * d2 - a1 * a1 * a4;
    let d4 = a4 * d3;
    let scales = [
        a1.abs(),
        (a1 * a2).abs() + a3.abs(),
        (a3 * d2).abs() + (a1 * a1 * a4).abs(),
        (a4 * d3).abs(),
    ];
    let mut verdict = StabilityVerdict::Stable;
    for (d, scale) in [d1, d2, d3, d4].into_iter().zip(scales) {
        if !d.is_finite() {
            return StabilityVerdict::Unstable;
        }
        if d.abs() <= MARGINAL_TOL * scale.max(f64::MIN_POSITIVE) {
            verdict = StabilityVerdict::Marginal;
        } else if d < 0.0 {
            return StabilityVerdict::Unstable;
        }
    }
    verdict
}

/// Routh array for a polynomial of any degree (descending coefficients,
/// leading coefficient positive): stable iff the first column keeps its
/// sign. A first-column entry within tolerance of zero is marginal.
pub fn routh_array_stable(coeffs: &[f64]) -> StabilityVerdict {
    let n = coeffs.len() - 1;
    if n == 0 {
        return StabilityVerdict::Stable;
    }
    let width = n / 2 + 1;
    let mut prev: Vec<f64> = (0..width)
        .map(|i| coeffs.get(2 * i).copied().unwrap_or(0.0))
        .collect();
    let mut curr: Vec<f64> = (0..width)
        .map(|i| coeffs.get(2 * i + 1).copied().unwrap_or(0.0))
        .collect();

    fn check(verdict: &mut StabilityVerdict, pivot: f64, scale: f64) {
        if !pivot.is_finite() {
            *verdict = StabilityVerdict::Unstable;
        } else if pivot.abs() <= MARGINAL_TOL * scale.max(f64::MIN_POSITIVE) {
            if *verdict == StabilityVerdict::Stable {
                *verdict = StabilityVerdict::Marginal;
            }
        } else if pivot < 0.0 {
            *verdict = StabilityVerdict::Unstable;
        }
    }
    let mut verdict = StabilityVerdict::Stable;
    check(
        &mut verdict,
        prev[0],
        prev.iter().map(|x| x.abs()).fold(0.0, f64::max),
    );
    check(
        &mut verdict,
        curr[0],
        curr.iter().map(|x| x.abs()).fold(0.0, f64::max),
    );

    for _ in 2..=n {
        if verdict == StabilityVerdict::Unstable {
            return verdict;
        }
        let mut next = vec![0.0; width];
        let mut scale = 0.0f64;
        for i in 0..width - 1 {
            let t1 = curr[0] * prev[i + 1];
            let t2 = prev[0] * curr[i + 1];
            next[i] = (t1 - t2) / curr[0];
            if i == 0 {
                scale = (t1.abs() + t2.abs()) / curr[0].abs();
            }
        }
        check(&mut verdict, next[0], scale);
        prev = curr;
        curr = next;
    }
    verdict
}

/// Routh–Hurwitz verdict for a single-beam drift matrix via the quartic
/// Hurwitz determinant chain.
pub fn routh_hurwitz_stable(b: &DriftMatrix) -> Result<StabilityVerdict, ResponseError> {
    if b.matrix.iter().any(|x| !x.is_finite()) {
        return Err(ResponseError::NonFinite);
    }
    let dm = DMatrix::from_fn(4, 4, |i, j| b.matrix[(i, j)]);
    let c = characteristic_polynomial(&dm);
    Ok(hurwitz_quartic(&[c[0], c[1], c[2], c[3], c[4]]))
}

/// Routh–Hurwitz verdict for the full clamped multi-beam system.
pub fn system_stability(sys: &SystemParams) -> Result<StabilityVerdict, ResponseError> {
    let m = system_drift_matrix(sys);
    if m.iter().any(|x| !x.is_finite()) {
        return Err(ResponseError::NonFinite);
    }
    Ok(routh_array_stable(&characteristic_polynomial(&m)))
}

/// Per-beam radiation contribution to the effective response at one
/// frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamContribution {
    pub label_index: usize,
    /// contribution to ω_eff², (rad/s)²
    pub spring: f64,
    /// contribution to D_eff, kg·m²/s
    pub damping: f64,
}

/// Effective linear response of the mirror at a chosen evaluation frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseResult {
    /// (rad/s)², may be negative (anti-trapped)
    pub omega_eff_sq: f64,
    /// kg·m²/s, may be non-positive (anti-damped)
    pub d_eff: f64,
    pub per_beam: Vec<BeamContribution>,
    pub anti_trapped: bool,
    pub anti_damped: bool,
    /// rad/s, frequency the beam terms were evaluated at
    pub eval_omega: f64,
    /// optional sampled susceptibility (ω, χ(ω))
    pub chi_samples: Option<Vec<(f64, Complex64)>>,
}

impl ResponseResult {
    /// rad/s; `None` when anti-trapped.
    pub fn omega_eff(&self) -> Option<f64> {
        (self.omega_eff_sq > 0.0).then(|| self.omega_eff_sq.sqrt())
    }
}

/// Frequency-dependent radiation spring/damping of one beam under clamped
/// detuning:
///
/// ```text
/// Δω²(ω) = − (2 ξ² γ P / (I ω_c)) · Δ/(Δ² + γ²/4)
///            · [(γ/2)² − (ω² − Δ²)] / {[(γ/2)² + (ω−Δ)²][(γ/2)² + (ω+Δ)²]}
/// ΔD(ω)  = + (2 ξ² γ P / ω_c) · Δ/(Δ² + γ²/4)
///            · γ / {[(γ/2)² + (ω−Δ)²][(γ/2)² + (ω+Δ)²]}
/// ```
fn beam_terms(sys: &SystemParams, beam_index: usize, omega: f64) -> BeamContribution {
    let beam = &sys.beams()[beam_index];
    let gamma = sys.linewidth();
    let delta = beam.detuning;
    let xi = sys.coupling();
    let half = 0.5 * gamma;

    let prefactor = 2.0 * xi * xi * gamma * beam.input_power / sys.optical_angular_frequency()
        * delta
        / (delta * delta + half * half);
    let denom = (half * half + (omega - delta) * (omega - delta))
        * (half * half + (omega + delta) * (omega + delta));
    let numer_spring = half * half - (omega * omega - delta * delta);

    BeamContribution {
        label_index: beam_index,
        spring: -prefactor / sys.moment_of_inertia() * numer_spring / denom,
        damping: prefactor * gamma / denom,
    }
}

/// Effective frequency and damping with the beam terms evaluated at
/// `eval_omega`.
pub fn effective_params_at(sys: &SystemParams, eval_omega: f64) -> ResponseResult {
    let omega_phi = sys.omega_phi();
    let mut omega_eff_sq = omega_phi * omega_phi;
    let mut d_eff = sys.damping_constant();
    let per_beam: Vec<BeamContribution> = (0..sys.beams().len())
        .map(|j| beam_terms(sys, j, eval_omega))
        .collect();
    for c in &per_beam {
        omega_eff_sq += c.spring;
        d_eff += c.damping;
    }
    ResponseResult {
        omega_eff_sq,
        d_eff,
        per_beam,
        anti_trapped: omega_eff_sq <= 0.0,
        anti_damped: d_eff <= 0.0,
        eval_omega,
        chi_samples: None,
    }
}

/// Effective frequency and damping at the bare mechanical resonance, the
/// default evaluation point.
pub fn effective_params(sys: &SystemParams) -> ResponseResult {
    effective_params_at(sys, sys.omega_phi())
}

/// Self-consistent evaluation: iterate the evaluation frequency to the fixed
/// point ω = ω_eff(ω). Exploration mode; returns the last iterate with the
/// anti-trapped flag set if the iteration leaves the trapped regime.
pub fn effective_params_self_consistent(sys: &SystemParams) -> ResponseResult {
    let mut omega = sys.omega_phi();
    let mut result = effective_params_at(sys, omega);
    for _ in 0..200 {
        let Some(next) = result.omega_eff() else {
            return result;
        };
        if (next - omega).abs() <= 1e-12 * omega.abs().max(next.abs()) {
            return result;
        }
        omega = next;
        result = effective_params_at(sys, omega);
    }
    result
}

/// Closed-form susceptibility `χ(ω) = 1 / [I(ω_eff²(ω) − ω²) − i D_eff(ω) ω]`
/// with the frequency-dependent beam terms summed over all beams.
pub fn chi_closed_form(sys: &SystemParams, omega: f64) -> Result<Complex64, ResponseError> {
    let r = effective_params_at(sys, omega);
    let inv = Complex64::new(
        sys.moment_of_inertia() * (r.omega_eff_sq - omega * omega),
        -r.d_eff * omega,
    );
    if inv.norm_sqr() == 0.0 {
        return Err(ResponseError::Pole(omega));
    }
    Ok(inv.inv())
}

/// Susceptibility from the drift matrix: solve `(−iω·1 − B) u = n` for a
/// unit torque input on the δL_z row and return the δφ component. This is
/// the independent frequency-domain route used to validate both the matrix
/// entries and the closed form.
pub fn chi_from_matrix(b: &DriftMatrix, omega: f64) -> Result<Complex64, ResponseError> {
    if b.matrix.iter().any(|x| !x.is_finite()) {
        return Err(ResponseError::NonFinite);
    }
    let mut m = b.matrix.map(|x| Complex64::new(-x, 0.0));
    for i in 0..4 {
        m[(i, i)] -= Complex64::new(0.0, omega);
    }
    let mut rhs = Vector4::from_element(Complex64::new(0.0, 0.0));
    rhs[TORQUE_ROW] = Complex64::new(1.0, 0.0);
    m.lu()
        .solve(&rhs)
        .map(|u| u[ANGLE_ROW])
        .ok_or(ResponseError::Pole(omega))
}

/// Sampled closed-form susceptibility over a frequency grid.
pub fn sample_chi(sys: &SystemParams, omegas: &[f64]) -> Vec<(f64, Complex64)> {
    omegas
        .iter()
        .map(|&w| {
            let chi = chi_closed_form(sys, w).unwrap_or(Complex64::new(f64::INFINITY, 0.0));
            (w, chi)
        })
        .collect()
}

/// Eigenvalues of the composite clamped drift matrix; handy for diagnostics
/// and as an independent stability cross-check in tests.
pub fn system_eigenvalues(sys: &SystemParams) -> Vec<Complex64> {
    let m = system_drift_matrix(sys);
    eigenvalues(&m)
}

/// Complex eigenvalues of a real square matrix.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect()
}

/// Noise input vector scale for the fluctuation equations: `n(t) =
/// (√γ δX_in, √γ δY_in, 0, δε)`. Only the torque row drives the Brownian
/// thermometry paths; exposed for spectral diagnostics.
pub fn torque_noise_row() -> DVector<f64> {
    let mut v = DVector::zeros(4);
    v[TORQUE_ROW] = 1.0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{build_system, RawBeam, RawCavity, RawConfig, RawEnv, RawMirror};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn paper_like(beams: Vec<(f64, f64, &str)>) -> SystemParams {
        let raw = RawConfig {
            mirror: RawMirror {
                mass: Some(1e-8),
                radius: Some(1e-5),
                omega_phi: Some(TAU * 2500.0),
                quality_factor: Some(1e5),
                damping_constant: None,
            },
            cavity: RawCavity {
                length: Some(1e-3),
                linewidth: Some(TAU * 1e7),
                topological_charge: Some(100),
                optical_angular_frequency: None,
                wavelength: Some(1064e-9),
            },
            beam: beams
                .into_iter()
                .map(|(p, d, l)| RawBeam {
                    input_power: Some(p),
                    detuning: Some(d),
                    label: Some(l.to_owned()),
                })
                .collect(),
            env: RawEnv {
                temperature: Some(300.0),
            },
        };
        build_system(&raw).unwrap()
    }

    fn gamma() -> f64 {
        TAU * 1e7
    }

    #[test]
    fn decoupled_when_charge_zero() {
        let mut sys = paper_like(vec![(4e-3, 0.5 * gamma(), "cool")]);
        let mut raw = sys.to_raw();
        raw.cavity.topological_charge = Some(0);
        sys = crate::params::build_system(&raw).unwrap();
        let ss = clamped_detuning_state(&sys, &sys.beams()[0], 0.5 * gamma());
        let b = drift_matrix(&sys, &ss);
        assert_eq!(b.matrix[(1, 2)], 0.0);
        assert_eq!(b.matrix[(3, 0)], 0.0);
    }

    #[test]
    fn decoupled_when_undriven() {
        let sys = paper_like(vec![(0.0, 0.5 * gamma(), "cool")]);
        let ss = clamped_detuning_state(&sys, &sys.beams()[0], 0.5 * gamma());
        let b = drift_matrix(&sys, &ss);
        assert_eq!(b.matrix[(1, 2)], 0.0);
        assert_eq!(b.matrix[(3, 0)], 0.0);
    }

    #[test]
    fn cooling_beam_linearization_is_stable_with_negative_eigenvalues() {
        let sys = paper_like(vec![(4e-3, 0.5 * gamma(), "cool")]);
        let ss = clamped_detuning_state(&sys, &sys.beams()[0], 0.5 * gamma());
        let b = drift_matrix(&sys, &ss);
        assert_eq!(routh_hurwitz_stable(&b).unwrap(), StabilityVerdict::Stable);
        let dm = DMatrix::from_fn(4, 4, |i, j| b.matrix[(i, j)]);
        for ev in eigenvalues(&dm) {
            assert!(ev.re < 0.0, "eigenvalue {ev} not in the left half-plane");
        }
    }

    #[test]
    fn negative_identity_is_stable() {
        let ss = SteadyState {
            amplitude: 0.0,
            angle: 0.0,
            angular_momentum: 0.0,
            photon_number: 0.0,
            branch_index: 0,
            full_detuning: 0.0,
            residuals: (0.0, 0.0),
        };
        let b = DriftMatrix {
            matrix: -Matrix4::identity(),
            steady: ss.clone(),
        };
        assert_eq!(routh_hurwitz_stable(&b).unwrap(), StabilityVerdict::Stable);

        let mut m = -Matrix4::identity();
        m[(0, 0)] = 1.0;
        let b = DriftMatrix { matrix: m, steady: ss };
        assert_eq!(routh_hurwitz_stable(&b).unwrap(), StabilityVerdict::Unstable);
    }

    #[test]
    fn rejects_non_finite_matrix() {
        let ss = SteadyState {
            amplitude: 0.0,
            angle: 0.0,
            angular_momentum: 0.0,
            photon_number: 0.0,
            branch_index: 0,
            full_detuning: 0.0,
            residuals: (0.0, 0.0),
        };
        let mut m = -Matrix4::identity();
        m[(2, 1)] = f64::NAN;
        let b = DriftMatrix { matrix: m, steady: ss };
        assert_eq!(routh_hurwitz_stable(&b), Err(ResponseError::NonFinite));
    }

    #[test]
    fn characteristic_polynomial_known_case() {
        // companion matrix of s^2 - 3s + 2 = (s-1)(s-2)
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 1.0, 3.0]);
        let c = characteristic_polynomial(&m);
        assert_relative_eq!(c[0], 1.0);
        assert_relative_eq!(c[1], -3.0);
        assert_relative_eq!(c[2], 2.0);
    }

    #[test]
    fn bare_static_compliance() {
        let sys = paper_like(vec![(0.0, 0.0, "off")]);
        let chi = chi_closed_form(&sys, 0.0).unwrap();
        let expected = 1.0 / (sys.moment_of_inertia() * sys.omega_phi().powi(2));
        assert_relative_eq!(chi.re, expected, max_relative = 1e-12);
        assert_relative_eq!(chi.im, 0.0);
    }

    #[test]
    fn bare_resonance_is_imaginary() {
        let sys = paper_like(vec![(0.0, 0.0, "off")]);
        let w = sys.omega_phi();
        let chi = chi_closed_form(&sys, w).unwrap();
        let expected = 1.0 / (sys.damping_constant() * w);
        assert_relative_eq!(chi.im, expected, max_relative = 1e-12);
        assert!(chi.re.abs() < 1e-6 * chi.im.abs());
    }

    #[test]
    fn matrix_route_recovers_bare_lorentzian() {
        let sys = paper_like(vec![(0.0, 0.0, "off")]);
        let ss = clamped_detuning_state(&sys, &sys.beams()[0], 0.0);
        let b = drift_matrix(&sys, &ss);
        for w in [0.0, 0.3 * sys.omega_phi(), sys.omega_phi(), 5.0 * sys.omega_phi()] {
            let chi_m = chi_from_matrix(&b, w).unwrap();
            let inv = Complex64::new(
                sys.moment_of_inertia() * (sys.omega_phi().powi(2) - w * w),
                -sys.damping_constant() * w,
            );
            let chi_ref = inv.inv();
            assert_relative_eq!(chi_m.re, chi_ref.re, max_relative = 1e-10);
            assert_relative_eq!(chi_m.im, chi_ref.im, max_relative = 1e-10);
        }
    }

    #[test]
    fn closed_form_matches_matrix_route_on_published_preset() {
        let sys = paper_like(vec![(4e-3, 0.5 * gamma(), "cool")]);
        let beam = &sys.beams()[0];
        let ss = clamped_detuning_state(&sys, beam, beam.detuning);
        let b = drift_matrix(&sys, &ss);
        let mut worst = 0.0f64;
        for i in 0..1000 {
            let w = 10.0 * gamma() * (i as f64 + 0.5) / 1000.0;
            let c1 = chi_closed_form(&sys, w).unwrap();
            let c2 = chi_from_matrix(&b, w).unwrap();
            let rel = (c1 - c2).norm() / c1.norm().max(c2.norm());
            worst = worst.max(rel);
        }
        assert!(worst < 1e-9, "worst relative mismatch {worst}");
    }

    #[test]
    fn no_power_gives_bare_values_exactly() {
        let sys = paper_like(vec![(0.0, -2.5 * gamma(), "trap"), (0.0, 0.5 * gamma(), "cool")]);
        let r = effective_params(&sys);
        assert_eq!(r.omega_eff_sq, sys.omega_phi() * sys.omega_phi());
        assert_eq!(r.d_eff, sys.damping_constant());
        assert!(!r.anti_trapped && !r.anti_damped);
    }

    #[test]
    fn zero_detuning_beam_contributes_nothing() {
        let sys = paper_like(vec![(0.25, 0.0, "trap")]);
        let r = effective_params(&sys);
        assert_eq!(r.per_beam[0].spring, 0.0);
        assert_eq!(r.per_beam[0].damping, 0.0);
    }

    #[test]
    fn published_two_beam_preset_values() {
        // frozen from an independent evaluation of the effective-response
        // expressions at omega = omega_phi with the 1064 nm assumption
        let sys = paper_like(vec![
            (0.25, -2.5 * gamma(), "trap"),
            (4e-3, 0.5 * gamma(), "cool"),
        ]);
        let r = effective_params(&sys);
        assert_relative_eq!(r.omega_eff_sq, 3.4943679964989243e12, max_relative = 1e-9);
        assert_relative_eq!(r.d_eff, 5.6177127221238155e-14, max_relative = 1e-9);
        assert_relative_eq!(
            r.omega_eff().unwrap() / sys.omega_phi(),
            119.00479006950526,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            r.d_eff / sys.damping_constant(),
            715269.3988769857,
            max_relative = 1e-9
        );
    }

    #[test]
    fn trap_and_cool_sign_structure() {
        let sys = paper_like(vec![
            (0.25, -2.5 * gamma(), "trap"),
            (4e-3, 0.5 * gamma(), "cool"),
        ]);
        let r = effective_params(&sys);
        let trap = &r.per_beam[0];
        let cool = &r.per_beam[1];
        assert!(trap.spring > 0.0 && trap.damping < 0.0);
        assert!(cool.spring < 0.0 && cool.damping > 0.0);
    }

    #[test]
    fn contributions_scale_exactly_with_charge_squared_and_power() {
        let mk = |l: u32, p: f64| {
            let mut raw = paper_like(vec![(p, 0.5 * gamma(), "cool")]).to_raw();
            raw.cavity.topological_charge = Some(l);
            build_system(&raw).unwrap()
        };
        let base = effective_params(&mk(1, 4e-3)).per_beam[0];
        let l2 = effective_params(&mk(2, 4e-3)).per_beam[0];
        let l4 = effective_params(&mk(4, 4e-3)).per_beam[0];
        assert_eq!(l2.damping, 4.0 * base.damping);
        assert_eq!(l4.damping, 16.0 * base.damping);
        assert_eq!(l2.spring, 4.0 * base.spring);
        assert_eq!(l4.spring, 16.0 * base.spring);

        let p2 = effective_params(&mk(1, 8e-3)).per_beam[0];
        assert_eq!(p2.damping, 2.0 * base.damping);
        assert_eq!(p2.spring, 2.0 * base.spring);
    }

    #[test]
    fn self_consistent_mode_converges() {
        let sys = paper_like(vec![(4e-3, 0.5 * gamma(), "cool")]);
        let r = effective_params_self_consistent(&sys);
        let w = r.eval_omega;
        let check = effective_params_at(&sys, w);
        assert_relative_eq!(check.omega_eff().unwrap(), w, max_relative = 1e-9);
    }

    #[test]
    fn single_beam_system_stability_agrees_with_quartic_chain() {
        for (p, d) in [
            (4e-3, 0.5 * gamma()),
            (0.25, -2.5 * gamma()),
            (0.0, 0.0),
            (1e-2, 0.1 * gamma()),
        ] {
            let sys = paper_like(vec![(p, d, "b")]);
            let beam = &sys.beams()[0];
            let ss = clamped_detuning_state(&sys, beam, beam.detuning);
            let b = drift_matrix(&sys, &ss);
            assert_eq!(
                system_stability(&sys).unwrap(),
                routh_hurwitz_stable(&b).unwrap(),
                "p={p} d={d}"
            );
        }
    }

    #[test]
    fn published_two_beam_system_is_stable() {
        let sys = paper_like(vec![
            (0.25, -2.5 * gamma(), "trap"),
            (4e-3, 0.5 * gamma(), "cool"),
        ]);
        assert_eq!(system_stability(&sys).unwrap(), StabilityVerdict::Stable);
        // trap beam alone anti-damps the mirror
        let trap_only = sys.with_beams(vec![sys.beams()[0].clone()]).unwrap();
        assert_eq!(
            system_stability(&trap_only).unwrap(),
            StabilityVerdict::Unstable
        );
    }

    proptest! {
        // Routh-Hurwitz verdict agrees with the eigenvalue sign outside the
        // marginal band.
        #[test]
        fn routh_hurwitz_agrees_with_eigenvalues(entries in prop::array::uniform16(-1.0f64..1.0)) {
            let m = Matrix4::from_row_slice(&entries);
            let dm = DMatrix::from_fn(4, 4, |i, j| m[(i, j)]);
            let evs = eigenvalues(&dm);
            let max_re = evs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            let spectral = evs.iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assume!(max_re.abs() > 1e-6 * spectral.max(1e-30));

            let ss = SteadyState {
                amplitude: 0.0, angle: 0.0, angular_momentum: 0.0,
                photon_number: 0.0, branch_index: 0, full_detuning: 0.0,
                residuals: (0.0, 0.0),
            };
            let verdict = routh_hurwitz_stable(&DriftMatrix { matrix: m, steady: ss }).unwrap();
            prop_assume!(verdict != StabilityVerdict::Marginal);
            let expected = if max_re < 0.0 {
                StabilityVerdict::Stable
            } else {
                StabilityVerdict::Unstable
            };
            prop_assert_eq!(verdict, expected);
        }

        // generic Routh array and the quartic Hurwitz chain agree
        #[test]
        fn routh_array_matches_hurwitz_chain(entries in prop::array::uniform16(-1.0f64..1.0)) {
            let m = DMatrix::from_row_slice(4, 4, &entries);
            let c = characteristic_polynomial(&m);
            let chain = hurwitz_quartic(&[c[0], c[1], c[2], c[3], c[4]]);
            let array = routh_array_stable(&c);
            prop_assume!(chain != StabilityVerdict::Marginal
                && array != StabilityVerdict::Marginal);
            prop_assert_eq!(chain, array);
        }

        // with no rotational coupling, damped oscillators are always stable
        #[test]
        fn uncoupled_always_stable(
            q in 1.0f64..1e8,
            omega_exp in 2.0f64..6.0,
            gamma_exp in 5.0f64..9.0,
            power in 0.0f64..1.0,
            detuning in -5.0f64..5.0,
        ) {
            let raw = RawConfig {
                mirror: RawMirror {
                    mass: Some(1e-8),
                    radius: Some(1e-5),
                    omega_phi: Some(10f64.powf(omega_exp)),
                    quality_factor: Some(q),
                    damping_constant: None,
                },
                cavity: RawCavity {
                    length: Some(1e-3),
                    linewidth: Some(10f64.powf(gamma_exp)),
                    topological_charge: Some(0),
                    optical_angular_frequency: Some(1.77e15),
                    wavelength: None,
                },
                beam: vec![RawBeam {
                    input_power: Some(power),
                    detuning: Some(detuning * 10f64.powf(gamma_exp)),
                    label: None,
                }],
                env: RawEnv { temperature: Some(300.0) },
            };
            let sys = build_system(&raw).unwrap();
            prop_assert_eq!(system_stability(&sys).unwrap(), StabilityVerdict::Stable);
        }

        // sign structure at the default evaluation point in the fast-cavity
        // regime: positive detuning damps and softens, negative stiffens and
        // anti-damps
        #[test]
        fn sign_structure(
            power in 1e-6f64..1.0,
            delta_units in 0.05f64..4.0,
            sign in prop::bool::ANY,
        ) {
            let delta = if sign { delta_units } else { -delta_units } * gamma();
            let sys = paper_like(vec![(power, delta, "b")]);
            let c = effective_params(&sys).per_beam[0];
            if delta > 0.0 {
                prop_assert!(c.damping > 0.0 && c.spring < 0.0);
            } else {
                prop_assert!(c.damping < 0.0 && c.spring > 0.0);
            }
        }
    }
}
