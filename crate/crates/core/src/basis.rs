//! Energy eigenbasis ↔ lab Pauli basis.
//!
//! D₀ = |+⟩⟨+| − |−⟩⟨−| = n·σ with n = (Δ̃, 0, ε̃), and
//! D₊ = |+⟩⟨−| = −(m + i e_y)·σ/2 with m = (ε̃, 0, −Δ̃), D₋ = D₊†.
//! The overall −1 on D₊ is the phase for which the Heisenberg generator
//! of the master equation has exactly the entries of the Bloch matrix
//! (in particular A₃₁ = A₃₂ = −ε̃Δ̃γ). (m, e_y, n) is a right-handed frame.
//!
//! Both the spectral direction mapping and the dynamics oracle go through
//! this module, so there is a single phase convention.

use num_complex::Complex64;

use crate::linalg::{c, Vec3, C3};
use crate::model::SystemParams;

/// Phase of |+⟩⟨−| relative to (m + i e_y)·σ/2.
pub const RAISING_PHASE: f64 = -1.0;

pub const E_Y: Vec3 = [0.0, 1.0, 0.0];

/// n = (Δ̃, 0, ε̃).
pub fn n_axis(params: &SystemParams) -> Vec3 {
    params.hamiltonian_direction()
}

/// m = (ε̃, 0, −Δ̃).
pub fn m_axis(params: &SystemParams) -> Vec3 {
    [params.eps_tilde(), 0.0, -params.delta_tilde()]
}

/// Lab-frame coefficient vector a with D₊ = a·σ.
pub fn raising_vector(params: &SystemParams) -> C3 {
    let m = m_axis(params);
    let k = 0.5 * RAISING_PHASE;
    [
        c(k * m[0], k * E_Y[0]),
        c(k * m[1], k * E_Y[1]),
        c(k * m[2], k * E_Y[2]),
    ]
}

/// (⟨D₊⟩, ⟨D₋⟩, ⟨D₀⟩) in the state ρ = (I + r·σ)/2.
pub fn expectations_from_bloch(r: &Vec3, params: &SystemParams) -> C3 {
    let a = raising_vector(params);
    let n = n_axis(params);
    let plus = a[0] * r[0] + a[1] * r[1] + a[2] * r[2];
    [plus, plus.conj(), c(n[0] * r[0] + n[1] * r[1] + n[2] * r[2], 0.0)]
}

/// Inverse of [`expectations_from_bloch`]; uses only ⟨D₊⟩ and Re⟨D₀⟩.
pub fn bloch_from_expectations(v: &C3, params: &SystemParams) -> Vec3 {
    let m = m_axis(params);
    let n = n_axis(params);
    let m_r = 2.0 * RAISING_PHASE * v[0].re;
    let y_r = 2.0 * RAISING_PHASE * v[0].im;
    let n_r = v[2].re;
    [
        m_r * m[0] + y_r * E_Y[0] + n_r * n[0],
        m_r * m[1] + y_r * E_Y[1] + n_r * n[1],
        m_r * m[2] + y_r * E_Y[2] + n_r * n[2],
    ]
}

/// Maps an operator c₊D₊ + c₋D₋ + c₀D₀ to its lab Pauli vector. Returns the
/// real part and the norm of the imaginary part; the latter vanishes iff the
/// operator is Hermitian.
pub fn operator_to_lab(coeffs: &C3, params: &SystemParams) -> (Vec3, f64) {
    let a = raising_vector(params);
    let n = n_axis(params);
    let mut re = [0.0; 3];
    let mut im_sq = 0.0;
    for k in 0..3 {
        let v: Complex64 = coeffs[0] * a[k] + coeffs[1] * a[k].conj() + coeffs[2] * n[k];
        re[k] = v.re;
        im_sq += v.im * v.im;
    }
    (re, im_sq.sqrt())
}
