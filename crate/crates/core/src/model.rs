//! Model parameterization.
//!
//! Units: ħ = k_B = 1 and the bare level splitting Ω0 = 1. Temperature enters
//! as θ = k_BT/ħΩ0 and every rate is measured in units of Ω0. The spin
//! Hamiltonian is H_S = (Ω0/2)(ε̃σ_z + Δ̃σ_x) with ε̃² + Δ̃² = 1, and the
//! bath enters only through the dephasing strength γ = 2ηθ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant in meV/K, for the optional physical-unit input path.
pub const BOLTZMANN_MEV_PER_K: f64 = 8.617_333_262e-2;

/// Dimensionless model inputs. Construct through [`SystemParams::new`];
/// the fields are read-only afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SystemParams {
    eps_tilde: f64,
    eta: f64,
    theta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    eps_tilde: f64,
    eta: f64,
    theta: f64,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        SystemParams::new(raw.eps_tilde, raw.eta, raw.theta)
    }
}

impl From<SystemParams> for RawParams {
    fn from(p: SystemParams) -> Self {
        RawParams {
            eps_tilde: p.eps_tilde,
            eta: p.eta,
            theta: p.theta,
        }
    }
}

impl SystemParams {
    pub fn new(eps_tilde: f64, eta: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps_tilde) {
            return Err(Error::EpsTildeOutOfRange(eps_tilde));
        }
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidEta(eta));
        }
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::InvalidTheta(theta));
        }
        Ok(Self {
            eps_tilde,
            eta,
            theta,
        })
    }

    /// Same ε̃ and η at a different temperature.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.eps_tilde, self.eta, theta)
    }

    pub fn eps_tilde(&self) -> f64 {
        self.eps_tilde
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Ω0 in internal units.
    pub fn omega0(&self) -> f64 {
        1.0
    }

    /// Δ̃ = √(1 − ε̃²), always derived.
    pub fn delta_tilde(&self) -> f64 {
        (1.0 - self.eps_tilde * self.eps_tilde).max(0.0).sqrt()
    }

    /// Unit vector along H_S in the lab Pauli basis, (Δ̃, 0, ε̃).
    pub fn hamiltonian_direction(&self) -> [f64; 3] {
        [self.delta_tilde(), 0.0, self.eps_tilde]
    }
}

/// Converts a physical temperature and level splitting to θ.
pub fn theta_from_physical(kelvin: f64, hbar_omega0_mev: f64) -> Result<f64> {
    if !(hbar_omega0_mev.is_finite() && hbar_omega0_mev > 0.0) {
        return Err(Error::InvalidTheta(f64::NAN));
    }
    let theta = BOLTZMANN_MEV_PER_K * kelvin / hbar_omega0_mev;
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(Error::InvalidTheta(theta));
    }
    Ok(theta)
}

/// γ^θ/Ω0 = 2ηθ.
pub fn gamma_theta(params: &SystemParams) -> f64 {
    2.0 * params.eta * params.theta
}

/// Relaxation constants of the van Hove (weak-coupling) limit, where the
/// Bloch matrix is diagonal. The renormalized frequency Ω_R is not modeled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakCoupling {
    pub gamma_weak: f64,
    pub gamma_l: f64,
    pub gamma_t: f64,
}

impl WeakCoupling {
    fn from_gamma(params: &SystemParams, gamma_weak: f64) -> Self {
        let d = params.delta_tilde();
        let gamma_l = d * d * gamma_weak;
        Self {
            gamma_weak,
            gamma_l,
            gamma_t: gamma_l / 2.0,
        }
    }

    /// Γ_L/Γ_T; `None` when both vanish (Δ̃ = 0).
    pub fn ratio(&self) -> Option<f64> {
        (self.gamma_t != 0.0).then(|| self.gamma_l / self.gamma_t)
    }
}

/// Weak-coupling baseline with the Ohmic form factor 2π|g(Ω0)|² = ηΩ0:
/// γ = ηΩ0·coth(Ω0/2θ), Γ_L = Δ̃²γ, Γ_T = Γ_L/2.
///
/// At θ = 0 the coth form is singular as written; the error carries the
/// coth → 1 limit.
pub fn weak_coupling_constants(params: &SystemParams) -> Result<WeakCoupling> {
    let omega0 = params.omega0();
    if params.theta == 0.0 {
        return Err(Error::WeakCouplingZeroTemperature {
            limit: WeakCoupling::from_gamma(params, params.eta * omega0),
        });
    }
    let x = omega0 / (2.0 * params.theta);
    let coth = 1.0 / x.tanh();
    Ok(WeakCoupling::from_gamma(params, params.eta * omega0 * coth))
}
