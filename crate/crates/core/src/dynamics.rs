//! Time evolution of the spin: the master equation integrated directly in
//! density-matrix form, and the Bloch-matrix propagator it is checked
//! against.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::expectations_from_bloch;
use crate::bloch::BlochMatrix;
use crate::cubic::{root_scale, solve_cubic};
use crate::error::{Error, Result};
use crate::linalg::{self, adjugate, c, identity, matvec, norm1, shifted, CMat3, Vec3, C3, ZERO};
use crate::model::{gamma_theta, SystemParams};

/// Slack on |r| ≤ 1 during integration.
pub const BLOCH_BALL_TOL: f64 = 1e-10;

/// Relative eigenvalue separation below which the spectral propagator
/// hands over to scaling and squaring.
const SPECTRAL_SEPARATION_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityState {
    /// ρ = (I + r·σ)/2
    pub bloch_vector: Vec3,
}

impl DensityState {
    pub fn new(bloch_vector: Vec3) -> Result<Self> {
        let s = Self { bloch_vector };
        if !bloch_vector.iter().all(|x| x.is_finite()) || s.purity() > 1.0 + BLOCH_BALL_TOL {
            return Err(Error::InvalidIntegration(format!(
                "initial Bloch vector {bloch_vector:?} lies outside the unit ball"
            )));
        }
        Ok(s)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            bloch_vector: [0.0; 3],
        }
    }

    /// |r|
    pub fn purity(&self) -> f64 {
        linalg::norm(&self.bloch_vector)
    }

    pub fn density_matrix(&self) -> [[Complex64; 2]; 2] {
        let [x, y, z] = self.bloch_vector;
        [
            [c((1.0 + z) / 2.0, 0.0), c(x / 2.0, -y / 2.0)],
            [c(x / 2.0, y / 2.0), c((1.0 - z) / 2.0, 0.0)],
        ]
    }
}

/// (⟨D₊⟩, ⟨D₋⟩, ⟨D₀⟩) with ⟨D₋⟩ = ⟨D₊⟩* and real ⟨D₀⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationVector {
    pub v: C3,
}

impl ExpectationVector {
    pub fn from_state(rho: &DensityState, params: &SystemParams) -> Self {
        Self {
            v: expectations_from_bloch(&rho.bloch_vector, params),
        }
    }

    /// Deviation from the conjugate structure (v₂ = v₁*, v₃ real).
    pub fn conjugacy_defect(&self) -> f64 {
        (self.v[1] - self.v[0].conj()).norm().max(self.v[2].im.abs())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..3).map(|k| (self.v[k] - other.v[k]).norm()).fold(0.0, f64::max)
    }
}

type M2 = [[Complex64; 2]; 2];

fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn m2_commutator(a: &M2, b: &M2) -> M2 {
    let ab = m2_mul(a, b);
    let ba = m2_mul(b, a);
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = ab[i][j] - ba[i][j];
        }
    }
    out
}

fn pauli() -> [M2; 4] {
    let (o, z, i) = (c(1.0, 0.0), ZERO, c(0.0, 1.0));
    [
        [[o, z], [z, o]],
        [[z, o], [o, z]],
        [[z, -i], [i, z]],
        [[o, z], [z, -o]],
    ]
}

fn hamiltonian(params: &SystemParams) -> M2 {
    let s = pauli();
    let w = params.omega0() / 2.0;
    let (e, d) = (params.eps_tilde(), params.delta_tilde());
    let mut h = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            h[i][j] = (s[3][i][j] * e + s[1][i][j] * d) * w;
        }
    }
    h
}

/// Ĥρ = −i[H_S, ρ]
fn coherent_part(params: &SystemParams, rho: &M2) -> M2 {
    let comm = m2_commutator(&hamiltonian(params), rho);
    comm.map(|row| row.map(|x| x * c(0.0, -1.0)))
}

/// V̂ρ = −(γ/4)[σ_z, [σ_z, ρ]]
fn dephasing_part(params: &SystemParams, rho: &M2) -> M2 {
    let sz = pauli()[3];
    let inner = m2_commutator(&sz, rho);
    let outer = m2_commutator(&sz, &inner);
    let k = -gamma_theta(params) / 4.0;
    outer.map(|row| row.map(|x| x * k))
}

/// dr/dτ from dρ/dτ = −i[H_S, ρ] − (γ/4)[σ_z, [σ_z, ρ]], read off as
/// dr_k/dτ = tr(σ_k dρ/dτ).
pub fn master_rhs(rho: &DensityState, params: &SystemParams) -> Vec3 {
    let m = rho.density_matrix();
    let h = coherent_part(params, &m);
    let v = dephasing_part(params, &m);
    let s = pauli();
    let mut out = [0.0; 3];
    for k in 0..3 {
        let sig = &s[k + 1];
        let mut tr = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                tr += sig[i][j] * (h[j][i] + v[j][i]);
            }
        }
        out[k] = tr.re;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub taus: Vec<f64>,
    pub states: Vec<DensityState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

/// 1e−3/max(1, γ, Ω0).
pub fn default_dt(params: &SystemParams) -> f64 {
    1e-3 / 1f64.max(gamma_theta(params)).max(params.omega0())
}

/// Classic fixed-step RK4. The step is shrunk to tau_max/⌈tau_max/dt⌉ so the
/// grid ends exactly at tau_max.
pub fn integrate_master(
    rho0: &DensityState,
    params: &SystemParams,
    tau_max: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidIntegration(format!("dt must be positive, got {dt}")));
    }
    if !(tau_max.is_finite() && tau_max >= 0.0) {
        return Err(Error::InvalidIntegration(format!(
            "tau_max must be nonnegative, got {tau_max}"
        )));
    }
    let steps = (tau_max / dt).ceil() as usize;
    let h = if steps > 0 { tau_max / steps as f64 } else { 0.0 };

    let f = |r: &Vec3| master_rhs(&DensityState { bloch_vector: *r }, params);
    let axpy = |r: &Vec3, k: &Vec3, s: f64| [r[0] + s * k[0], r[1] + s * k[1], r[2] + s * k[2]];

    let mut taus = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut r = rho0.bloch_vector;
    taus.push(0.0);
    states.push(*rho0);
    for step in 1..=steps {
        let k1 = f(&r);
        let k2 = f(&axpy(&r, &k1, h / 2.0));
        let k3 = f(&axpy(&r, &k2, h / 2.0));
        let k4 = f(&axpy(&r, &k3, h));
        for i in 0..3 {
            r[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let state = DensityState { bloch_vector: r };
        let norm = state.purity();
        if !(norm <= 1.0 + BLOCH_BALL_TOL) {
            return Err(Error::InvariantBreach { step, norm });
        }
        taus.push(step as f64 * h);
        states.push(state);
    }
    Ok(Trajectory { taus, states })
}

/// exp(−Aτ). Uses Sylvester's formula Σ_k e^{−λ_k τ} adj(λ_k − A)/f'(λ_k)
/// when the eigenvalues are well separated, scaling and squaring otherwise.
pub fn propagator(a: &BlochMatrix, tau: f64) -> CMat3 {
    if tau == 0.0 {
        return identity();
    }
    spectral_propagator(a, tau).unwrap_or_else(|| taylor_expm(&linalg::scale(&a.entries, c(-tau, 0.0))))
}

fn spectral_propagator(a: &BlochMatrix, tau: f64) -> Option<CMat3> {
    let coeffs = &a.char_coeffs;
    let roots = solve_cubic(coeffs).ok()?.roots;
    let s = root_scale(coeffs);
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (roots[i] - roots[j]).norm() < SPECTRAL_SEPARATION_TOL * s {
                return None;
            }
        }
    }
    let mut out = [[ZERO; 3]; 3];
    for &lambda in &roots {
        let weight = (-lambda * tau).exp() / coeffs.derivative(lambda);
        let proj = adjugate(&shifted(&a.entries, lambda));
        out = linalg::add(&out, &linalg::scale(&proj, weight));
    }
    Some(out)
}

/// Scaling and squaring with a degree-20 Taylor polynomial.
pub fn taylor_expm(m: &CMat3) -> CMat3 {
    let norm = norm1(m);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = linalg::scale(m, c(0.5f64.powi(squarings), 0.0));
    let mut term = identity();
    let mut sum = identity();
    for k in 1..=20 {
        term = linalg::scale(&linalg::mul(&term, &scaled), c(1.0 / k as f64, 0.0));
        sum = linalg::add(&sum, &term);
    }
    for _ in 0..squarings {
        sum = linalg::mul(&sum, &sum);
    }
    sum
}

/// v(τ) = exp(−Aτ)·v0.
pub fn propagate_expectations(v0: &ExpectationVector, a: &BlochMatrix, tau: f64) -> ExpectationVector {
    ExpectationVector {
        v: matvec(&propagator(a, tau), &v0.v),
    }
}

/// Frobenius norm of [Ĥ, V̂] with both superoperators written as 4×4
/// matrices in the orthonormal basis {I, σ_x, σ_y, σ_z}/√2.
pub fn superoperator_commutator_norm(params: &SystemParams) -> f64 {
    let basis = pauli();
    let matrix_of = |op: &dyn Fn(&M2) -> M2| {
        let mut out = [[ZERO; 4]; 4];
        for k in 0..4 {
            let image = op(&basis[k]);
            for j in 0..4 {
                // ⟨B_j, L(B_k)⟩ with B = σ/√2
                let mut tr = ZERO;
                for p in 0..2 {
                    for q in 0..2 {
                        tr += basis[j][q][p].conj() * image[q][p];
                    }
                }
                out[j][k] = tr / 2.0;
            }
        }
        out
    };
    let h = matrix_of(&|rho| coherent_part(params, rho));
    let v = matrix_of(&|rho| dephasing_part(params, rho));
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let mut x = ZERO;
            for k in 0..4 {
                x += h[i][k] * v[k][j] - v[i][k] * h[k][j];
            }
            sum += x.norm_sqr();
        }
    }
    sum.sqrt()
}

/// ⟨l·σ⟩ along a trajectory.
pub fn projected_signal(traj: &Trajectory, l: &Vec3) -> Vec<f64> {
    traj.states
        .iter()
        .map(|s| linalg::dot(&s.bloch_vector, l))
        .collect()
}

/// Least-squares decay rate of log|y| against τ.
pub fn fit_decay_rate(taus: &[f64], signal: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .zip(signal)
        .filter(|(_, y)| y.abs() > 0.0)
        .map(|(&t, &y)| (t, y.abs().ln()))
        .collect();
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    -cov / var
}
