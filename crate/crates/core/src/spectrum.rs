//! Spectral classification of the Bloch matrix: relaxation constants and
//! longitudinal directions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::operator_to_lab;
use crate::bloch::BlochMatrix;
use crate::cubic::{root_scale, solve_cubic};
use crate::error::{Error, Result};
use crate::linalg::{adjugate, cnorm, det, dot, norm, principal_minor_sum, shifted, Vec3, C3};

/// Relative tolerance on the discriminant for flagging a degenerate spectrum.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-12;

/// Relative residual |f(λ)|/s³ above which λ is not accepted as an eigenvalue.
const EIGENVALUE_RESIDUAL_TOL: f64 = 1e-8;

/// Relative distance to the nearest other root below which λ is treated as
/// a multiple root. A computed double root is only accurate to ~√eps.
const MULTIPLE_ROOT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// One real eigenvalue plus a complex-conjugate pair.
    ComplexPair,
    /// Three distinct real eigenvalues.
    ThreeReal,
    /// Discriminant inside the degeneracy band (branch point).
    Degenerate,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::ComplexPair => "ComplexPair",
            Regime::ThreeReal => "ThreeReal",
            Regime::Degenerate => "Degenerate",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// |disc| below this is Degenerate. The discriminant is homogeneous of
/// degree six in the roots, hence the |c2|⁶ scale.
pub fn degeneracy_threshold(c2: f64, rel_tol: f64) -> f64 {
    rel_tol * 1f64.max(c2.abs().powi(6))
}

pub fn classify(discriminant: f64, c2: f64, rel_tol: f64) -> Regime {
    if discriminant.abs() < degeneracy_threshold(c2, rel_tol) {
        Regime::Degenerate
    } else if discriminant > 0.0 {
        Regime::ThreeReal
    } else {
        Regime::ComplexPair
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: [Complex64; 3],
    pub regime: Regime,
    pub discriminant: f64,
    /// Real eigenvalues, ascending: Γ_L, or Γ_L^(1..3).
    pub gamma_l: Vec<f64>,
    /// Shared real part of the complex pair.
    pub gamma_t: Option<f64>,
    pub oscillation_freq: Option<f64>,
    /// Longitudinal direction per entry of `gamma_l`; `None` where the
    /// eigenvalue sits on a branch point.
    pub directions: Vec<Option<Vec3>>,
}

impl SpectrumReport {
    /// Γ_L/Γ_T, defined only in the ComplexPair regime with Γ_T ≠ 0.
    pub fn ratio(&self) -> Option<f64> {
        match (self.regime, self.gamma_t) {
            (Regime::ComplexPair, Some(t)) if t != 0.0 => Some(self.gamma_l[0] / t),
            _ => None,
        }
    }

    pub fn real_part_sum(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).sum()
    }
}

pub fn analyze_spectrum(a: &BlochMatrix, degeneracy_tol: f64) -> Result<SpectrumReport> {
    let cubic = solve_cubic(&a.char_coeffs)?;
    let regime = classify(cubic.discriminant, a.char_coeffs.c2, degeneracy_tol);
    let mut eigenvalues = cubic.roots;

    let (gamma_l, gamma_t, oscillation_freq) = match regime {
        Regime::ComplexPair => {
            let real = eigenvalues
                .iter()
                .copied()
                .find(|z| z.im == 0.0)
                .unwrap_or_else(|| {
                    // smallest |Im| stands in for the real root
                    *eigenvalues
                        .iter()
                        .min_by(|x, y| x.im.abs().total_cmp(&y.im.abs()))
                        .expect("three roots")
                });
            let pair = eigenvalues
                .iter()
                .copied()
                .find(|z| z.im > 0.0)
                .unwrap_or(Complex64::new(real.re, 0.0));
            (vec![real.re], Some(pair.re), Some(pair.im.abs()))
        }
        Regime::Degenerate => {
            let r = crate::cubic::degenerate_roots(&a.char_coeffs);
            eigenvalues = r.map(|x| Complex64::new(x, 0.0));
            (r.to_vec(), None, None)
        }
        Regime::ThreeReal => {
            for z in eigenvalues.iter_mut() {
                *z = Complex64::new(polish_on_matrix(a, z.re), 0.0);
            }
            crate::cubic::sort_roots(&mut eigenvalues);
            (eigenvalues.iter().map(|z| z.re).collect(), None, None)
        }
    };

    let directions = gamma_l
        .iter()
        .map(|&lambda| longitudinal_direction(a, lambda).ok())
        .collect();

    Ok(SpectrumReport {
        eigenvalues,
        regime,
        discriminant: cubic.discriminant,
        gamma_l,
        gamma_t,
        oscillation_freq,
        directions,
    })
}

/// Newton steps on det(λ − A) evaluated from the entries. Roots taken from
/// the expanded coefficients lose accuracy when two of them are close even
/// if the matrix eigenvalues are well conditioned; the entry form keeps
/// block structure such as a decoupled row exact.
fn polish_on_matrix(a: &BlochMatrix, mut x: f64) -> f64 {
    let eval = |x: f64| {
        let m = shifted(&a.entries, Complex64::new(x, 0.0));
        (det(&m).re, principal_minor_sum(&m).re)
    };
    let (mut fx, mut dx) = eval(x);
    for _ in 0..4 {
        if fx == 0.0 || dx == 0.0 {
            break;
        }
        let next = x - fx / dx;
        let (fn_, dn) = eval(next);
        if !(fn_.abs() < fx.abs()) {
            break;
        }
        x = next;
        fx = fn_;
        dx = dn;
    }
    x
}

/// Unit vector l with σ_L = l·σ decaying as e^{−λτ}, in the default gauge
/// (nonnegative overlap with the Hamiltonian direction).
pub fn longitudinal_direction(a: &BlochMatrix, lambda: f64) -> Result<Vec3> {
    longitudinal_direction_raw(a, lambda).map(|(l, _)| gauge(l, &a.params.hamiltonian_direction()))
}

/// As [`longitudinal_direction`] without gauge fixing; also returns the
/// Hermiticity defect (norm of the imaginary part of l before truncation).
pub fn longitudinal_direction_raw(a: &BlochMatrix, lambda: f64) -> Result<(Vec3, f64)> {
    let coeffs = &a.char_coeffs;
    let s = root_scale(coeffs).max(lambda.abs());
    let z = Complex64::new(lambda, 0.0);
    let residual = coeffs.eval(z).norm() / (s * s * s);
    if !(residual <= EIGENVALUE_RESIDUAL_TOL) {
        return Err(Error::NotAnEigenvalue { lambda, residual });
    }
    if nearest_other_root(coeffs, lambda) / s < MULTIPLE_ROOT_TOL {
        return Err(Error::DegenerateBranchPoint(lambda));
    }

    // Rows of adj(λ − A) are left eigenvectors: row·(λ − A) = f(λ)·e = 0.
    let adj = adjugate(&shifted(&a.entries, z));
    let row = adj
        .iter()
        .max_by(|x, y| cnorm(x).total_cmp(&cnorm(y)))
        .copied()
        .expect("three rows");
    let row_norm = cnorm(&row);
    if row_norm == 0.0 {
        return Err(Error::DegenerateBranchPoint(lambda));
    }
    let left: C3 = row.map(|x| x / row_norm);

    // Conjugation-swap symmetry makes (c₋*, c₊*, c₀*) a left eigenvector
    // too; for a simple eigenvalue it equals α·c with |α| = 1. Rotating c by
    // √α gives the Hermitian representative (c₊, c₊*, real c₀).
    let mirror: C3 = [left[1].conj(), left[0].conj(), left[2].conj()];
    let alpha: Complex64 = left
        .iter()
        .zip(mirror.iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let phase = if alpha.norm() > 0.0 {
        (alpha / alpha.norm()).sqrt()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let hermitian: C3 = left.map(|x| x * phase);

    let (l, imag) = operator_to_lab(&hermitian, &a.params);
    let len = norm(&l);
    if len == 0.0 {
        return Err(Error::DegenerateBranchPoint(lambda));
    }
    Ok((l.map(|x| x / len), imag / len))
}

/// Distance from λ to the closer root of the deflated quadratic
/// z² + (c2 + λ)z + (c1 + λ(c2 + λ)).
fn nearest_other_root(coeffs: &crate::bloch::CharCoeffs, lambda: f64) -> f64 {
    let b = coeffs.c2 + lambda;
    let c = coeffs.c1 + lambda * b;
    let disc = Complex64::new(b * b - 4.0 * c, 0.0).sqrt();
    let z = Complex64::new(lambda, 0.0);
    let r1 = (-b + disc) / 2.0;
    let r2 = (-b - disc) / 2.0;
    (z - r1).norm().min((z - r2).norm())
}

/// Flips `l` so its overlap with `anchor` is nonnegative. Ties (orthogonal
/// anchor) fall back to making the largest component positive.
pub fn gauge(l: Vec3, anchor: &Vec3) -> Vec3 {
    let d = dot(&l, anchor);
    let flip = if d.abs() > 1e-12 {
        d < 0.0
    } else {
        let k = (0..3)
            .max_by(|&i, &j| l[i].abs().total_cmp(&l[j].abs()))
            .expect("three components");
        l[k] < 0.0
    };
    if flip {
        l.map(|x| -x)
    } else {
        l
    }
}
