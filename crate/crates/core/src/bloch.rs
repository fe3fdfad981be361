use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{c, CMat3};
use crate::model::{gamma_theta, SystemParams};

/// Real coefficients of f(λ) = det(λ − A) = λ³ + c2·λ² + c1·λ + c0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharCoeffs {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl CharCoeffs {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        ((z + self.c2) * z + self.c1) * z + self.c0
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        ((x + self.c2) * x + self.c1) * x + self.c0
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        (z * 3.0 + 2.0 * self.c2) * z + self.c1
    }

    /// Discriminant of the monic cubic; positive for three distinct real
    /// roots, negative for one real root and a conjugate pair.
    pub fn discriminant(&self) -> f64 {
        let (b, c, d) = (self.c2, self.c1, self.c0);
        18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c - 27.0 * d * d
    }

    pub fn as_tuple(&self) -> (f64, f64, f64) {
        (self.c2, self.c1, self.c0)
    }
}

/// Generator of dD/dτ = −A·D for (D₊, D₋, D₀), in units of Ω0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochMatrix {
    pub entries: CMat3,
    pub char_coeffs: CharCoeffs,
    pub gamma_theta: f64,
    pub params: SystemParams,
}

pub fn build_bloch_matrix(params: &SystemParams) -> BlochMatrix {
    let g = gamma_theta(params);
    let w = params.omega0();
    let e = params.eps_tilde();
    let d = params.delta_tilde();
    let d2 = d * d;
    let diag = (d2 + 2.0 * e * e) * g / 2.0;
    let flip = -d2 * g / 2.0;
    let mix = -e * d * g;

    let entries = [
        [c(diag, -w), c(flip, 0.0), c(mix / 2.0, 0.0)],
        [c(flip, 0.0), c(diag, w), c(mix / 2.0, 0.0)],
        [c(mix, 0.0), c(mix, 0.0), c(d2 * g, 0.0)],
    ];

    // tr A = 2γ(ε̃² + Δ̃²) = 2γ; tr adj A = γ² + Ω0²; det A = Δ̃²γΩ0².
    let char_coeffs = CharCoeffs {
        c2: -2.0 * g,
        c1: g * g + w * w,
        c0: -d2 * g * w * w,
    };

    BlochMatrix {
        entries,
        char_coeffs,
        gamma_theta: g,
        params: *params,
    }
}

impl BlochMatrix {
    /// Swap rows and columns 1↔2 and conjugate every entry.
    pub fn swap_conjugate(&self) -> CMat3 {
        let p = [1usize, 0, 2];
        let mut out = self.entries;
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.entries[p[i]][p[j]].conj();
            }
        }
        out
    }

    /// Σ Re λ_i = tr A.
    pub fn trace(&self) -> f64 {
        -self.char_coeffs.c2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{det, principal_minor_sum, trace};

    fn bm(e: f64, eta: f64, t: f64) -> BlochMatrix {
        build_bloch_matrix(&SystemParams::new(e, eta, t).unwrap())
    }

    fn assert_entries(a: &CMat3, expect: [[(f64, f64); 3]; 3]) {
        for i in 0..3 {
            for j in 0..3 {
                let (re, im) = expect[i][j];
                assert!(
                    (a[i][j] - c(re, im)).norm() < 1e-15,
                    "entry ({i},{j}) = {} != {re}+{im}i",
                    a[i][j]
                );
            }
        }
    }

    #[test]
    fn unbiased_example() {
        let a = bm(0.0, 1.0, 0.25);
        assert_eq!(a.gamma_theta, 0.5);
        assert_entries(
            &a.entries,
            [
                [(0.25, -1.0), (-0.25, 0.0), (0.0, 0.0)],
                [(-0.25, 0.0), (0.25, 1.0), (0.0, 0.0)],
                [(0.0, 0.0), (0.0, 0.0), (0.5, 0.0)],
            ],
        );
    }

    #[test]
    fn zero_temperature_is_pure_precession() {
        for &e in &[0.0, 0.3, 1.0] {
            let a = bm(e, 2.0, 0.0);
            assert_entries(
                &a.entries,
                [
                    [(0.0, -1.0), (0.0, 0.0), (0.0, 0.0)],
                    [(0.0, 0.0), (0.0, 1.0), (0.0, 0.0)],
                    [(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
                ],
            );
        }
    }

    #[test]
    fn no_tunneling_is_diagonal() {
        let a = bm(1.0, 1.0, 0.4);
        assert_entries(
            &a.entries,
            [
                [(0.8, -1.0), (0.0, 0.0), (0.0, 0.0)],
                [(0.0, 0.0), (0.8, 1.0), (0.0, 0.0)],
                [(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            ],
        );
    }

    #[test]
    fn symbolic_coefficients_match_entries() {
        for &(e, eta, t) in &[(0.2, 1.0, 1.0), (0.7, 0.3, 4.0), (0.05, 10.0, 50.0)] {
            let a = bm(e, eta, t);
            let s = a.gamma_theta.max(1.0);
            let cc = a.char_coeffs;
            assert!((trace(&a.entries).re + cc.c2).abs() < 1e-12 * s);
            assert!((principal_minor_sum(&a.entries).re - cc.c1).abs() < 1e-12 * s * s);
            assert!((det(&a.entries).re + cc.c0).abs() < 1e-12 * s * s * s);
        }
    }

    #[test]
    fn conjugation_swap_symmetry() {
        let a = bm(0.43, 1.7, 0.9);
        assert_eq!(a.swap_conjugate(), a.entries);
        assert!(a.entries[2].iter().all(|x| x.im == 0.0));
    }

    #[test]
    fn unbiased_discriminant_vanishes_at_gamma_two() {
        let a = bm(0.0, 1.0, 1.0);
        assert_eq!(a.char_coeffs.as_tuple(), (-4.0, 5.0, -2.0));
        assert_eq!(a.char_coeffs.discriminant(), 0.0);
    }
}
