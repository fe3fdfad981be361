//! Closed-form roots of a monic real cubic λ³ + c2·λ² + c1·λ + c0.
//!
//! Three real roots use the trigonometric form; one real root uses
//! Cardano's formula with the cancellation-free choice of cube root, and the
//! conjugate pair follows from Vieta deflation. Every root gets a guarded
//! Newton polish on the original polynomial.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::CharCoeffs;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRoots {
    /// Sorted by real part, then imaginary part.
    pub roots: [Complex64; 3],
    pub discriminant: f64,
}

/// Natural magnitude of the roots, used to make residual checks relative.
pub fn root_scale(coeffs: &CharCoeffs) -> f64 {
    1f64.max(coeffs.c2.abs())
        .max(coeffs.c1.abs().sqrt())
        .max(coeffs.c0.abs().cbrt())
}

pub fn solve_cubic(coeffs: &CharCoeffs) -> Result<CubicRoots> {
    let (c2, c1, c0) = coeffs.as_tuple();
    if !(c2.is_finite() && c1.is_finite() && c0.is_finite()) {
        return Err(Error::NonFiniteCoefficients);
    }
    let discriminant = coeffs.discriminant();
    let shift = c2 / 3.0;
    // depressed cubic t³ + p·t + q with λ = t − c2/3
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;

    let mut roots = if discriminant >= 0.0 && p < 0.0 {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let t = r * (phi - 2.0 * PI * k as f64 / 3.0).cos();
            *slot = Complex64::new(polish_real(coeffs, t - shift), 0.0);
        }
        out
    } else {
        let d = (q * q / 4.0 + p * p * p / 27.0).max(0.0);
        let big = -q.signum() * (q.abs() / 2.0 + d.sqrt()).cbrt();
        let small = if big != 0.0 { -p / (3.0 * big) } else { 0.0 };
        let real = polish_real(coeffs, big + small - shift);

        let pair_sum = -c2 - real;
        let scale = root_scale(coeffs);
        let pair_prod = if real.abs() > 1e-3 * scale {
            -c0 / real
        } else {
            c1 - real * pair_sum
        };
        let re = pair_sum / 2.0;
        let im = (pair_prod - re * re).max(0.0).sqrt();
        let z = polish_complex(coeffs, Complex64::new(re, im));
        [Complex64::new(real, 0.0), z, z.conj()]
    };

    sort_roots(&mut roots);
    Ok(CubicRoots {
        roots,
        discriminant,
    })
}

/// Roots on the zero-discriminant surface: double root (9c0 − c1c2)/(2(c2² − 3c1))
/// and simple root −c2 − 2·double, or the triple root −c2/3 when c2² = 3c1.
/// Exact where the generic solver only reaches ~√eps on the merged pair.
pub fn degenerate_roots(coeffs: &CharCoeffs) -> [f64; 3] {
    let (c2, c1, c0) = coeffs.as_tuple();
    let denom = c2 * c2 - 3.0 * c1;
    let mut out = if denom.abs() <= 1e-12 * c2 * c2 + f64::MIN_POSITIVE {
        [-c2 / 3.0; 3]
    } else {
        let double = (9.0 * c0 - c1 * c2) / (2.0 * denom);
        [double, double, -c2 - 2.0 * double]
    };
    out.sort_by(f64::total_cmp);
    out
}

pub fn sort_roots(roots: &mut [Complex64; 3]) {
    // partial_cmp so that −0.0 and 0.0 tie
    let key = |x: f64, y: f64| x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal);
    roots.sort_by(|a, b| key(a.re, b.re).then(key(a.im, b.im)));
}

fn polish_real(coeffs: &CharCoeffs, mut x: f64) -> f64 {
    let mut fx = coeffs.eval_real(x).abs();
    for _ in 0..3 {
        if fx == 0.0 {
            break;
        }
        let d = coeffs.derivative(Complex64::new(x, 0.0)).re;
        if d == 0.0 {
            break;
        }
        let next = x - coeffs.eval_real(x) / d;
        let fn_ = coeffs.eval_real(next).abs();
        if !(fn_ < fx) {
            break;
        }
        x = next;
        fx = fn_;
    }
    x
}

fn polish_complex(coeffs: &CharCoeffs, mut z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return z;
    }
    let mut fz = coeffs.eval(z).norm();
    for _ in 0..3 {
        let d = coeffs.derivative(z);
        if fz == 0.0 || d.norm() == 0.0 {
            break;
        }
        let next = z - coeffs.eval(z) / d;
        let fn_ = coeffs.eval(next).norm();
        if !(fn_ < fz) {
            break;
        }
        z = next;
        fz = fn_;
    }
    Complex64::new(z.re, z.im.abs())
}
