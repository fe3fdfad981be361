//! Seeded generators for M_{3,R} test populations.
//!
//! Each sample draws from its own ChaCha stream `(seed, index)`, so any shard
//! of a verification run can be reproduced on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::bloch::{build_bloch_matrix, CharCoeffs};
use crate::linalg::{c, conj_transpose, mul, CMat3, ZERO};
use crate::model::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleStyle {
    RealCompanion,
    UnitaryConjugated,
    Bloch,
}

impl SampleStyle {
    pub const ALL: [SampleStyle; 3] = [
        SampleStyle::RealCompanion,
        SampleStyle::UnitaryConjugated,
        SampleStyle::Bloch,
    ];

    /// Round-robin style for sample `index`.
    pub fn for_index(index: u64) -> Self {
        Self::ALL[(index % 3) as usize]
    }
}

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Companion matrix whose characteristic polynomial is λ³ + c2λ² + c1λ + c0.
pub fn companion(coeffs: &CharCoeffs) -> CMat3 {
    [
        [ZERO, ZERO, c(-coeffs.c0, 0.0)],
        [c(1.0, 0.0), ZERO, c(-coeffs.c1, 0.0)],
        [ZERO, c(1.0, 0.0), c(-coeffs.c2, 0.0)],
    ]
}

/// Real cubic with roots drawn so that both signs of every real part occur:
/// real parts in [−1, 3], half the draws with a complex pair.
pub fn random_real_cubic<R: Rng>(rng: &mut R) -> CharCoeffs {
    let a: f64 = rng.random_range(-1.0..3.0);
    let roots = if rng.random_bool(0.5) {
        let x: f64 = rng.random_range(-1.0..3.0);
        let y: f64 = rng.random_range(0.0..3.0);
        [c(a, 0.0), c(x, y), c(x, -y)]
    } else {
        [
            c(a, 0.0),
            c(rng.random_range(-1.0..3.0), 0.0),
            c(rng.random_range(-1.0..3.0), 0.0),
        ]
    };
    let s = roots[0] + roots[1] + roots[2];
    let p2 = roots[0] * roots[1] + roots[1] * roots[2] + roots[0] * roots[2];
    let p3 = roots[0] * roots[1] * roots[2];
    CharCoeffs {
        c2: -s.re,
        c1: p2.re,
        c0: -p3.re,
    }
}

/// Haar-ish random unitary from Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R) -> CMat3 {
    let mut cols = [[ZERO; 3]; 3];
    for col in cols.iter_mut() {
        for x in col.iter_mut() {
            *x = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    for k in 0..3 {
        for j in 0..k {
            let proj: Complex64 = (0..3).map(|i| cols[j][i].conj() * cols[k][i]).sum();
            let basis = cols[j];
            for (x, v) in cols[k].iter_mut().zip(basis) {
                *x -= proj * v;
            }
        }
        let n = cols[k].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[k].iter_mut() {
            *x /= n;
        }
    }
    let mut u = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            u[i][j] = cols[j][i];
        }
    }
    u
}

/// Model parameters covering γ from 0 to 100.
pub fn random_params<R: Rng>(rng: &mut R) -> SystemParams {
    let eps: f64 = rng.random_range(0.0..=1.0);
    let eta = 10f64.powf(rng.random_range(-1.0..=1.0));
    let theta: f64 = rng.random_range(0.0..5.0);
    SystemParams::new(eps, eta, theta).expect("sampled inside the valid domain")
}

pub fn sample_m3r_matrix(seed: u64, index: u64, style: SampleStyle) -> CMat3 {
    let mut rng = sample_rng(seed, index);
    match style {
        SampleStyle::RealCompanion => companion(&random_real_cubic(&mut rng)),
        SampleStyle::UnitaryConjugated => {
            let m = companion(&random_real_cubic(&mut rng));
            let u = random_unitary(&mut rng);
            mul(&mul(&u, &m), &conj_transpose(&u))
        }
        SampleStyle::Bloch => build_bloch_matrix(&random_params(&mut rng)).entries,
    }
}
