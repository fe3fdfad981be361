//! Randomized verification suites. Samples are drawn from independent
//! ChaCha streams and checked in parallel; results are reduced in sample
//! order so summaries do not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Schur};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::build_bloch_matrix;
use crate::criteria::{
    check_relaxation_inequalities, m3r_functionals, prop1_positive_real_parts, prop2_triangle,
    triangle_holds,
};
use crate::dynamics::{default_dt, integrate_master, propagate_expectations, DensityState, ExpectationVector};
use crate::error::{Error, Result};
use crate::linalg::{det, max_abs, shifted, CMat3};
use crate::model::SystemParams;
use crate::sampling::{random_params, sample_m3r_matrix, sample_rng, SampleStyle};
use crate::spectrum::{analyze_spectrum, DEFAULT_DEGENERACY_TOL};

/// Samples whose criterion functionals lie this close to zero are not
/// counted: an exact sign statement cannot be checked in floating point there.
pub const BOUNDARY_BAND: f64 = 1e-9;
pub const DYNAMICS_TOL: f64 = 1e-8;
pub const CONTRACTIVITY_TOL: f64 = 1e-10;
/// Every this many RK4 steps the trajectory is compared with the propagator.
const DYNAMICS_COMPARE_STRIDE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Prop1,
    Prop2,
    Inequalities,
    Dynamics,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Prop1, Suite::Prop2, Suite::Inequalities, Suite::Dynamics];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Prop1 => "prop1",
            Suite::Prop2 => "prop2",
            Suite::Inequalities => "inequalities",
            Suite::Dynamics => "dynamics",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub seed: u64,
    pub index: u64,
    /// Full input, enough to rerun the sample by hand.
    pub input: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub samples: u64,
    pub checked: u64,
    /// Excluded by the boundary band or, for prop2, by a failed hypothesis.
    pub skipped: u64,
    pub failures: u64,
    /// Suite-specific worst residual: oracle deviation for dynamics,
    /// eigenvalue residual |f(λ)|/s³ of the brute-force oracle otherwise.
    pub worst_residual: f64,
    pub first_counterexample: Option<Counterexample>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

enum Outcome {
    Pass { residual: f64 },
    Skip { residual: f64 },
    Fail { residual: f64, input: String, detail: String },
}

/// Eigenvalues by complex Schur decomposition, independent of the cubic
/// solver.
pub fn oracle_eigenvalues(m: &CMat3) -> Option<[Complex64; 3]> {
    let mat = Matrix3::from_fn(|i, j| m[i][j]);
    let schur = Schur::try_new(mat, f64::EPSILON, 10_000)?;
    let ev = schur.eigenvalues()?;
    Some([ev[0], ev[1], ev[2]])
}

fn oracle_residual(m: &CMat3, ev: &[Complex64; 3]) -> f64 {
    let s = 1f64.max(max_abs(m));
    ev.iter()
        .map(|&l| det(&shifted(m, l)).norm() / (s * s * s))
        .fold(0.0, f64::max)
}

fn format_matrix(m: &CMat3) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|z| format!("{:e}{:+e}i", z.re, z.im)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn format_params(p: &SystemParams) -> String {
    format!("eps_tilde={:e} eta={:e} theta={:e}", p.eps_tilde(), p.eta(), p.theta())
}

fn matrix_sample(seed: u64, index: u64) -> (SampleStyle, CMat3) {
    let style = SampleStyle::for_index(index);
    (style, sample_m3r_matrix(seed, index, style))
}

fn prop1_case(seed: u64, index: u64) -> Outcome {
    let (style, m) = matrix_sample(seed, index);
    let input = format!("style={style:?} matrix={}", format_matrix(&m));
    let fun = match m3r_functionals(&m) {
        Ok(f) => f,
        Err(e) => return Outcome::Fail { residual: f64::NAN, input, detail: e.to_string() },
    };
    let Some(ev) = oracle_eigenvalues(&m) else {
        return Outcome::Fail { residual: f64::NAN, input, detail: "oracle did not converge".into() };
    };
    let residual = oracle_residual(&m, &ev);
    if fun.boundary_distance() <= BOUNDARY_BAND {
        return Outcome::Skip { residual };
    }
    let criterion = prop1_positive_real_parts(&fun);
    let direct = ev.iter().all(|l| l.re >= 0.0);
    if criterion == direct {
        Outcome::Pass { residual }
    } else {
        Outcome::Fail {
            residual,
            input,
            detail: format!("criterion={criterion} direct={direct} eigenvalues={ev:?} functionals={fun:?}"),
        }
    }
}

fn prop2_case(seed: u64, index: u64) -> Outcome {
    let (style, m) = matrix_sample(seed, index);
    let input = format!("style={style:?} matrix={}", format_matrix(&m));
    let fun = match m3r_functionals(&m) {
        Ok(f) => f,
        Err(e) => return Outcome::Fail { residual: f64::NAN, input, detail: e.to_string() },
    };
    let Some(ev) = oracle_eigenvalues(&m) else {
        return Outcome::Fail { residual: f64::NAN, input, detail: "oracle did not converge".into() };
    };
    let residual = oracle_residual(&m, &ev);
    if fun.boundary_distance().min(fun.f_at_half_trace.abs()) <= BOUNDARY_BAND {
        return Outcome::Skip { residual };
    }
    let Ok(criterion) = prop2_triangle(&fun) else {
        return Outcome::Skip { residual };
    };
    let direct = triangle_holds([ev[0].re, ev[1].re, ev[2].re]);
    if criterion == direct {
        Outcome::Pass { residual }
    } else {
        Outcome::Fail {
            residual,
            input,
            detail: format!("criterion={criterion} direct={direct} eigenvalues={ev:?} functionals={fun:?}"),
        }
    }
}

fn inequalities_case(seed: u64, index: u64) -> Outcome {
    let mut rng = sample_rng(seed, index);
    let params = random_params(&mut rng);
    let input = format_params(&params);
    let a = build_bloch_matrix(&params);
    let fail = |detail: String| Outcome::Fail { residual: f64::NAN, input: input.clone(), detail };
    let report = match analyze_spectrum(&a, DEFAULT_DEGENERACY_TOL) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let fun = match m3r_functionals(&a.entries) {
        Ok(f) => f,
        Err(e) => return fail(e.to_string()),
    };
    let ev = report.eigenvalues;
    let residual = oracle_residual(&a.entries, &ev);
    let ineq = check_relaxation_inequalities(&report);
    if !prop1_positive_real_parts(&fun) || prop2_triangle(&fun) != Ok(true) {
        return Outcome::Fail { residual, input, detail: format!("criteria fail on Bloch matrix: {fun:?}") };
    }
    if !ineq.all_hold() {
        return Outcome::Fail { residual, input, detail: format!("{ineq:?} spectrum={report:?}") };
    }
    Outcome::Pass { residual }
}

/// Parameters and initial state for one dynamics sample. The ranges keep
/// γ ≤ 10 so the fixed-step integration stays cheap.
pub fn dynamics_sample(seed: u64, index: u64) -> (SystemParams, DensityState) {
    let mut rng = sample_rng(seed, index);
    let eps: f64 = rng.random_range(0.0..=1.0);
    let eta: f64 = rng.random_range(0.5..=2.0);
    let theta: f64 = rng.random_range(0.25..=2.5);
    let params = SystemParams::new(eps, eta, theta).expect("inside the valid domain");
    let r = loop {
        let v: [f64; 3] = [
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        ];
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            break v;
        }
    };
    (params, DensityState::new(r).expect("inside the unit ball"))
}

fn dynamics_case(seed: u64, index: u64) -> Outcome {
    let (params, rho0) = dynamics_sample(seed, index);
    let input = format!("{} rho0={:?}", format_params(&params), rho0.bloch_vector);
    let a = build_bloch_matrix(&params);
    let tau_max = 10.0 / a.gamma_theta;
    let traj = match integrate_master(&rho0, &params, tau_max, default_dt(&params)) {
        Ok(t) => t,
        Err(e) => return Outcome::Fail { residual: f64::NAN, input, detail: e.to_string() },
    };
    let v0 = ExpectationVector::from_state(&rho0, &params);
    let last = traj.len() - 1;
    let mut worst = 0.0f64;
    for k in (0..traj.len()).filter(|&k| k % DYNAMICS_COMPARE_STRIDE == 0 || k == last) {
        let rk4 = ExpectationVector::from_state(&traj.states[k], &params);
        let exact = propagate_expectations(&v0, &a, traj.taus[k]);
        worst = worst.max(rk4.max_abs_diff(&exact));
    }
    if !(worst <= DYNAMICS_TOL) {
        return Outcome::Fail {
            residual: worst,
            input,
            detail: format!("RK4 vs propagator deviation {worst:e}"),
        };
    }
    for (k, w) in traj.states.windows(2).enumerate() {
        let (n0, n1) = (w[0].purity(), w[1].purity());
        if n1 > n0 + CONTRACTIVITY_TOL {
            return Outcome::Fail {
                residual: worst,
                input,
                detail: format!("|r| grew from {n0} to {n1} at step {}", k + 1),
            };
        }
    }
    Outcome::Pass { residual: worst }
}

pub fn run_suite(suite: Suite, samples: u64, seed: u64) -> Result<SuiteSummary> {
    if samples == 0 {
        return Err(Error::InvalidRange("samples must be positive".into()));
    }
    let case: fn(u64, u64) -> Outcome = match suite {
        Suite::Prop1 => prop1_case,
        Suite::Prop2 => prop2_case,
        Suite::Inequalities => inequalities_case,
        Suite::Dynamics => dynamics_case,
    };
    let outcomes: Vec<Outcome> = (0..samples).into_par_iter().map(|i| case(seed, i)).collect();
    let mut summary = SuiteSummary {
        suite,
        samples,
        checked: 0,
        skipped: 0,
        failures: 0,
        worst_residual: 0.0,
        first_counterexample: None,
    };
    for (index, outcome) in outcomes.into_iter().enumerate() {
        let residual = match outcome {
            Outcome::Pass { residual } => {
                summary.checked += 1;
                residual
            }
            Outcome::Skip { residual } => {
                summary.skipped += 1;
                residual
            }
            Outcome::Fail { residual, input, detail } => {
                summary.checked += 1;
                summary.failures += 1;
                if summary.first_counterexample.is_none() {
                    summary.first_counterexample = Some(Counterexample {
                        seed,
                        index: index as u64,
                        input,
                        detail,
                    });
                }
                residual
            }
        };
        if residual.is_nan() {
            summary.worst_residual = f64::NAN;
        } else if !summary.worst_residual.is_nan() {
            summary.worst_residual = summary.worst_residual.max(residual);
        }
    }
    Ok(summary)
}
