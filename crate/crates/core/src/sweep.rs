//! Temperature sweeps, location of the bifurcation temperatures, and
//! continuation of longitudinal directions across them.
//!
//! A depends on θ only through γ = 2ηθ, so every critical temperature is a
//! critical γ that depends on ε̃ alone.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::build_bloch_matrix;
use crate::error::{Error, Result};
use crate::linalg::{dot, Vec3};
use crate::model::SystemParams;
use crate::spectrum::{
    analyze_spectrum, classify, degeneracy_threshold, gauge, Regime, DEFAULT_DEGENERACY_TOL,
};

pub const DEFAULT_SCAN_POINTS: usize = 2000;
pub const DEFAULT_BISECTION_TOL: f64 = 1e-10;
/// |l·l'| below this between neighbouring grid points is a discontinuity.
pub const BRANCH_MATCH_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub theta: f64,
    pub gamma: f64,
    pub regime: Regime,
    pub discriminant: f64,
    pub eigenvalues: [Complex64; 3],
    pub gamma_l: Vec<f64>,
    pub gamma_t: Option<f64>,
    pub ratio: Option<f64>,
    /// Gauge-continued longitudinal directions, aligned with `gamma_l`.
    pub directions: Vec<Option<Vec3>>,
    /// Branch label per direction, assigned by continuity along the grid.
    pub branches: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceDirection {
    Upward,
    Downward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionJump {
    pub theta: f64,
    pub from_l: Vec3,
    pub to_l: Vec3,
    pub from_rate: f64,
    pub to_rate: f64,
    pub trace: TraceDirection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationReport {
    pub eps_tilde: f64,
    pub eta: f64,
    pub critical_thetas: Vec<f64>,
    pub critical_gammas: Vec<f64>,
    pub brackets: Vec<(f64, f64)>,
    /// Discriminant at each located θ.
    pub residuals: Vec<f64>,
    /// Regime of each interval between consecutive critical temperatures.
    pub regions: Vec<Regime>,
    pub jumps: Vec<DirectionJump>,
}

fn check_range(theta_min: f64, theta_max: f64) -> Result<()> {
    if !(theta_min.is_finite() && theta_max.is_finite() && theta_min >= 0.0 && theta_max > theta_min) {
        return Err(Error::InvalidRange(format!(
            "need 0 <= theta_min < theta_max, got [{theta_min}, {theta_max}]"
        )));
    }
    Ok(())
}

pub fn uniform_grid(lo: f64, hi: f64, n_points: usize) -> Vec<f64> {
    let step = (hi - lo) / (n_points - 1) as f64;
    (0..n_points)
        .map(|i| if i + 1 == n_points { hi } else { lo + step * i as f64 })
        .collect()
}

pub fn sweep_temperature(
    eps_tilde: f64,
    eta: f64,
    theta_range: (f64, f64),
    n_points: usize,
) -> Result<Vec<SweepRecord>> {
    let (lo, hi) = theta_range;
    check_range(lo, hi)?;
    if n_points < 2 {
        return Err(Error::InvalidRange(format!("n_points must be >= 2, got {n_points}")));
    }
    let base = SystemParams::new(eps_tilde, eta, lo)?;
    let mut records = uniform_grid(lo, hi, n_points)
        .into_par_iter()
        .map(|theta| analyze_point(&base.with_theta(theta)?))
        .collect::<Result<Vec<_>>>()?;
    label_branches(&mut records);
    Ok(records)
}

fn analyze_point(params: &SystemParams) -> Result<SweepRecord> {
    let a = build_bloch_matrix(params);
    let report = analyze_spectrum(&a, DEFAULT_DEGENERACY_TOL)?;
    let ratio = report.ratio();
    let n = report.gamma_l.len();
    Ok(SweepRecord {
        theta: params.theta(),
        gamma: a.gamma_theta,
        regime: report.regime,
        discriminant: report.discriminant,
        eigenvalues: report.eigenvalues,
        gamma_l: report.gamma_l,
        gamma_t: report.gamma_t,
        ratio,
        directions: report.directions,
        branches: vec![None; n],
    })
}

/// Best injective matching of current directions onto previous ones by
/// |dot|, ignoring pairs below the threshold. At most 3×3, so brute force.
fn match_directions(prev: &[Option<Vec3>], next: &[Option<Vec3>]) -> Vec<Option<usize>> {
    let mut best: (f64, Vec<Option<usize>>) = (-1.0, vec![None; next.len()]);
    let mut current = vec![None; next.len()];
    fn search(
        k: usize,
        prev: &[Option<Vec3>],
        next: &[Option<Vec3>],
        used: &mut [bool],
        current: &mut Vec<Option<usize>>,
        score: f64,
        best: &mut (f64, Vec<Option<usize>>),
    ) {
        if k == next.len() {
            if score > best.0 {
                *best = (score, current.clone());
            }
            return;
        }
        current[k] = None;
        search(k + 1, prev, next, used, current, score, best);
        let Some(l) = next[k] else { return };
        for (j, p) in prev.iter().enumerate() {
            let Some(p) = p else { continue };
            let d = dot(&l, p).abs();
            if used[j] || d < BRANCH_MATCH_THRESHOLD {
                continue;
            }
            used[j] = true;
            current[k] = Some(j);
            search(k + 1, prev, next, used, current, score + d, best);
            used[j] = false;
            current[k] = None;
        }
    }
    let mut used = vec![false; prev.len()];
    search(0, prev, next, &mut used, &mut current, 0.0, &mut best);
    best.1
}

fn label_branches(records: &mut [SweepRecord]) {
    let mut next_label = 0usize;
    for i in 0..records.len() {
        if i == 0 {
            for k in 0..records[0].directions.len() {
                if records[0].directions[k].is_some() {
                    records[0].branches[k] = Some(next_label);
                    next_label += 1;
                }
            }
            continue;
        }
        let (head, tail) = records.split_at_mut(i);
        let prev = &head[i - 1];
        let cur = &mut tail[0];
        let matching = match_directions(&prev.directions, &cur.directions);
        for (k, m) in matching.into_iter().enumerate() {
            match (m, cur.directions[k]) {
                (Some(j), Some(l)) => {
                    let p = prev.directions[j].expect("matched to a present direction");
                    // continuity gauge overrides the anchor gauge
                    if dot(&l, &p) < 0.0 {
                        cur.directions[k] = Some(l.map(|x| -x));
                    }
                    cur.branches[k] = prev.branches[j];
                }
                (None, Some(_)) => {
                    cur.branches[k] = Some(next_label);
                    next_label += 1;
                }
                _ => {}
            }
        }
    }
}

fn discriminant_at(base: &SystemParams, theta: f64) -> f64 {
    let params = base.with_theta(theta).expect("theta inside validated range");
    build_bloch_matrix(&params).char_coeffs.discriminant()
}

fn is_degenerate(base: &SystemParams, theta: f64) -> bool {
    let params = base.with_theta(theta).expect("theta inside validated range");
    let a = build_bloch_matrix(&params);
    classify(a.char_coeffs.discriminant(), a.char_coeffs.c2, DEFAULT_DEGENERACY_TOL) == Regime::Degenerate
}

/// Golden-section search for the extremum of `f` on [a, b]; `sign` = 1 for
/// a maximum, −1 for a minimum.
fn golden_extremum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, sign: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = sign * f(x1);
    let mut f2 = sign * f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = sign * f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = sign * f(x2);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if (f_mid >= 0.0) == (f_lo >= 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn find_bifurcations(
    eps_tilde: f64,
    eta: f64,
    theta_range: (f64, f64),
    tol: f64,
) -> Result<BifurcationReport> {
    find_bifurcations_with(eps_tilde, eta, theta_range, tol, DEFAULT_SCAN_POINTS)
}

/// Dense scan of the discriminant in θ, bisection on every sign change to
/// |Δθ| ≤ tol. Local extrema of the scan are refined so that windows
/// narrower than the scan step are not missed.
pub fn find_bifurcations_with(
    eps_tilde: f64,
    eta: f64,
    theta_range: (f64, f64),
    tol: f64,
    scan_points: usize,
) -> Result<BifurcationReport> {
    let (lo, hi) = theta_range;
    check_range(lo, hi)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidRange(format!("tol must be positive, got {tol}")));
    }
    let base = SystemParams::new(eps_tilde, eta, lo)?;
    for theta in [lo, hi] {
        if is_degenerate(&base, theta) {
            return Err(Error::EndpointDegenerate { theta });
        }
    }

    let disc = |t: f64| discriminant_at(&base, t);
    let grid = uniform_grid(lo, hi, scan_points.max(DEFAULT_SCAN_POINTS) + 1);
    let values: Vec<f64> = grid.par_iter().map(|&t| disc(t)).collect();
    let positive = |x: f64| x >= 0.0;

    let mut brackets = Vec::new();
    for i in 0..grid.len() - 1 {
        if positive(values[i]) != positive(values[i + 1]) {
            brackets.push((grid[i], grid[i + 1]));
        }
    }
    for i in 1..grid.len() - 1 {
        let (l, m, r) = (values[i - 1], values[i], values[i + 1]);
        let same_sign = positive(l) == positive(m) && positive(m) == positive(r);
        if !same_sign {
            continue;
        }
        let sign = if m >= l && m >= r && !positive(m) {
            1.0
        } else if m <= l && m <= r && positive(m) {
            -1.0
        } else {
            continue;
        };
        let (t_ext, f_ext) = golden_extremum(disc, grid[i - 1], grid[i + 1], sign);
        if positive(f_ext) != positive(m) {
            brackets.push((grid[i - 1], t_ext));
            brackets.push((t_ext, grid[i + 1]));
        }
    }
    brackets.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let critical_thetas: Vec<f64> = brackets
        .iter()
        .map(|&(a, b)| bisect(disc, a, b, tol))
        .collect();
    let residuals = critical_thetas.iter().map(|&t| disc(t)).collect();
    let critical_gammas = critical_thetas.iter().map(|t| 2.0 * eta * t).collect();

    let mut edges = vec![lo];
    edges.extend(critical_thetas.iter().copied());
    edges.push(hi);
    let regions = edges
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let d = disc(mid);
            if d > 0.0 {
                Regime::ThreeReal
            } else {
                Regime::ComplexPair
            }
        })
        .collect();

    Ok(BifurcationReport {
        eps_tilde,
        eta,
        critical_thetas,
        critical_gammas,
        brackets,
        residuals,
        regions,
        jumps: Vec::new(),
    })
}

/// Largest discriminant over γ > 0 at fixed ε̃, scanned on a log grid in
/// γ ∈ [1e−2, 1e4] and refined by golden section. Returns (γ*, disc(γ*)).
pub fn window_peak(eps_tilde: f64) -> Result<(f64, f64)> {
    let base = SystemParams::new(eps_tilde, 0.5, 0.0)?;
    // η = 1/2 makes θ = γ
    let disc = |g: f64| discriminant_at(&base, g);
    let n = 4000;
    let logs: Vec<f64> = (0..=n).map(|i| -2.0 + 6.0 * i as f64 / n as f64).collect();
    let vals: Vec<f64> = logs.iter().map(|&x| disc(10f64.powf(x))).collect();
    let k = (0..=n)
        .max_by(|&i, &j| vals[i].total_cmp(&vals[j]))
        .expect("nonempty grid");
    let a = 10f64.powf(logs[k.saturating_sub(1)]);
    let b = 10f64.powf(logs[(k + 1).min(n)]);
    Ok(golden_extremum(disc, a, b, 1.0))
}

/// Whether a ThreeReal window (discriminant above the degeneracy band)
/// exists for some γ > 0.
pub fn has_three_real_window(eps_tilde: f64) -> Result<bool> {
    let (g, peak) = window_peak(eps_tilde)?;
    Ok(peak > degeneracy_threshold(-2.0 * g, DEFAULT_DEGENERACY_TOL))
}

/// ε̃ above which the ThreeReal window disappears. Independent of η; the
/// argument is validated only.
pub fn critical_epsilon(eta: f64, search_range: (f64, f64)) -> Result<f64> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidEta(eta));
    }
    let (mut lo, mut hi) = search_range;
    if !(lo > 0.0 && hi < 1.0 && lo < hi) {
        return Err(Error::InvalidRange(format!(
            "eps-tilde search range must lie in (0, 1), got [{lo}, {hi}]"
        )));
    }
    if !has_three_real_window(lo)? || has_three_real_window(hi)? {
        return Err(Error::NoSignChange { lo, hi });
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if has_three_real_window(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Real modes of a record as (rate, direction).
fn modes(r: &SweepRecord) -> Vec<(f64, Option<Vec3>)> {
    r.gamma_l.iter().copied().zip(r.directions.iter().copied()).collect()
}

fn closest_rate(modes: &[(f64, Option<Vec3>)], rate: f64) -> usize {
    (0..modes.len())
        .min_by(|&i, &j| (modes[i].0 - rate).abs().total_cmp(&(modes[j].0 - rate).abs()))
        .expect("at least one mode")
}

/// The followed longitudinal branch, in ascending θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPath {
    pub trace: TraceDirection,
    pub thetas: Vec<f64>,
    pub rates: Vec<f64>,
    pub directions: Vec<Vec3>,
}

/// Follows one longitudinal branch through an ascending-θ sweep, in the
/// given trace order, and reports where it ceases to exist.
///
/// Inside a regime the real eigenvalues stay distinct, so the followed
/// branch keeps its rank. When three real modes collapse to one, the
/// survivor is the mode closest in rate to the remaining real eigenvalue; if
/// the followed branch is not the survivor, the direction jumps.
pub fn trace_branch(sweep: &[SweepRecord], trace: TraceDirection) -> Result<(BranchPath, Vec<DirectionJump>)> {
    if sweep.windows(2).any(|w| !(w[0].theta < w[1].theta)) {
        return Err(Error::UnsortedSweep);
    }
    if sweep.iter().all(|r| r.gamma_l.is_empty()) {
        return Err(Error::NoRealBranch);
    }
    let ordered: Vec<&SweepRecord> = match trace {
        TraceDirection::Upward => sweep.iter().collect(),
        TraceDirection::Downward => sweep.iter().rev().collect(),
    };
    let first = ordered[0];
    let first_modes = modes(first);
    let anchor = match trace {
        TraceDirection::Upward => first_modes_anchor(first),
        TraceDirection::Downward => [0.0, 0.0, 1.0],
    };
    let mut idx = (0..first_modes.len())
        .max_by(|&i, &j| {
            let s = |k: usize| first_modes[k].1.map_or(-1.0, |l| dot(&l, &anchor).abs());
            s(i).total_cmp(&s(j))
        })
        .expect("at least one mode");
    let mut rate = first_modes[idx].0;
    let mut dir = first_modes[idx].1.map(|l| gauge(l, &anchor)).unwrap_or(anchor);

    let mut path = BranchPath {
        trace,
        thetas: vec![first.theta],
        rates: vec![rate],
        directions: vec![dir],
    };
    let mut jumps = Vec::new();
    for pair in ordered.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        let prev_modes = modes(prev);
        let next_modes = modes(next);
        let new_idx = if prev_modes.len() == next_modes.len() {
            idx
        } else if next_modes.len() > prev_modes.len() {
            closest_rate(&next_modes, rate)
        } else {
            let survivor = closest_rate(&prev_modes, next_modes[0].0);
            if survivor != idx {
                let to_l = next_modes[0].1.map(|l| gauge(l, &dir)).unwrap_or(dir);
                jumps.push(DirectionJump {
                    theta: next.theta,
                    from_l: dir,
                    to_l,
                    from_rate: rate,
                    to_rate: next_modes[0].0,
                    trace,
                });
            }
            0
        };
        idx = new_idx;
        rate = next_modes[idx].0;
        if let Some(l) = next_modes[idx].1 {
            dir = gauge(l, &dir);
        }
        path.thetas.push(next.theta);
        path.rates.push(rate);
        path.directions.push(dir);
    }
    if trace == TraceDirection::Downward {
        path.thetas.reverse();
        path.rates.reverse();
        path.directions.reverse();
    }
    Ok((path, jumps))
}

pub fn track_direction_jumps(sweep: &[SweepRecord], trace: TraceDirection) -> Result<Vec<DirectionJump>> {
    trace_branch(sweep, trace).map(|(_, jumps)| jumps)
}

/// Anchor for the upward trace: the single longitudinal direction of the
/// coldest record, which already carries the Hamiltonian-direction gauge.
fn first_modes_anchor(r: &SweepRecord) -> Vec3 {
    match r.directions.as_slice() {
        [Some(l)] => *l,
        _ => [1.0, 0.0, 0.0],
    }
}

impl BifurcationReport {
    /// Attaches the jumps of both traces from a sweep over the same range.
    pub fn with_jumps(mut self, sweep: &[SweepRecord]) -> Result<Self> {
        let mut jumps = track_direction_jumps(sweep, TraceDirection::Upward)?;
        jumps.extend(track_direction_jumps(sweep, TraceDirection::Downward)?);
        self.jumps = jumps;
        Ok(self)
    }
}
