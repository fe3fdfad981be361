//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). The process fails if any
//! criterion fails that is not listed in `KNOWN_UNATTAINABLE`, or if a listed
//! one unexpectedly passes.

use std::process::Command;
use std::time::Instant;

use spinrelax::dynamics::{default_dt, fit_decay_rate, projected_signal};
use spinrelax::linalg::distance;
use spinrelax::spectrum::DEFAULT_DEGENERACY_TOL;
use spinrelax::verify::{run_suite, Suite};
use spinrelax::{
    analyze_spectrum, build_bloch_matrix, check_relaxation_inequalities, critical_epsilon, find_bifurcations,
    integrate_master, master_rhs, superoperator_commutator_norm, sweep_temperature, trace_branch, DensityState,
    Regime, SystemParams, TraceDirection,
};

/// Criteria that cannot hold as stated. Criterion 4's sum rule γ(1+Δ̃²)
/// disagrees with tr A = 2γ by ε̃²γ, so it fails at every grid point with
/// ε̃ > 0 and θ > 0; the 2γ identity is reported alongside it.
const KNOWN_UNATTAINABLE: &[u32] = &[4];

struct Verdict {
    id: u32,
    pass: bool,
    detail: String,
}

fn verdict(id: u32, pass: bool, detail: String) -> Verdict {
    Verdict { id, pass, detail }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// ε̃ ∈ {0, 0.05, …, 1} × η ∈ {0.1, 1, 10} × 400 log-spaced θ in [1e−3, 50].
fn criterion3_grid() -> Vec<SystemParams> {
    let thetas = log_grid(1e-3, 50.0, 400);
    let mut out = Vec::new();
    for i in 0..=20 {
        let eps = i as f64 * 0.05;
        for eta in [0.1, 1.0, 10.0] {
            for &t in &thetas {
                out.push(SystemParams::new(eps.min(1.0), eta, t).unwrap());
            }
        }
    }
    out
}

fn c1_prop1() -> Verdict {
    let start = Instant::now();
    let s = run_suite(Suite::Prop1, 100_000, 1).unwrap();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        1,
        s.failures == 0 && s.checked > 90_000,
        format!(
            "{} checked, {} in boundary band, {} disagreements, {secs:.1}s",
            s.checked, s.skipped, s.failures
        ),
    )
}

fn c2_prop2() -> Verdict {
    let s = run_suite(Suite::Prop2, 100_000, 2).unwrap();
    verdict(
        2,
        s.failures == 0 && s.checked > 10_000,
        format!("{} checked, {} skipped, {} disagreements", s.checked, s.skipped, s.failures),
    )
}

fn c3_inequalities() -> Verdict {
    let (mut complex, mut real, mut degenerate, mut violations) = (0, 0, 0, 0);
    for p in criterion3_grid() {
        let r = analyze_spectrum(&build_bloch_matrix(&p), DEFAULT_DEGENERACY_TOL).unwrap();
        let ineq = check_relaxation_inequalities(&r);
        match r.regime {
            Regime::ComplexPair => {
                complex += 1;
                if ineq.transverse_margin.unwrap() < -1e-12 {
                    violations += 1;
                }
            }
            Regime::ThreeReal => {
                real += 1;
                if !ineq.triangle.unwrap().iter().all(|&b| b) {
                    violations += 1;
                }
            }
            Regime::Degenerate => degenerate += 1,
        }
    }
    verdict(
        3,
        violations == 0,
        format!("{complex} complex-pair, {real} three-real, {degenerate} degenerate points, {violations} violations"),
    )
}

fn c4_trace_sum() -> Verdict {
    let (mut bad, mut worst, mut worst_2g) = (0usize, 0.0f64, 0.0f64);
    let grid = criterion3_grid();
    for p in &grid {
        let a = build_bloch_matrix(p);
        let r = analyze_spectrum(&a, DEFAULT_DEGENERACY_TOL).unwrap();
        let g = a.gamma_theta;
        let d2 = p.delta_tilde().powi(2);
        let dev = (r.real_part_sum() - g * (1.0 + d2)).abs();
        // NaN counts as a failure
        if dev.is_nan() || dev > 1e-10 {
            bad += 1;
        }
        worst = worst.max(dev);
        worst_2g = worst_2g.max((r.real_part_sum() - 2.0 * g).abs() / g.max(1.0));
    }
    verdict(
        4,
        bad == 0,
        format!(
            "sum rule gamma(1+D^2): {bad}/{} points off by more than 1e-10 (max {worst:.3e}); \
             companion tr A = 2 gamma: max relative deviation {worst_2g:.1e}",
            grid.len()
        ),
    )
}

fn c5_unbiased() -> Verdict {
    let mut worst_rate = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut worst_crit = 0.0f64;
    for eta in [0.1, 1.0, 10.0] {
        for t in log_grid(1e-3 / eta, 3.0 / eta, 400) {
            let p = SystemParams::new(0.0, eta, t).unwrap();
            let a = build_bloch_matrix(&p);
            let r = analyze_spectrum(&a, DEFAULT_DEGENERACY_TOL).unwrap();
            let g = a.gamma_theta;
            let dev = r.gamma_l.iter().map(|x| (x - g).abs()).fold(f64::INFINITY, f64::min);
            worst_rate = worst_rate.max(dev);
            if g < 2.0 {
                worst_ratio = worst_ratio.max((r.ratio().unwrap() - 2.0).abs());
            }
        }
        let rep = find_bifurcations(0.0, eta, (1e-3 / eta, 3.0 / eta), 1e-10).unwrap();
        if rep.critical_thetas.len() != 1 {
            worst_crit = f64::INFINITY;
        } else {
            worst_crit = worst_crit.max((rep.critical_thetas[0] - 1.0 / eta).abs());
        }
    }
    verdict(
        5,
        worst_rate <= 1e-12 && worst_crit <= 1e-8 && worst_ratio <= 1e-12,
        format!("|Gamma_L - gamma| <= {worst_rate:.1e}, |theta_c - 1/eta| <= {worst_crit:.1e}, |ratio - 2| <= {worst_ratio:.1e}"),
    )
}

fn c6_regimes() -> Verdict {
    let r02 = find_bifurcations(0.2, 1.0, (1e-3, 3.0), 1e-10).unwrap();
    let window = r02.critical_thetas.len() == 2
        && r02.regions == [Regime::ComplexPair, Regime::ThreeReal, Regime::ComplexPair];
    let none: Vec<usize> = [0.4, 0.6]
        .iter()
        .map(|&e| find_bifurcations(e, 1.0, (1e-3, 50.0), 1e-10).unwrap().critical_thetas.len())
        .collect();
    let eps_star = critical_epsilon(1.0, (0.2, 0.4)).unwrap();
    verdict(
        6,
        window && none == [0, 0] && eps_star > 0.2 && eps_star < 0.4,
        format!(
            "eps 0.2: critical thetas {:?}; eps 0.4/0.6: {:?} critical; eps* = {eps_star:.6}",
            r02.critical_thetas, none
        ),
    )
}

fn c7_hysteresis() -> Verdict {
    let eps = 0.2;
    let (lo, hi, n) = (1e-3, 1e3, 200_001);
    let step = (hi - lo) / (n - 1) as f64;
    let recs = sweep_temperature(eps, 1.0, (lo, hi), n).unwrap();
    let crit = find_bifurcations(eps, 1.0, (lo, 3.0), 1e-10).unwrap().critical_thetas;
    let (up_path, up) = trace_branch(&recs, TraceDirection::Upward).unwrap();
    let (down_path, down) = trace_branch(&recs, TraceDirection::Downward).unwrap();
    let d = (1.0 - eps * eps).sqrt();
    let cold = [d, 0.0, eps];
    let hot = [0.0, 0.0, 1.0];
    let mut ok = up.len() == 1 && down.len() == 1 && crit.len() == 2;
    let mut detail = format!("{} upward, {} downward jumps", up.len(), down.len());
    if ok {
        let (ta, tc) = (up[0].theta, down[0].theta);
        ok &= ta > tc && (ta - crit[1]).abs() <= step && (tc - crit[0]).abs() <= step;
        detail += &format!("; theta_A {ta:.4} vs {:.4}, theta_C {tc:.4} vs {:.4}", crit[1], crit[0]);
    }
    let ends = [
        distance(&up_path.directions[0], &cold),
        distance(&down_path.directions[0], &cold),
        distance(up_path.directions.last().unwrap(), &hot),
        distance(down_path.directions.last().unwrap(), &hot),
    ];
    ok &= ends[0] < 1e-3 && ends[1] < 1e-3 && ends[2] < 1e-2 && ends[3] < 1e-2;
    detail += &format!("; endpoint distances cold {:.1e}/{:.1e}, hot {:.1e}/{:.1e}", ends[0], ends[1], ends[2], ends[3]);
    verdict(7, ok, detail)
}

fn c8_dynamics() -> Verdict {
    let s = run_suite(Suite::Dynamics, 100, 8).unwrap();
    let mut stationary = 0.0f64;
    for &(e, eta, t) in &[(0.0, 1.0, 1.0), (0.2, 1.0, 1.0), (0.6, 2.0, 0.3), (1.0, 0.5, 2.0)] {
        let p = SystemParams::new(e, eta, t).unwrap();
        let rho = DensityState::maximally_mixed();
        stationary = stationary.max(master_rhs(&rho, &p).iter().fold(0.0, |m, x| m.max(x.abs())));
        let traj = integrate_master(&rho, &p, 10.0, default_dt(&p)).unwrap();
        for st in &traj.states {
            stationary = stationary.max(st.purity());
        }
    }
    let mut worst_fit = 0.0f64;
    for &(e, eta, t) in &[(0.2, 1.0, 0.3), (0.6, 1.0, 1.0), (0.0, 1.0, 0.4), (0.9, 0.5, 2.0)] {
        let p = SystemParams::new(e, eta, t).unwrap();
        let r = analyze_spectrum(&build_bloch_matrix(&p), DEFAULT_DEGENERACY_TOL).unwrap();
        let (rate, l) = (r.gamma_l[0], r.directions[0].unwrap());
        let traj = integrate_master(&DensityState::new(l).unwrap(), &p, 3.0 / rate, default_dt(&p)).unwrap();
        let fitted = fit_decay_rate(&traj.taus, &projected_signal(&traj, &l));
        worst_fit = worst_fit.max(((fitted - rate) / rate).abs());
    }
    verdict(
        8,
        s.passed() && s.worst_residual <= 1e-8 && stationary <= 1e-12 && worst_fit < 1e-4,
        format!(
            "oracle deviation {:.2e} over {} cases (contractivity {}), stationarity {stationary:.1e}, decay fit rel. error {worst_fit:.1e}",
            s.worst_residual,
            s.samples,
            if s.passed() { "ok" } else { "violated" }
        ),
    )
}

fn c9_commutator() -> Verdict {
    let n = |e, eta, t| superoperator_commutator_norm(&SystemParams::new(e, eta, t).unwrap());
    let zero_bias = [n(1.0, 1.0, 0.5), n(1.0, 3.0, 10.0)];
    let zero_temp = [n(0.2, 1.0, 0.0), n(0.7, 5.0, 0.0)];
    let generic = n(0.2, 1.0, 1.0);
    let zeros = zero_bias.iter().chain(&zero_temp).fold(0.0f64, |m, x| m.max(*x));
    verdict(
        9,
        zeros <= 1e-14 && generic > 1e-6,
        format!("max at eps=1 or theta=0: {zeros:.1e}; at (0.2, 1, 1): {generic:.6}"),
    )
}

fn run_cli(args: &[&str], threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_spinrelax"))
        .args(args)
        .env("SPINRELAX_THREADS", threads)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn c10_determinism() -> Verdict {
    let verify = ["verify", "--samples", "3000", "--seed", "7", "--suite", "all", "--json"];
    let sweep = ["sweep", "--eps-tilde", "0.2", "--eta", "1", "--theta-max", "3", "--n-points", "2001"];
    let v = [run_cli(&verify, "1"), run_cli(&verify, "4"), run_cli(&verify, "4")];
    let s = [run_cli(&sweep, "1"), run_cli(&sweep, "3"), run_cli(&sweep, "3")];
    let same = v.windows(2).all(|w| w[0] == w[1]) && s.windows(2).all(|w| w[0] == w[1]);
    verdict(
        10,
        same && !v[0].is_empty() && !s[0].is_empty(),
        format!("verify {} bytes, sweep {} bytes, identical across reruns and thread counts: {same}", v[0].len(), s[0].len()),
    )
}

fn main() {
    // `cargo test` passes harness flags; a name filter other than ours skips the run
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if args.iter().any(|a| !"acceptance".contains(a.as_str())) {
        return;
    }
    let start = Instant::now();
    let criteria: [fn() -> Verdict; 10] = [
        c1_prop1,
        c2_prop2,
        c3_inequalities,
        c4_trace_sum,
        c5_unbiased,
        c6_regimes,
        c7_hysteresis,
        c8_dynamics,
        c9_commutator,
        c10_determinism,
    ];
    let mut unexpected = Vec::new();
    for c in criteria {
        let v = c();
        let known = KNOWN_UNATTAINABLE.contains(&v.id);
        let tag = match (v.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known unattainable)",
            (false, false) => "FAIL",
            (true, true) => "PASS (listed as unattainable)",
        };
        println!("criterion {:>2}: {tag} - {}", v.id, v.detail);
        if v.pass == known {
            unexpected.push(v.id);
        }
    }
    println!("acceptance suite finished in {:.1}s", start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
