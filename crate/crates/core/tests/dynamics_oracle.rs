//! Direct integration of the master equation against the Bloch-matrix
//! propagator and the spectrum.

use spinrelax::dynamics::{default_dt, fit_decay_rate, projected_signal};
use spinrelax::spectrum::DEFAULT_DEGENERACY_TOL;
use spinrelax::verify::{dynamics_sample, run_suite, Suite};
use spinrelax::{
    analyze_spectrum, build_bloch_matrix, integrate_master, master_rhs, propagate_expectations,
    superoperator_commutator_norm, DensityState, ExpectationVector, Regime, SystemParams,
};

#[test]
fn rk4_matches_propagator_on_random_cases() {
    let mut worst = 0.0f64;
    for index in 0..100 {
        let (params, rho0) = dynamics_sample(2024, index);
        let a = build_bloch_matrix(&params);
        let traj = integrate_master(&rho0, &params, 10.0 / a.gamma_theta, default_dt(&params)).unwrap();
        let v0 = ExpectationVector::from_state(&rho0, &params);
        for k in (0..traj.len()).step_by(97).chain([traj.len() - 1]) {
            let rk4 = ExpectationVector::from_state(&traj.states[k], &params);
            let exact = propagate_expectations(&v0, &a, traj.taus[k]);
            worst = worst.max(rk4.max_abs_diff(&exact));
            assert!(rk4.conjugacy_defect() < 1e-14);
        }
    }
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn verify_suite_agrees() {
    let s = run_suite(Suite::Dynamics, 20, 9).unwrap();
    assert!(s.passed(), "{s:?}");
    assert!(s.worst_residual <= 1e-8);
}

#[test]
fn maximally_mixed_state_is_stationary() {
    for &(e, eta, t) in &[(0.0, 1.0, 1.0), (0.2, 1.0, 1.0), (0.7, 3.0, 0.4), (1.0, 0.1, 5.0)] {
        let params = SystemParams::new(e, eta, t).unwrap();
        let rho = DensityState::maximally_mixed();
        assert!(master_rhs(&rho, &params).iter().all(|x| x.abs() <= 1e-12));
        let traj = integrate_master(&rho, &params, 5.0, default_dt(&params)).unwrap();
        for s in &traj.states {
            assert!(s.bloch_vector.iter().all(|x| x.abs() <= 1e-12));
        }
    }
}

#[test]
fn bloch_length_never_grows() {
    for index in 0..20 {
        let (params, rho0) = dynamics_sample(77, index);
        let a = build_bloch_matrix(&params);
        let traj = integrate_master(&rho0, &params, 10.0 / a.gamma_theta, default_dt(&params)).unwrap();
        for w in traj.states.windows(2) {
            assert!(w[1].purity() <= w[0].purity() + 1e-10);
        }
    }
}

#[test]
fn longitudinal_signal_decays_at_gamma_l() {
    for &(e, eta, t) in &[(0.2, 1.0, 0.3), (0.6, 1.0, 1.0), (0.0, 1.0, 0.4), (0.2, 1.0, 1.1)] {
        let params = SystemParams::new(e, eta, t).unwrap();
        let a = build_bloch_matrix(&params);
        let report = analyze_spectrum(&a, DEFAULT_DEGENERACY_TOL).unwrap();
        // slowest longitudinal mode; in the ThreeReal window any of the three works
        let k = if report.regime == Regime::ThreeReal { 1 } else { 0 };
        let (rate, l) = (report.gamma_l[k], report.directions[k].unwrap());
        let rho0 = DensityState::new(l).unwrap();
        let traj = integrate_master(&rho0, &params, 3.0 / rate, default_dt(&params)).unwrap();
        let fitted = fit_decay_rate(&traj.taus, &projected_signal(&traj, &l));
        assert!(((fitted - rate) / rate).abs() < 1e-4, "{fitted} vs {rate}");
    }
}

#[test]
fn commutator_checks() {
    let norm = |e, eta, t| superoperator_commutator_norm(&SystemParams::new(e, eta, t).unwrap());
    assert!(norm(1.0, 1.0, 2.0) <= 1e-14);
    assert!(norm(0.2, 1.0, 0.0) <= 1e-14);
    let n = norm(0.2, 1.0, 1.0);
    assert!(n > 1e-6);
    // √2·γ·Δ̃
    assert!((n - 2f64.sqrt() * 2.0 * 0.96f64.sqrt()).abs() < 1e-12);
}
