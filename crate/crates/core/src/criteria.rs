//! Sign criteria on the real parts of eigenvalues for 3×3 matrices with a
//! real characteristic polynomial (the class M_{3,R}), and the inequalities
//! among relaxation constants that follow from them.
//!
//! For A ∈ M_{3,R} with f(λ) = det(λ − A):
//!
//! * all Re λ_i ≥ 0  ⇔  tr A ≥ 0, det A ≥ 0, tr adj A ≥ 0, f(tr A) ≥ 0;
//! * given the above, the triangle inequalities Re λ_i + Re λ_j ≥ Re λ_k
//!   hold  ⇔  f(tr A / 2) ≥ 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det, max_abs, principal_minor_sum, shifted, trace, CMat3};
use crate::spectrum::{Regime, SpectrumReport};

pub const MEMBERSHIP_TOL: f64 = 1e-10;
pub const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M3RFunctionals {
    pub trace: f64,
    pub det: f64,
    pub tr_adj: f64,
    /// f(tr A)
    pub f_at_trace: f64,
    /// f(tr A / 2)
    pub f_at_half_trace: f64,
    /// Largest imaginary part among tr, tr adj, det, each divided by the
    /// matching power of the entry scale max(1, max|a_ij|).
    pub membership_defect: f64,
}

impl M3RFunctionals {
    /// Smallest |value| among the four sign functionals tr, det, tr adj, f(tr).
    pub fn boundary_distance(&self) -> f64 {
        [self.trace, self.det, self.tr_adj, self.f_at_trace]
            .iter()
            .map(|x| x.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn m3r_functionals(m: &CMat3) -> Result<M3RFunctionals> {
    let s = 1f64.max(max_abs(m));
    let tr = trace(m);
    let ta = principal_minor_sum(m);
    let d = det(m);
    let membership_defect = (tr.im.abs() / s)
        .max(ta.im.abs() / (s * s))
        .max(d.im.abs() / (s * s * s));
    if !(membership_defect <= MEMBERSHIP_TOL) {
        return Err(Error::NotM3R {
            defect: membership_defect,
        });
    }
    // f evaluated as a determinant of the shifted matrix rather than from
    // the expanded coefficients; exact zeros stay exact.
    let f = |x: f64| det(&shifted(m, Complex64::new(x, 0.0))).re;
    Ok(M3RFunctionals {
        trace: tr.re,
        det: d.re,
        tr_adj: ta.re,
        f_at_trace: f(tr.re),
        f_at_half_trace: f(tr.re / 2.0),
        membership_defect,
    })
}

/// All eigenvalues have nonnegative real part.
pub fn prop1_positive_real_parts(fun: &M3RFunctionals) -> bool {
    fun.trace >= -SIGN_TOL
        && fun.det >= -SIGN_TOL
        && fun.tr_adj >= -SIGN_TOL
        && fun.f_at_trace >= -SIGN_TOL
}

/// Triangle inequalities on the real parts; requires the nonnegative-real-part conditions.
pub fn prop2_triangle(fun: &M3RFunctionals) -> Result<bool> {
    if !prop1_positive_real_parts(fun) {
        return Err(Error::Prop2HypothesisNotMet);
    }
    Ok(fun.f_at_half_trace >= -SIGN_TOL)
}

/// Triangle inequalities Re λ_i + Re λ_j ≥ Re λ_k on three numbers, with a
/// tolerance relative to their sum.
pub fn triangle_holds(x: [f64; 3]) -> bool {
    let tol = SIGN_TOL * 1f64.max(x.iter().map(|v| v.abs()).sum());
    x[0] + x[1] >= x[2] - tol && x[1] + x[2] >= x[0] - tol && x[2] + x[0] >= x[1] - tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InequalityStatus {
    Checked,
    /// Degenerate spectrum; inequalities hold with equality expected.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationInequalities {
    pub status: InequalityStatus,
    /// 2Γ_T ≥ Γ_L (ComplexPair only).
    pub transverse_bound: Option<bool>,
    /// 2Γ_T − Γ_L
    pub transverse_margin: Option<f64>,
    /// The three triangle inequalities among Γ_L^(i) (ThreeReal and Degenerate).
    pub triangle: Option<[bool; 3]>,
}

impl RelaxationInequalities {
    pub fn all_hold(&self) -> bool {
        self.transverse_bound.unwrap_or(true) && self.triangle.is_none_or(|t| t.iter().all(|&b| b))
    }
}

pub fn check_relaxation_inequalities(report: &SpectrumReport) -> RelaxationInequalities {
    match report.regime {
        Regime::ComplexPair => {
            let gt = report.gamma_t.unwrap_or(0.0);
            let margin = 2.0 * gt - report.gamma_l[0];
            RelaxationInequalities {
                status: InequalityStatus::Checked,
                transverse_bound: Some(margin >= -SIGN_TOL),
                transverse_margin: Some(margin),
                triangle: None,
            }
        }
        Regime::ThreeReal | Regime::Degenerate => {
            let g = &report.gamma_l;
            let tol = SIGN_TOL * 1f64.max(g.iter().map(|v| v.abs()).sum());
            let t = [
                g[0] + g[1] >= g[2] - tol,
                g[1] + g[2] >= g[0] - tol,
                g[2] + g[0] >= g[1] - tol,
            ];
            RelaxationInequalities {
                status: if report.regime == Regime::Degenerate {
                    InequalityStatus::Boundary
                } else {
                    InequalityStatus::Checked
                },
                transverse_bound: None,
                transverse_margin: None,
                triangle: Some(t),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::build_bloch_matrix;
    use crate::linalg::{c, from_real, identity};
    use crate::model::SystemParams;
    use crate::spectrum::{analyze_spectrum, DEFAULT_DEGENERACY_TOL};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn identity_functionals() {
        let f = m3r_functionals(&identity()).unwrap();
        assert!(close(f.trace, 3.0) && close(f.det, 1.0) && close(f.tr_adj, 3.0));
        assert!(close(f.f_at_trace, 8.0));
        assert!(close(f.f_at_half_trace, 0.125));
        assert!(prop1_positive_real_parts(&f));
        assert_eq!(prop2_triangle(&f), Ok(true));
    }

    #[test]
    fn rotation_block_functionals() {
        // eigenvalues 1 ± 2i and 3; f(λ) = (λ − 3)((λ − 1)² + 4)
        let m = from_real([[1.0, -2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 3.0]]);
        let f = m3r_functionals(&m).unwrap();
        let oracle = |x: f64| (x - 3.0) * ((x - 1.0).powi(2) + 4.0);
        assert!(close(f.trace, 5.0) && close(f.det, 15.0) && close(f.tr_adj, 11.0));
        assert!(close(f.f_at_trace, oracle(5.0)) && close(f.f_at_trace, 40.0));
        assert!(close(f.f_at_half_trace, oracle(2.5)) && close(f.f_at_half_trace, -3.125));
    }

    #[test]
    fn negative_eigenvalue_fails_prop1() {
        let m = from_real([[-1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]]);
        let f = m3r_functionals(&m).unwrap();
        assert!(close(f.det, -4.0));
        assert!(!prop1_positive_real_parts(&f));
        assert_eq!(prop2_triangle(&f), Err(Error::Prop2HypothesisNotMet));
    }

    #[test]
    fn f_at_trace_clause_is_essential() {
        // λ³ − 3λ² + 5.25λ − 37 = (λ − 4)(λ² + λ + 9.25), roots 4, −0.5 ± 3i
        let m = from_real([[0.0, 0.0, 37.0], [1.0, 0.0, -5.25], [0.0, 1.0, 3.0]]);
        let f = m3r_functionals(&m).unwrap();
        assert!(close(f.trace, 3.0) && close(f.det, 37.0) && close(f.tr_adj, 5.25));
        let oracle = (3.0f64 - 4.0) * (9.0 + 3.0 + 9.25);
        assert!(close(oracle, -21.25));
        assert!(close(f.f_at_trace, oracle));
        assert!(!prop1_positive_real_parts(&f));
    }

    #[test]
    fn triangle_violation() {
        let m = from_real([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 3.0]]);
        let f = m3r_functionals(&m).unwrap();
        assert!(close(f.f_at_half_trace, 1.5f64.powi(2) * -0.5));
        assert!(close(f.f_at_half_trace, -1.125));
        assert_eq!(prop2_triangle(&f), Ok(false));
        assert!(!triangle_holds([1.0, 1.0, 3.0]));
    }

    #[test]
    fn rejects_non_member() {
        let mut m = identity();
        m[0][0] = c(1.0, 1.0);
        assert!(matches!(m3r_functionals(&m), Err(Error::NotM3R { .. })));
    }

    #[test]
    fn bloch_matrices_satisfy_both_propositions() {
        for &(e, eta, t) in &[
            (0.0, 1.0, 0.3),
            (0.0, 10.0, 50.0),
            (0.2, 1.0, 1.1),
            (0.6, 0.1, 3.0),
            (1.0, 1.0, 2.0),
            (0.4, 2.0, 0.0),
        ] {
            let a = build_bloch_matrix(&SystemParams::new(e, eta, t).unwrap());
            let f = m3r_functionals(&a.entries).unwrap();
            assert!(f.membership_defect <= 1e-12, "{}", f.membership_defect);
            assert!(prop1_positive_real_parts(&f));
            assert_eq!(prop2_triangle(&f), Ok(true), "{e} {eta} {t} {f:?}");
            // closed forms: f(tr/2) = ε̃²γ, f(tr) = 2γ³ + 2γ − Δ̃²γ
            let g = a.gamma_theta;
            let scale = 1f64.max(g).powi(3);
            assert!((f.f_at_half_trace - e * e * g).abs() <= 1e-12 * scale);
            let d2 = 1.0 - e * e;
            assert!((f.f_at_trace - (2.0 * g * g * g + 2.0 * g - d2 * g)).abs() <= 1e-12 * scale);
        }
    }

    fn inequalities(e: f64, eta: f64, t: f64) -> RelaxationInequalities {
        let a = build_bloch_matrix(&SystemParams::new(e, eta, t).unwrap());
        check_relaxation_inequalities(&analyze_spectrum(&a, DEFAULT_DEGENERACY_TOL).unwrap())
    }

    #[test]
    fn unbiased_equality() {
        let r = inequalities(0.0, 1.0, 0.25);
        assert_eq!(r.transverse_bound, Some(true));
        assert!(r.transverse_margin.unwrap().abs() < 1e-14);
    }

    #[test]
    fn no_tunneling_margin() {
        let r = inequalities(1.0, 1.0, 0.4);
        assert!((r.transverse_margin.unwrap() - 1.6).abs() < 1e-14);
        assert!(r.all_hold());
    }

    #[test]
    fn zero_temperature_boundary_equality() {
        let r = inequalities(0.2, 1.0, 0.0);
        assert_eq!(r.transverse_margin, Some(0.0));
        assert!(r.all_hold());
    }

    #[test]
    fn degenerate_is_tagged_boundary() {
        let r = inequalities(0.0, 1.0, 1.0);
        assert_eq!(r.status, InequalityStatus::Boundary);
        assert!(r.all_hold());
    }
}
