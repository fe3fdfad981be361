//! Strong-coupling spin relaxation in the spin-boson model.
//!
//! The dynamics of the spin reduce to a 3×3 Bloch matrix A whose spectrum
//! fixes the relaxation constants. This crate builds A from the model
//! parameters, solves its characteristic cubic in closed form, locates the
//! temperatures where a complex pair of eigenvalues splits into two real
//! ones, checks the sign criteria and inequalities satisfied by the
//! relaxation constants, and integrates the master equation as an
//! independent cross-check.

// `!(x <= tol)` is used on purpose so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bloch;
pub mod criteria;
pub mod cubic;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod output;
pub mod sampling;
pub mod spectrum;
pub mod sweep;
pub mod verify;

pub use bloch::{build_bloch_matrix, BlochMatrix, CharCoeffs};
pub use criteria::{
    check_relaxation_inequalities, m3r_functionals, prop1_positive_real_parts, prop2_triangle,
    M3RFunctionals, RelaxationInequalities,
};
pub use cubic::{solve_cubic, CubicRoots};
pub use dynamics::{
    integrate_master, master_rhs, propagate_expectations, superoperator_commutator_norm,
    DensityState, ExpectationVector, Trajectory,
};
pub use error::{Error, Result};
pub use model::{gamma_theta, weak_coupling_constants, SystemParams, WeakCoupling};
pub use sampling::{sample_m3r_matrix, SampleStyle};
pub use spectrum::{analyze_spectrum, longitudinal_direction, Regime, SpectrumReport};
pub use sweep::{
    critical_epsilon, find_bifurcations, sweep_temperature, trace_branch, track_direction_jumps,
    BifurcationReport, BranchPath, DirectionJump, SweepRecord, TraceDirection,
};
