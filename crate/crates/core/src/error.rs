use thiserror::Error;

use crate::model::WeakCoupling;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eps-tilde out of [0,1]: {0}")]
    EpsTildeOutOfRange(f64),

    #[error("eta must be positive and finite: {0}")]
    InvalidEta(f64),

    #[error("theta must be nonnegative and finite: {0}")]
    InvalidTheta(f64),

    #[error("non-finite cubic coefficient")]
    NonFiniteCoefficients,

    #[error("matrix not in M_{{3,R}} (membership defect {defect:.3e})")]
    NotM3R { defect: f64 },

    #[error("triangle criterion needs nonnegative real parts, and the sign conditions fail")]
    Prop2HypothesisNotMet,

    #[error("{lambda} is not an eigenvalue (relative residual {residual:.3e})")]
    NotAnEigenvalue { lambda: f64, residual: f64 },

    #[error("degenerate branch point at lambda = {0}")]
    DegenerateBranchPoint(f64),

    /// The weak-coupling coth form diverges at θ=0; the limit coth→1 is carried along.
    #[error("weak-coupling coth divergent form at θ=0 handled as limit coth→1")]
    WeakCouplingZeroTemperature { limit: WeakCoupling },

    #[error("state left the Bloch ball at step {step} (|r| = {norm}); reduce dt")]
    InvariantBreach { step: usize, norm: f64 },

    #[error("invalid integration settings: {0}")]
    InvalidIntegration(String),

    #[error("invalid temperature range: {0}")]
    InvalidRange(String),

    #[error("range endpoint theta = {theta} lies in the degenerate band; widen the range")]
    EndpointDegenerate { theta: f64 },

    #[error("no sign change of the window indicator in eps-tilde range [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("sweep contains no real eigenvalue")]
    NoRealBranch,

    #[error("sweep is not sorted by theta")]
    UnsortedSweep,
}
