//! Error types shared across the crate.

use thiserror::Error;

/// Violations of core model invariants (construction-time checks).
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("point must have at least one coordinate")]
    EmptyPoint,
    #[error("non-finite coordinate {value} at index {index}")]
    NonFiniteCoord { index: usize, value: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Failures of proximal computations.
#[derive(Debug, Error)]
pub enum ProxError {
    #[error("bisection bracket expansion exceeded |x| + 1e6 (x = {x})")]
    BracketExpansion { x: f64 },
    #[error("no proximal rule for component {which} of regularizer kind {kind}")]
    UnsupportedComponent { kind: String, which: &'static str },
    #[error("regularizer kind {kind} has no full proximal operator")]
    NoFullProx { kind: String },
}

/// Failures raised while building or interrogating a potential.
#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("precision matrix is not symmetric (max asymmetry {max_asym})")]
    NotSymmetric { max_asym: f64 },
    #[error("precision matrix is not positive definite (min eigenvalue {min_eig})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("dissipativity requires mu_f > 0, got {mu_f}")]
    NonDissipativeF { mu_f: f64 },
    #[error("smooth f callback did not declare (mu_f, R_f); cannot derive dissipativity")]
    MissingDissipativityDeclaration,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Failure of a single transition-kernel step.
#[derive(Debug, Error)]
pub enum StepError {
    #[error("non-finite state after step {step}")]
    NonFiniteState { step: u64 },
    #[error("non-finite drift at step {step}")]
    NonFiniteDrift { step: u64 },
    #[error("the simplified scheme needs a smooth r2 gradient callback")]
    MissingSmoothR2,
    #[error(transparent)]
    Prox(#[from] ProxError),
}

/// Failure of a multi-chain run, tagged with the offending chain.
#[derive(Debug, Error)]
#[error("chain {chain}: {source}")]
pub struct SamplerError {
    pub chain: usize,
    #[source]
    pub source: StepError,
}

/// Failures of the evaluation layer (quadrature, histograms, KL).
#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("quadrature did not reach tolerance {tol} within the subdivision budget")]
    QuadratureBudget { tol: f64 },
    #[error("histogram edges must be strictly increasing with at least two entries")]
    BadEdges,
    #[error("histogram edges of the two inputs differ")]
    EdgeMismatch,
    #[error("histogram input contains no samples inside the grid")]
    EmptySamples,
    #[error("need at least 2 samples for moments, got {got}")]
    TooFewSamples { got: usize },
    #[error("input must be normalized (total mass {total})")]
    NotNormalized { total: f64 },
    #[error("diagnostics require 2-dimensional potentials, got d = {dim}")]
    NotTwoDimensional { dim: usize },
}
