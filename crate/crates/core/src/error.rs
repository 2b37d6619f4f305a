use num_complex::Complex64;
use thiserror::Error;

/// Errors produced anywhere in the transform, statistics and I/O layers.
#[derive(Debug, Error)]
pub enum NftError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("degenerate pulse: {0}")]
    DegeneratePulse(String),

    #[error("invalid shaping matrix: {0}")]
    InvalidShapingMatrix(String),

    #[error("eigenvalue not in upper half-plane: {0}")]
    NotUpperHalfPlane(Complex64),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("grid too wide for spectrum: |Im(lambda)|*T/2 = {exponent:.3} exceeds {limit}")]
    GridTooWide { exponent: f64, limit: f64 },

    #[error("evaluation at pole lambda = {0}")]
    EvaluationAtPole(Complex64),

    #[error("eigensolver failed to converge: {0}")]
    EigenNonConvergence(String),

    #[error("insufficient discrete modes: expected {expected}, found {found} above threshold")]
    InsufficientModes { expected: usize, found: usize },

    #[error("unstable Jost normalization: |denominator| = {denominator:.3e}")]
    UnstableNormalization { denominator: f64 },

    #[error("near-defective eigenvalue at lambda = {lambda}: |phi^H psi| = {overlap:.3e}")]
    NearDefective { lambda: Complex64, overlap: f64 },

    #[error("degenerate spectrum at lambda = {0}: reduced resolvent is singular")]
    SingularResolvent(Complex64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = NftError> = std::result::Result<T, E>;
