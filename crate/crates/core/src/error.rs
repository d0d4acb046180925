use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {n}: need n >= {min}")]
    InvalidDimension { n: usize, min: usize },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("Killing form of Hermitian matrices has imaginary part {imag:.3e}")]
    ComplexKillingForm { imag: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("coordinate {index} = {value} lies outside the chart domain")]
    OutsideDomain { index: usize, value: f64 },

    #[error("expected {expected} coordinates, got {found}")]
    CoordinateCount { expected: usize, found: usize },

    #[error("U^dagger dU is not in the Lie algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },

    #[error("chart is degenerate at this point (|det omega| = {det:.3e})")]
    ChartDegenerate { det: f64 },

    #[error("metric is not invertible at this point")]
    DegenerateMetric,

    #[error("amplitude too small for gradient evaluation (p = {p:.3e} < {threshold:.1e})")]
    NearZeroAmplitude { p: f64, threshold: f64 },

    #[error("phase reconstruction undefined: |grad eta|^2 - (n-2)/n = {value:.3e}")]
    ReconstructionUndefined { value: f64 },

    #[error("loop is not closed (endpoint mismatch {gap:.3e})")]
    OpenLoop { gap: f64 },

    #[error("loop needs at least 2 samples")]
    LoopTooShort,

    #[error("loop passes near a zero of the amplitude at sample {index} (p = {p:.3e})")]
    SingularLoop { index: usize, p: f64 },

    #[error("phase step {step:.3} rad on segment {segment} not resolved after refinement")]
    InsufficientResolution { segment: usize, step: f64 },

    #[error("accumulated phase is not an integer multiple of 2pi (residue {residue:.3e})")]
    NonIntegerWinding { residue: f64 },

    #[error(
        "phase-gradient direction undefined: states are orthogonal (|<f|i>|^2 = {overlap:.3e})"
    )]
    UndefinedDirection { overlap: f64 },

    #[error("section of states is degenerate at this point")]
    DegenerateSection,

    #[error("reference state of the chart differs from the pair's initial state")]
    ReferenceStateMismatch,

    #[error("need at least {min} samples, got {found}")]
    TooFewSamples { min: usize, found: usize },

    #[error("internal consistency violation: {0}")]
    Internal(String),
}
