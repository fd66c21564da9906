use std::io;

/// Errors raised by model construction, invariant evaluation and the CLI.
///
/// Every message starts with the variant name so that callers (and the CLI
/// exit path) can match on it textually.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("UnknownModel: no registered model named `{0}`")]
    UnknownModel(String),
    #[error("MissingParameter: model `{model}` requires parameter `{param}`")]
    MissingParameter { model: String, param: String },
    #[error("UnknownParameter: `{0}` is not accepted here")]
    UnknownParameter(String),
    #[error("InvalidOccupation: n_occ={n_occ} must satisfy 0 < n_occ < n_orb={n_orb}")]
    InvalidOccupation { n_occ: usize, n_orb: usize },
    #[error("NotHermitian: deviation {0:.3e} exceeds tolerance")]
    NotHermitian(f64),
    #[error("NotUnitary: deviation {0:.3e} exceeds tolerance")]
    NotUnitary(f64),
    #[error("GapClosed: gap {gap:.3e} at k={k:?}")]
    GapClosed { gap: f64, k: Vec<f64> },
    #[error("UnsupportedCount: gamma set of size {0} (supported: 3, 5)")]
    UnsupportedCount(usize),
    #[error("DimensionMismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("InconsistentInput: {0}")]
    InconsistentInput(String),
    #[error("GridTooCoarse: {0}")]
    GridTooCoarse(String),
    #[error("NotConverged: {what} residual {residual:.3e} (raw {raw:.6})")]
    NotConverged { what: String, raw: f64, residual: f64 },
    #[error("NoChiralSymmetry: violation {0:.3e}")]
    NoChiralSymmetry(f64),
    #[error("NoTimeReversal: {0}")]
    NoTimeReversal(String),
    #[error("OddOccupation: n_occ={0} must be even")]
    OddOccupation(usize),
    #[error("VanishingField: |d|={norm:.3e} at k={k:?}")]
    VanishingField { norm: f64, k: Vec<f64> },
    #[error("SampleOnCriticalPoint: m={sample} is within 1e-3 of critical value {critical}")]
    SampleOnCriticalPoint { sample: f64, critical: f64 },
    #[error("UnsampledInterval: no sample in ({lo}, {hi})")]
    UnsampledInterval { lo: f64, hi: f64 },
    #[error("SingularGreen: min singular value {sigma:.3e} at omega={omega}, k={k:?}")]
    SingularGreen { sigma: f64, omega: f64, k: Vec<f64> },
    #[error("SingularZeroFrequency: G(0,k) not invertible at k={0:?}")]
    SingularZeroFrequency(Vec<f64>),
    #[error("NonUniformFilling: {0} negative eigenvalues at k={1:?}, expected {2}")]
    NonUniformFilling(usize, Vec<f64>, usize),
    #[error("UnknownLabel: `{0}` is not a Cartan label")]
    UnknownLabel(String),
    #[error("ComplexClassUnsupported: torus decomposition is only defined for real classes, got {0}")]
    ComplexClassUnsupported(String),
    #[error("LongRangeModel: Fourier harmonic |n|={harmonic} has norm {norm:.3e}")]
    LongRangeModel { harmonic: usize, norm: f64 },
    #[error("WidthTooSmall: W={0} (minimum {1})")]
    WidthTooSmall(usize, usize),
    #[error("EdgesHybridized: edge state weight {0:.3e} on the opposite edge")]
    EdgesHybridized(f64),
    #[error("UsageError: {0}")]
    Usage(String),
    #[error("UnsupportedFormat: {0}")]
    UnsupportedFormat(String),
    #[error("ParseError: {0}")]
    Parse(String),
    #[error("IoError: {0}")]
    Io(#[from] io::Error),
    #[error("SerializationError: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the failure is a violated precondition of the requested
    /// operation rather than an internal fault.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::NotConverged { .. } | Error::Io(_) | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
