use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("grid has {requested} amplitudes, above the cap of {cap}")]
    GridTooLarge { requested: usize, cap: usize },

    #[error("{what} = {value} is not an integer multiple of the grid step {step}")]
    Incommensurate { what: &'static str, value: f64, step: f64 },

    #[error("operation needs a square phase-space grid (dx == dp); got dx = {dx}, dp = {dp}")]
    NonSquareGrid { dx: f64, dp: f64 },

    #[error("rescaled Fourier transform needs dx == dp * d^2 (M = 2P); got dx = {dx}, dp*d^2 = {required}")]
    RescaleUnsupported { dx: f64, required: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("observable is not certified as a Γ_x, Γ_y or Γ_z readout")]
    Uncertified,

    #[error("observable is not Hermitian: {0}")]
    NonHermitian(String),

    #[error("observable is not a function of a single quadrature")]
    NotQuadratureDiagonal,

    #[error("observable classes do not match the requested x, y, z slots")]
    ClassMismatch,

    #[error("function value {0} lies outside [-1, 1]")]
    OutOfUnitRange(f64),

    #[error("two-mode state with {requested} amplitudes exceeds the cap of {cap}")]
    MemoryCap { requested: usize, cap: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            Error::Io(e.to_string())
        } else {
            Error::Format(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
