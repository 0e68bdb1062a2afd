use thiserror::Error;

/// Errors raised across the simulator, compiler and command layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not unitary (max |UU† - I| = {deviation:e})")]
    NonUnitaryOperator { deviation: f64 },

    #[error("cannot compare against the zero matrix")]
    DegenerateComparison,

    #[error("matrix is not diagonal with ±1 entries")]
    NotDiagonalPmOne,

    #[error("initial state has k1 = k2 = 0")]
    ZeroState,

    #[error("state is not a pure (rank-1, unit-trace) density matrix")]
    NotPure,

    #[error(
        "ambiguous readout: single-quantum magnitude {single:e}, double-quantum magnitude {double:e}"
    )]
    AmbiguousReadout { single: f64, double: f64 },

    #[error("bad acquisition parameters: {0}")]
    BadAcquisition(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("compiled program for {gate} does not match its target (residual {residual:e})")]
    CompilationMismatch { gate: String, residual: f64 },

    #[error("invalid truth table {0:?}: expected 0b followed by four binary digits")]
    BadTruthTable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
