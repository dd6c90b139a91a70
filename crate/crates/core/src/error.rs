use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("wavelength {lambda_um} um is outside the Sellmeier window [{min}, {max}] um")]
    WavelengthOutOfRange { lambda_um: f64, min: f64, max: f64 },
    #[error("Sellmeier pole crossed at {lambda_um} um")]
    SellmeierPole { lambda_um: f64 },
    #[error("Sellmeier radicand is not positive at {lambda_um} um")]
    NegativeRadicand { lambda_um: f64 },
    #[error("not phase-matchable: {0}")]
    NotPhaseMatchable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate shaper: transfer function is identically zero")]
    DegenerateShaper,
    #[error("no parametric gain: leading gain is zero")]
    NoParametricGain,
    #[error("frexel band {0} contains no grid point")]
    EmptyBand(usize),
    #[error("objective stayed non-finite after {0} resamples")]
    NonFiniteObjective(usize),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;
