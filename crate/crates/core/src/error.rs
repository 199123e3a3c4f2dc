use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("root finder did not converge after {iterations} iterations (degree {degree})")]
    NonConvergence { iterations: usize, degree: usize },
    #[error("degenerate Moebius tuple: |ad - bc| = {det:e} is below threshold")]
    DegenerateMoebius { det: f64 },
    #[error("unknown domain preset `{0}`")]
    UnknownPreset(String),
    #[error("sampler rejected {rejections} consecutive points near the pole")]
    DegenerateSample { rejections: usize },
    #[error("input of degree {degree} exceeds operator horizon {horizon}")]
    DegreeOutOfRange { degree: usize, horizon: usize },
    #[error("bounded degree {bounded} must equal the horizon {horizon}")]
    HorizonMismatch { bounded: usize, horizon: usize },
    #[error("operator requires a bounded degree")]
    UnboundedOperator,
    #[error("bivariate input is identically zero")]
    ZeroInput,
    #[error("operator is identically zero on its horizon")]
    ZeroOperator,
    #[error("operator annihilated every sampled polynomial")]
    AllImagesZero,
    #[error("empty polynomial set")]
    EmptyInput,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerical kernels (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::DegenerateSample { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
