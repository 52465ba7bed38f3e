use thiserror::Error;

/// Errors raised by the library. Each variant maps to a stable string code
/// used by the command-line JSON error objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid level {0}: the level must be an integer n >= 2 or infinity")]
    InvalidLevel(String),
    #[error("operation requires a finite level, got n = infinity")]
    InfiniteLevel,
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(String, String),
    #[error("invalid simple index {0}; expected 1 or 2")]
    InvalidSimple(usize),
    #[error("object {0} does not exist at this level")]
    NoSuchObject(String),
    #[error("malformed braid word: {0}")]
    BraidParse(String),
    #[error("braid element is not in the image of the braid group: {0}")]
    InvalidBraid(String),
    #[error("point lies on the discriminant (|4a^3 + 27b^2| = {0:e})")]
    Discriminant(f64),
    #[error("quadrature failed to converge: {0}")]
    NonConvergence(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("lost track of roots or branches: {0}")]
    TrackingLoss(String),
    #[error("stencil degenerate: {0}")]
    Degenerate(String),
    #[error("fit quality too poor: {0}")]
    FitQuality(String),
    #[error("invalid central charge: {0}")]
    InvalidCharge(String),
    #[error("heart is not expressed in canonical coordinates: {0}")]
    NonCanonicalHeart(String),
    #[error("iteration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidLevel(_) => "invalid_level",
            Error::InfiniteLevel => "infinite_level",
            Error::LevelMismatch(..) => "level_mismatch",
            Error::InvalidSimple(_) => "invalid_simple",
            Error::NoSuchObject(_) => "no_such_object",
            Error::BraidParse(_) => "braid_parse",
            Error::InvalidBraid(_) => "invalid_braid",
            Error::Discriminant(_) => "discriminant",
            Error::NonConvergence(_) => "non_convergence",
            Error::SingularPoint(_) => "singular_point",
            Error::TrackingLoss(_) => "tracking_loss",
            Error::Degenerate(_) => "degenerate",
            Error::FitQuality(_) => "fit_quality",
            Error::InvalidCharge(_) => "invalid_charge",
            Error::NonCanonicalHeart(_) => "non_canonical_heart",
            Error::CapExceeded(_) => "cap_exceeded",
            Error::InvalidPath(_) => "invalid_path",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
