use thiserror::Error;

/// Every failure mode surfaced by the library. `code()` gives the stable
/// upper-case identifier used in reports and by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("family members live in different ambient spaces")]
    AmbientMismatch,
    #[error("diameter is infinite (points in distinct components)")]
    InfiniteDiameter,
    #[error("ball has more than {cap} elements")]
    BallTooLarge { cap: usize },
    #[error("unsupported subgroup selector: {0}")]
    UnsupportedSubgroup(String),
    #[error("element outside the domain of the norm: {0}")]
    DomainMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudgetExceeded(String),
    #[error("matrix is not unipotent upper triangular")]
    NotUnipotent,
    #[error("dilation parameter does not expand (norm <= 1)")]
    ThetaNotExpanding,
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("strategy stuck: {0}")]
    StrategyStuck(String),
    #[error("challenges exhausted before the family became bounded: {0}")]
    ChallengesExhausted(String),
    #[error("height function is not 1-Lipschitz: {0}")]
    NotLipschitz(String),
    #[error("search budget exceeded")]
    SearchBudgetExceeded,
    #[error("certificate has no step with a large enough challenge")]
    NoSuitableStep,
    #[error("dimension cap exceeded: {0}")]
    DimensionCapExceeded(usize),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::AmbientMismatch => "AMBIENT_MISMATCH",
            Error::InfiniteDiameter => "INFINITE_DIAMETER",
            Error::BallTooLarge { .. } => "BALL_TOO_LARGE",
            Error::UnsupportedSubgroup(_) => "UNSUPPORTED_SUBGROUP",
            Error::DomainMismatch(_) => "DOMAIN_MISMATCH",
            Error::SingularMatrix => "SINGULAR_MATRIX",
            Error::EnumerationBudgetExceeded(_) => "ENUMERATION_BUDGET_EXCEEDED",
            Error::NotUnipotent => "NOT_UNIPOTENT",
            Error::ThetaNotExpanding => "THETA_NOT_EXPANDING",
            Error::MalformedCertificate(_) => "MALFORMED_CERTIFICATE",
            Error::StrategyStuck(_) => "STRATEGY_STUCK",
            Error::ChallengesExhausted(_) => "CHALLENGES_EXHAUSTED",
            Error::NotLipschitz(_) => "NOT_LIPSCHITZ",
            Error::SearchBudgetExceeded => "SEARCH_BUDGET_EXCEEDED",
            Error::NoSuitableStep => "NO_SUITABLE_STEP",
            Error::DimensionCapExceeded(_) => "DIMENSION_CAP_EXCEEDED",
            Error::BadParams(_) => "BAD_PARAMS",
            Error::UnsupportedDimension(_) => "UNSUPPORTED_DIMENSION",
            Error::InvalidMetric(_) => "INVALID_METRIC",
            Error::Parse(_) => "PARSE_ERROR",
            Error::Io(_) => "IO_ERROR",
            Error::Json(_) => "JSON_ERROR",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
