use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("chain complex is not a complex: d{index}+1 * d{index} is nonzero")]
    ComplexNotExactlyComposable { index: usize },

    #[error("polyhedron is empty")]
    EmptyInput,

    #[error("fan is not complete: {0}")]
    NotComplete(String),

    #[error("fan is not smooth: cone {0} has determinant other than +-1")]
    NotSmooth(usize),

    #[error("ray set {0:?} does not span a cone of the fan")]
    NotACone(Vec<usize>),

    #[error("star subdivision needs a cone of dimension at least 2, got {0:?}")]
    DegenerateSubdivision(Vec<usize>),

    #[error("unknown fan family `{0}`")]
    UnknownFamily(String),

    #[error("weight pattern {0} has nonzero cohomology on an unbounded chamber")]
    UnboundedCohomologyChamber(String),

    #[error("ampleness hypothesis was not verified for this instance")]
    HypothesisNotVerified,

    #[error("no 0 <= d <= 1 makes L - d D' ample")]
    HypothesisInfeasible,

    #[error("restricted class is not ample on stratum {0:?}")]
    StratumHypothesisFails(Vec<usize>),

    #[error("malformed certificate node: {0}")]
    MalformedNode(String),

    #[error("certificate leaf has nonzero higher cohomology: {0}")]
    LeafNonzero(String),

    #[error("no maximal cone contains every ray outside the log set")]
    ChartConditionFails,

    #[error("degree must be at least 1, got {0}")]
    DomainError(i64),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Success.
pub const EXIT_OK: i32 = 0;
/// A check ran and failed: fan validation, a nonzero higher cohomology group
/// under a verified hypothesis, a rejected certificate, or an internal bug.
pub const EXIT_FAILED: i32 = 1;
/// Input could not be parsed or is outside the supported domain.
pub const EXIT_MALFORMED: i32 = 2;
/// The ampleness hypothesis has no witness; nothing was claimed.
pub const EXIT_INFEASIBLE: i32 = 3;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::HypothesisInfeasible | Error::HypothesisNotVerified => EXIT_INFEASIBLE,
            Error::MalformedInput(_)
            | Error::EmptyInput
            | Error::NotComplete(_)
            | Error::NotSmooth(_)
            | Error::NotACone(_)
            | Error::DegenerateSubdivision(_)
            | Error::UnknownFamily(_)
            | Error::ChartConditionFails
            | Error::DomainError(_)
            | Error::Io(_)
            | Error::Json(_) => EXIT_MALFORMED,
            Error::ComplexNotExactlyComposable { .. }
            | Error::UnboundedCohomologyChamber(_)
            | Error::StratumHypothesisFails(_)
            | Error::MalformedNode(_)
            | Error::LeafNonzero(_)
            | Error::Internal(_) => EXIT_FAILED,
        }
    }
}
