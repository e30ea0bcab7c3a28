use thiserror::Error;

/// Errors raised by space construction, boundary metrics, cover analytics and
/// the building retraction machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid space spec: {0}")]
    InvalidSpec(String),

    #[error("point does not belong to this space ({0})")]
    PointMismatch(&'static str),

    #[error("parameter {t} exceeds the evaluation horizon {horizon}")]
    HorizonExceeded { t: f64, horizon: f64 },

    #[error("displacement stays below A = {scale} up to the horizon {horizon}; cannot bracket the crossing time")]
    HorizonUndecidable { scale: f64, horizon: f64 },

    #[error("operation requires a Gromov hyperbolic space, {0} has no hyperbolicity constant")]
    NotHyperbolic(&'static str),

    #[error("invalid metric parameters: {0}")]
    InvalidParams(String),

    #[error("boundary point {0} is not in the net")]
    NotInNet(String),

    #[error("resolution {requested} exceeds what the space supports ({limit})")]
    ResolutionExceedsTruncation { requested: u32, limit: u32 },

    #[error("argument {value} outside the domain of the comparison function: {reason}")]
    Domain { value: f64, reason: String },

    #[error("cover has no elements")]
    EmptyCover,

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("greedy cover needs more than {colors} colors: net point {point} conflicts with every family")]
    InsufficientColors { colors: usize, point: usize },

    #[error("scale {scale} is below the net resolution {spacing}")]
    ScaleBelowResolution { scale: f64, spacing: f64 },

    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
