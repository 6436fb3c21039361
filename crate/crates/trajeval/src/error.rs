//! Crate-wide error type.

/// Errors produced by parsing, association, alignment, and optimization.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input text; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A trajectory must contain at least one pose.
    #[error("empty trajectory")]
    EmptyTrajectory,

    /// Timestamp association produced zero pairs (wrong offset or disjoint
    /// recordings).
    #[error("no overlap between trajectories (zero associated pairs)")]
    NoOverlap,

    /// Too few points/observations for a unique solution.
    #[error("underdetermined: need at least {needed}, got {got}")]
    Underdetermined { needed: usize, got: usize },

    /// Source point pattern has (near-)zero variance.
    #[error("degenerate source pattern (variance {variance:e})")]
    DegenerateSource { variance: f64 },

    /// The estimated similarity scale came out non-positive.
    #[error("non-positive scale {scale}")]
    NonPositiveScale { scale: f64 },

    /// The scalar objective returned NaN or infinity.
    #[error("non-finite objective at x = {x}")]
    NonFiniteObjective { x: f64 },

    /// Point has non-positive depth in the camera frame.
    #[error("behind camera (z = {z})")]
    BehindCamera { z: f64 },

    /// Stereo projection requested on a camera with zero baseline.
    #[error("not a stereo camera (baseline = 0)")]
    NotStereo,

    /// Every observation is behind the camera at the initial pose.
    #[error("bad initialization: all points behind camera at initial pose")]
    BadInitialization,

    /// Logarithm requested for a rotation of angle pi (outside the
    /// principal branch).
    #[error("non-principal rotation (angle = pi)")]
    NonPrincipalRotation,

    /// A report was saved without its error series.
    #[error("series not stored in report")]
    SeriesNotStored,

    /// Report schema version does not match this tool.
    #[error("report schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },

    /// Invalid argument or configuration value.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
