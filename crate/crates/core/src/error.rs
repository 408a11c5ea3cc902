use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate Möbius coefficients (ad - bc = 0)")]
    Degenerate,
    #[error("evaluation hit the pole of the map")]
    PoleHit,
    #[error("map is not an isometry of the disk or half-plane: {0}")]
    NotAnIsometry(String),
    #[error("invalid circle: {0}")]
    InvalidCircle(String),
    #[error("ping-pong separation violated: {0}")]
    SeparationViolated(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("depth {0} outside 1..=30")]
    DepthOutOfRange(usize),
    #[error("word is not admissible: {0}")]
    InadmissibleWord(String),
    #[error("branch {letter} has its pole inside base set {set}")]
    PoleInDomain { letter: usize, set: usize },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("system is not contracting: {0}")]
    NotContracting(String),
    #[error("tail sum diverges at sigma = {sigma} (theta = {theta})")]
    TailDiverges { sigma: f64, theta: f64 },
    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("system is not regular")]
    NotRegular,
    #[error("pressure never changes sign on ({lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("family invalid at t = {t}: {reason}")]
    ValidityViolated { t: f64, reason: String },
    #[error("parameter {t} outside [{lo}, {hi}]")]
    ParameterOutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("solver error floor {0:e} exceeds 1e-8")]
    ErrorFloorTooHigh(f64),
    #[error("at t = {t}: {source}")]
    AtParameter { t: f64, source: Box<Error> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
