use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice {rows}x{cols}: both dimensions must be at least 2")]
    InvalidLattice { rows: usize, cols: usize },

    #[error("probability `{name}` = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("network has already been rewired (p_r = {0})")]
    AlreadyRewired(f64),

    #[error("cannot place {count} innovators on {nodes} nodes")]
    TooManyInnovators { count: usize, nodes: usize },

    #[error("intermediate clusters overlap on a {rows}x{cols} lattice with {count} innovators")]
    OverlappingClusters { rows: usize, cols: usize, count: usize },

    #[error("node index {node} is out of range for {nodes} nodes")]
    NodeOutOfRange { node: usize, nodes: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("trajectory has no variance to fit (all proportions equal)")]
    DegenerateTrajectory,

    #[error("trajectory too short: need at least {needed} ticks, got {got}")]
    TrajectoryTooShort { needed: usize, got: usize },

    #[error("need at least 3 non-collinear points for an envelope, got {0} usable")]
    TooFewPoints(usize),

    #[error("t* = {t_star} must exceed both takeoff times ({base}, {boosted})")]
    TStarBeforeTakeoff { t_star: f64, base: f64, boosted: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
