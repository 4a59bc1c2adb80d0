use crate::solver::{Deployment, GreedyTrace};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Partial result carried by an infeasibility error.
#[derive(Debug, Clone)]
pub struct Infeasible {
    pub target: f64,
    pub achieved: f64,
    pub deployment: Deployment,
    pub trace: Option<GreedyTrace>,
    pub reason: String,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid venue: {0}")]
    InvalidVenue(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown venue kind `{0}` (expected hall, airport, stadium or toy)")]
    UnknownVenueKind(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("deployment failed validation: {}", .0.join("; "))]
    InvalidDeployment(Vec<String>),

    #[error(
        "coverage target {:.4} unreachable ({}); best achieved {:.4} with {} APs",
        .0.target, .0.reason, .0.achieved, .0.deployment.selected.len()
    )]
    Infeasible(Box<Infeasible>),

    #[error(
        "exact solver refused: instance has L={l}, M={m} but limits are max_L={max_l}, max_M={max_m}"
    )]
    LimitExceeded {
        l: usize,
        m: usize,
        max_l: usize,
        max_m: usize,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
