use thiserror::Error;

/// Errors raised anywhere in the lab.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("stencil unavailable at node {node}: {reason}")]
    Stencil { node: usize, reason: String },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("positivity violated at node {node} (slice {slice}): u = {value}")]
    Positivity {
        node: usize,
        slice: usize,
        value: f64,
    },

    #[error("solution leaves (0, M] at node {node}, t = {time}: u = {value}, M = {bound}")]
    Range {
        node: usize,
        time: f64,
        value: f64,
        bound: f64,
    },

    #[error("blow-up at step {step}: {reason}")]
    BlowUp { step: usize, reason: String },

    #[error("degenerate diffusion: {0}")]
    DegenerateDiffusion(String),

    #[error("source term not differentiable: {0}")]
    NonDifferentiable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
