use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("channel towards node {node} has no nonzero singular value")]
    RankZero { node: u8 },

    #[error("covariance is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NonPsd { min_eigenvalue: f64 },

    #[error("iterative water-filling did not converge within {sweeps} sweeps (last gain {last_gain:e} nats)")]
    NoConvergence { sweeps: usize, last_gain: f64 },

    #[error(
        "source strategy violates MA subadditivity: r_ma = {r_ma} > r_bar_1r + r_bar_2r = {bound}"
    )]
    InvalidStrategy { r_ma: f64, bound: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
