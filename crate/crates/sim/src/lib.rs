//! Parameter sweeps, tomography dumps and dressed-state tables on top of
//! `fle-core`.

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{Mode, RawConfig, SweepConfig};
pub use sweep::{evaluate_point, run_sweep, PointResult, SweepRecord};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] fle_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}
