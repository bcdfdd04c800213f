//! Monte-Carlo experiments, message statistics and the computation-tree
//! oracle.

mod histogram;
mod monte_carlo;
pub mod report;
mod signstats;
pub mod tree;

pub use histogram::{message_histogram, HistogramRequest, MessageHistogram, MessageKind, Population};
pub use monte_carlo::{run_monte_carlo, uncoded_bpsk, SimRecord, SimSetup, StopRule};
pub use signstats::{sign_change_stats, FrameSelector, IterStats, IterStatsRow};

use thiserror::Error;

use crate::channel::ChannelError;
use crate::code::CodeError;
use crate::decoder::DecodeError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid stop rule: {0}")]
    InvalidStopRule(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("no frames matched the selector {0}")]
    NoFramesSelected(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Runs `f` on a pool of `workers` threads (0 picks the rayon default).
pub(crate) fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}
