use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{with_pool, HarnessError};
use crate::channel::{all_zero_frame_llr, ebno_to_sigma, ChannelSpec};
use crate::code::TannerGraph;
use crate::decoder::{decode, DecoderConfig, TraceLevel};

/// Which frames enter the averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameSelector {
    All,
    /// Frames whose final hard decision is not a codeword.
    Failed,
    Successful,
}

impl fmt::Display for FrameSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameSelector::All => "all",
            FrameSelector::Failed => "failed",
            FrameSelector::Successful => "successful",
        })
    }
}

impl FromStr for FrameSelector {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(FrameSelector::All),
            "failed" => Ok(FrameSelector::Failed),
            "successful" => Ok(FrameSelector::Successful),
            _ => Err(HarnessError::InvalidRequest(format!("unknown frame selector '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterStatsRow {
    pub iteration: usize,
    pub sign_change_fraction: f64,
    pub erasure_fraction: f64,
}

/// Per-iteration averages over the selected frames.
#[derive(Debug, Clone, PartialEq)]
pub struct IterStats {
    pub rows: Vec<IterStatsRow>,
    pub frames_simulated: u64,
    pub frames_selected: u64,
}

/// Simulates `frames` frames with early stopping disabled and averages the
/// per-iteration sign-change and erasure fractions over the frames picked by
/// `selector`. All frames run the same number of iterations over the same
/// edge set, so averaging per frame and pooling counts give the same result.
pub fn sign_change_stats(
    graph: &TannerGraph,
    config: &DecoderConfig,
    ebno_db: f64,
    frames: u64,
    selector: FrameSelector,
    seed: u64,
    workers: usize,
) -> Result<IterStats, HarnessError> {
    if frames == 0 {
        return Err(HarnessError::InvalidRequest("frames must be positive".into()));
    }
    let config = config.clone().early_stop(false).trace(TraceLevel::Stats);
    config.validate()?;
    let spec = ChannelSpec::bpsk(ebno_to_sigma(ebno_db, graph.design_rate())?)?;
    let n = graph.n();
    let max_iter = config.max_iter;
    let per_frame = with_pool(workers, || {
        (0..frames)
            .into_par_iter()
            .map(|frame| {
                let gamma = all_zero_frame_llr(n, &spec, seed, frame);
                decode(graph, &gamma, &config).map(|r| {
                    let stats = r.trace.expect("stats requested").stats;
                    (r.converged, stats)
                })
            })
            .collect::<Result<Vec<_>, _>>()
    })??;

    let mut sums = vec![(0.0, 0.0); max_iter];
    let mut selected = 0u64;
    for (converged, stats) in &per_frame {
        let keep = match selector {
            FrameSelector::All => true,
            FrameSelector::Failed => !converged,
            FrameSelector::Successful => *converged,
        };
        if !keep {
            continue;
        }
        selected += 1;
        for (acc, s) in sums.iter_mut().zip(stats) {
            acc.0 += s.sign_change_fraction;
            acc.1 += s.erasure_fraction;
        }
    }
    if selected == 0 {
        return Err(HarnessError::NoFramesSelected(selector.to_string()));
    }
    let k = selected as f64;
    let rows = sums
        .into_iter()
        .enumerate()
        .map(|(i, (sc, er))| IterStatsRow {
            iteration: i + 1,
            sign_change_fraction: sc / k,
            erasure_fraction: er / k,
        })
        .collect();
    Ok(IterStats {
        rows,
        frames_simulated: frames,
        frames_selected: selected,
    })
}
