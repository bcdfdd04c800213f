use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{with_pool, HarnessError};
use crate::channel::{all_zero_frame_llr, ebno_to_sigma, ChannelSpec};
use crate::code::TannerGraph;
use crate::decoder::{decode, DecoderConfig, TraceLevel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    /// β, check to variable.
    Check,
    /// α, variable to check.
    Variable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Population {
    All,
    /// Nonzero messages only.
    Unerased,
}

impl FromStr for MessageKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "check" => Ok(MessageKind::Check),
            "variable" => Ok(MessageKind::Variable),
            _ => Err(HarnessError::InvalidRequest(format!("unknown message kind '{s}'"))),
        }
    }
}

impl FromStr for Population {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Population::All),
            "unerased" => Ok(Population::Unerased),
            _ => Err(HarnessError::InvalidRequest(format!("unknown population '{s}'"))),
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MessageKind::Check => "check",
            MessageKind::Variable => "variable",
        })
    }
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Population::All => "all",
            Population::Unerased => "unerased",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRequest {
    pub ebno_db: f64,
    /// 0 gives the channel messages before the first iteration.
    pub iteration: usize,
    pub kind: MessageKind,
    pub population: Population,
    pub frames: u64,
    pub bins: usize,
    pub seed: u64,
}

/// Histogram over uniform bins spanning the sample range. An empty
/// population yields no bins and no moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub samples: u64,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub population: Population,
}

impl MessageHistogram {
    pub fn is_empty(&self) -> bool {
        self.samples == 0
    }

    /// `variance / (2 mean)`, 1 for a symmetric Gaussian.
    pub fn symmetry_ratio(&self) -> Option<f64> {
        Some(self.variance? / (2.0 * self.mean?))
    }

    fn from_samples(xs: &[f64], bins: usize, population: Population) -> Self {
        if xs.is_empty() {
            return Self {
                bin_edges: Vec::new(),
                counts: Vec::new(),
                samples: 0,
                mean: None,
                variance: None,
                population,
            };
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let variance = if xs.len() > 1 {
            Some(xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0))
        } else {
            None
        };
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            hi = lo + 1.0;
        }
        let width = (hi - lo) / bins as f64;
        let bin_edges = (0..=bins).map(|k| lo + width * k as f64).collect();
        let mut counts = vec![0u64; bins];
        for &x in xs {
            let k = (((x - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Self {
            bin_edges,
            counts,
            samples: xs.len() as u64,
            mean: Some(mean),
            variance,
            population,
        }
    }
}

/// Collects every edge message of the requested kind at `iteration` over
/// `frames` frames, with early stopping disabled.
pub fn message_histogram(
    graph: &TannerGraph,
    config: &DecoderConfig,
    req: &HistogramRequest,
    workers: usize,
) -> Result<MessageHistogram, HarnessError> {
    if req.bins == 0 || req.frames == 0 {
        return Err(HarnessError::InvalidRequest("bins and frames must be positive".into()));
    }
    if req.iteration > config.max_iter {
        return Err(HarnessError::InvalidRequest(format!(
            "iteration {} beyond max_iter {}",
            req.iteration, config.max_iter
        )));
    }
    let spec = ChannelSpec::bpsk(ebno_to_sigma(req.ebno_db, graph.design_rate())?)?;
    let n = graph.n();
    let run_cfg = config.clone().early_stop(false).max_iter(req.iteration).trace(TraceLevel::Full);
    let per_frame = with_pool(workers, || {
        (0..req.frames)
            .into_par_iter()
            .map(|frame| -> Result<Vec<f64>, HarnessError> {
                let gamma = all_zero_frame_llr(n, &spec, req.seed, frame);
                if req.iteration == 0 {
                    return Ok(match req.kind {
                        MessageKind::Variable => (0..graph.edge_count())
                            .map(|e| {
                                let g = gamma[graph.edge_var(e)];
                                match &config.quant {
                                    Some(q) => q.quantize(g, crate::decoder::QuantRange::Message),
                                    None => g,
                                }
                            })
                            .collect(),
                        MessageKind::Check => vec![0.0; graph.edge_count()],
                    });
                }
                let res = decode(graph, &gamma, &run_cfg)?;
                let mut msgs = res.trace.expect("full trace requested").messages;
                let last = msgs.pop().expect("at least one iteration");
                Ok(match req.kind {
                    MessageKind::Check => last.beta,
                    MessageKind::Variable => last.alpha,
                })
            })
            .collect::<Result<Vec<_>, _>>()
    })??;
    let samples: Vec<f64> = per_frame
        .into_iter()
        .flatten()
        .filter(|&x| req.population == Population::All || x != 0.0)
        .collect();
    Ok(MessageHistogram::from_samples(&samples, req.bins, req.population))
}
