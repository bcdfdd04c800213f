use rand::Rng;
use rayon::prelude::*;

use super::{with_pool, HarnessError};
use crate::channel::{all_zero_frame_llr, ebno_to_sigma, frame_rng, ChannelSpec};
use crate::code::TannerGraph;
use crate::decoder::{decode, DecoderConfig};

/// Stop after `min_frame_errors` frame errors or `max_frames` frames,
/// whichever comes first. Frames are simulated in blocks of `block` and the
/// rule is only checked between blocks, so the frame count never depends on
/// scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub block: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_frame_errors: 100,
            max_frames: 1_000_000,
            block: 64,
        }
    }
}

impl StopRule {
    pub fn new(min_frame_errors: u64, max_frames: u64) -> Self {
        Self {
            min_frame_errors,
            max_frames,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.max_frames == 0 {
            return Err(HarnessError::InvalidStopRule("max_frames must be positive".into()));
        }
        if self.block == 0 {
            return Err(HarnessError::InvalidStopRule("block must be positive".into()));
        }
        if self.min_frame_errors == 0 {
            return Err(HarnessError::InvalidStopRule("min_frame_errors must be positive".into()));
        }
        Ok(())
    }
}

/// One Eb/N0 point of a BER/FER curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub ebno_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    /// Bits counted per frame.
    pub bits_per_frame: u64,
    pub total_iterations: u64,
    pub decoder: String,
    pub code: String,
    pub seed: u64,
}

impl SimRecord {
    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / (self.frames * self.bits_per_frame) as f64
    }

    pub fn fer(&self) -> f64 {
        self.frame_errors as f64 / self.frames as f64
    }

    pub fn avg_iterations(&self) -> f64 {
        self.total_iterations as f64 / self.frames as f64
    }
}

/// Code and decoder under test.
#[derive(Debug, Clone)]
pub struct SimSetup<'a> {
    pub graph: &'a TannerGraph,
    pub code_id: String,
    pub config: DecoderConfig,
    /// Rate used to convert Eb/N0 to σ; defaults to the design rate.
    pub rate: f64,
}

impl<'a> SimSetup<'a> {
    pub fn new(graph: &'a TannerGraph, code_id: impl Into<String>, config: DecoderConfig) -> Self {
        Self {
            graph,
            code_id: code_id.into(),
            config,
            rate: graph.design_rate(),
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
    iterations: u64,
}

impl Tally {
    fn add(mut self, o: Tally) -> Tally {
        self.frames += o.frames;
        self.bit_errors += o.bit_errors;
        self.frame_errors += o.frame_errors;
        self.iterations += o.iterations;
        self
    }
}

/// BER/FER over an Eb/N0 grid with the all-zero codeword. Bit errors are
/// counted on all N hard decisions; a frame is in error when any bit is.
pub fn run_monte_carlo(
    setup: &SimSetup<'_>,
    ebno_db: &[f64],
    stop: StopRule,
    seed: u64,
    workers: usize,
) -> Result<Vec<SimRecord>, HarnessError> {
    stop.validate()?;
    setup.config.validate()?;
    // surface structural errors once instead of per frame
    decode(setup.graph, &vec![1.0; setup.graph.n()], &setup.config.clone().max_iter(1))?;
    with_pool(workers, || {
        ebno_db
            .iter()
            .map(|&eb| simulate_point(setup, eb, stop, seed))
            .collect::<Result<Vec<_>, _>>()
    })?
}

fn simulate_point(setup: &SimSetup<'_>, eb: f64, stop: StopRule, seed: u64) -> Result<SimRecord, HarnessError> {
    let n = setup.graph.n();
    let spec = ChannelSpec::bpsk(ebno_to_sigma(eb, setup.rate)?)?;
    let mut total = Tally::default();
    while total.frames < stop.max_frames && total.frame_errors < stop.min_frame_errors {
        let start = total.frames;
        let end = (start + stop.block).min(stop.max_frames);
        let block = (start..end)
            .into_par_iter()
            .map(|frame| {
                let gamma = all_zero_frame_llr(n, &spec, seed, frame);
                let res = decode(setup.graph, &gamma, &setup.config).expect("validated before the run");
                let errs = res.bits.iter().filter(|&&b| b != 0).count() as u64;
                Tally {
                    frames: 1,
                    bit_errors: errs,
                    frame_errors: u64::from(errs > 0),
                    iterations: res.iterations as u64,
                }
            })
            .reduce(Tally::default, Tally::add);
        total = total.add(block);
    }
    log::info!(
        "{} dB: {} frames, {} frame errors, {} bit errors",
        eb,
        total.frames,
        total.frame_errors,
        total.bit_errors
    );
    Ok(SimRecord {
        ebno_db: eb,
        frames: total.frames,
        bit_errors: total.bit_errors,
        frame_errors: total.frame_errors,
        bits_per_frame: n as u64,
        total_iterations: total.iterations,
        decoder: setup.config.variant.to_string(),
        code: setup.code_id.clone(),
        seed,
    })
}

/// Uncoded BPSK hard-decision reference: `(bit_errors, bits)` over `frames`
/// frames of `frame_len` bits at rate 1.
pub fn uncoded_bpsk(
    ebno_db: f64,
    frame_len: usize,
    frames: u64,
    seed: u64,
    workers: usize,
) -> Result<(u64, u64), HarnessError> {
    let sigma = ebno_to_sigma(ebno_db, 1.0)?;
    let errors = with_pool(workers, || {
        (0..frames)
            .into_par_iter()
            .map(|frame| {
                let mut rng = frame_rng(seed, frame);
                (0..frame_len)
                    .filter(|_| {
                        let z: f64 = rng.sample(rand_distr::StandardNormal);
                        1.0 + sigma * z < 0.0
                    })
                    .count() as u64
            })
            .sum::<u64>()
    })?;
    Ok((errors, frames * frame_len as u64))
}
