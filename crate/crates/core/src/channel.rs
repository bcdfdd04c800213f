//! AWGN channel with BPSK or Gray-mapped QPSK.
//!
//! QPSK-Gray carries two bits per symbol, one on each real dimension, so it
//! is represented here as interleaved I/Q components of amplitude ±1. Noise
//! of variance σ² is added per real dimension, which makes its per-bit
//! statistics identical to BPSK at the same Eb/N0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("code rate must lie in (0, 1], got {0}")]
    InvalidRate(f64),
    #[error("noise standard deviation must be positive, got {0}")]
    InvalidSigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Modulation {
    #[default]
    Bpsk,
    QpskGray,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    sigma: f64,
    modulation: Modulation,
}

impl ChannelSpec {
    pub fn new(sigma: f64, modulation: Modulation) -> Result<Self, ChannelError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ChannelError::InvalidSigma(sigma));
        }
        Ok(Self { sigma, modulation })
    }

    pub fn bpsk(sigma: f64) -> Result<Self, ChannelError> {
        Self::new(sigma, Modulation::Bpsk)
    }

    /// Channel for a given Eb/N0 (dB) and code rate.
    pub fn from_ebno(ebno_db: f64, rate: f64, modulation: Modulation) -> Result<Self, ChannelError> {
        Self::new(ebno_to_sigma(ebno_db, rate)?, modulation)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    /// Mean of the a-priori LLR under the all-zero codeword, 2/σ².
    pub fn llr_mean(&self) -> f64 {
        2.0 / (self.sigma * self.sigma)
    }
}

/// σ = (2 · rate · 10^(Eb/N0 / 10))^(-1/2), per real dimension.
pub fn ebno_to_sigma(ebno_db: f64, rate: f64) -> Result<f64, ChannelError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(ChannelError::InvalidRate(rate));
    }
    Ok((2.0 * rate * 10f64.powf(ebno_db / 10.0)).sqrt().recip())
}

/// Bit 0 maps to +1, bit 1 to -1, on every real dimension.
pub fn modulate(bits: &[u8], _modulation: Modulation) -> Vec<f64> {
    bits.iter().map(|&b| if b & 1 == 0 { 1.0 } else { -1.0 }).collect()
}

/// Independent RNG stream for one frame; frames never share random draws.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// Adds zero-mean Gaussian noise of variance σ² to every component.
pub fn transmit_awgn<R: Rng + ?Sized>(symbols: &[f64], spec: &ChannelSpec, rng: &mut R) -> Vec<f64> {
    symbols
        .iter()
        .map(|&s| {
            let z: f64 = rng.sample(StandardNormal);
            s + spec.sigma * z
        })
        .collect()
}

/// A-priori LLRs γ = 2y/σ².
pub fn llr(received: &[f64], spec: &ChannelSpec) -> Vec<f64> {
    let scale = 2.0 / (spec.sigma * spec.sigma);
    received.iter().map(|&y| scale * y).collect()
}

/// Channel LLRs of one all-zero codeword frame of length `n`.
pub fn all_zero_frame_llr(n: usize, spec: &ChannelSpec, seed: u64, frame: u64) -> Vec<f64> {
    let symbols = vec![1.0; n];
    let mut rng = frame_rng(seed, frame);
    llr(&transmit_awgn(&symbols, spec, &mut rng), spec)
}
