//! Flooding-schedule message-passing decoders.
//!
//! One engine covers sum-product, min-sum, normalized and offset min-sum and
//! self-corrected min-sum (SCMS), in floating point or on a uniform
//! quantization grid. SCMS differs from min-sum only in the variable node:
//! a new extrinsic whose sign disagrees with the message sent on the same
//! edge in the previous iteration is replaced by an erasure (zero).

mod quant;
mod rules;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::code::TannerGraph;

pub use quant::{QuantRange, QuantSpec};
pub use rules::{apply_correction, check_update_ms, check_update_sp, scms_filter, variable_update};
pub(crate) use rules::{extrinsic_sum, signed_magnitude, sgn};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("expected {expected} channel LLRs, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid decoder configuration: {0}")]
    InvalidConfig(String),
    #[error("check node {0} has degree {1}; decoding needs degree >= 2")]
    LowDegreeCheck(usize, usize),
    #[error("check update needs at least one incoming message")]
    EmptyCheckInput,
    #[error("unknown decoder {0:?} (expected sp, ms, nms:<scale>, oms:<offset> or scms)")]
    UnknownVariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    SumProduct,
    MinSum,
    NormalizedMinSum(f64),
    OffsetMinSum(f64),
    SelfCorrected,
}

impl Variant {
    fn is_min_sum_family(&self) -> bool {
        !matches!(self, Variant::SumProduct)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::SumProduct => write!(f, "sp"),
            Variant::MinSum => write!(f, "ms"),
            Variant::NormalizedMinSum(s) => write!(f, "nms:{s}"),
            Variant::OffsetMinSum(o) => write!(f, "oms:{o}"),
            Variant::SelfCorrected => write!(f, "scms"),
        }
    }
}

impl FromStr for Variant {
    type Err = DecodeError;

    /// `name[:param]`, e.g. `scms`, `nms:0.8`, `oms:0.5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let (name, param) = match lower.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (lower.as_str(), None),
        };
        let param = |default: f64| -> Result<f64, DecodeError> {
            param.map_or(Ok(default), |p| {
                p.parse::<f64>().map_err(|_| DecodeError::UnknownVariant(s.to_string()))
            })
        };
        let v = match name {
            "sp" | "bp" | "sum-product" => Variant::SumProduct,
            "ms" | "min-sum" => Variant::MinSum,
            "nms" => Variant::NormalizedMinSum(param(0.8)?),
            "oms" => Variant::OffsetMinSum(param(0.5)?),
            "scms" => Variant::SelfCorrected,
            _ => return Err(DecodeError::UnknownVariant(s.to_string())),
        };
        if matches!(name, "sp" | "bp" | "sum-product" | "ms" | "min-sum" | "scms") && lower.contains(':') {
            return Err(DecodeError::UnknownVariant(s.to_string()));
        }
        Ok(v)
    }
}

/// How much per-iteration information [`decode`] records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceLevel {
    #[default]
    None,
    /// Sign-change and erasure fractions.
    Stats,
    /// Statistics plus every α, β and γ̃ value.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    pub variant: Variant,
    pub max_iter: usize,
    pub early_stop: bool,
    pub quant: Option<QuantSpec>,
    pub trace: TraceLevel,
    /// Magnitude ceiling for sum-product check messages.
    pub llr_cap: f64,
}

impl DecoderConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            max_iter: 200,
            early_stop: true,
            quant: None,
            trace: TraceLevel::None,
            llr_cap: 30.0,
        }
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn early_stop(mut self, early_stop: bool) -> Self {
        self.early_stop = early_stop;
        self
    }

    pub fn quant(mut self, quant: Option<QuantSpec>) -> Self {
        self.quant = quant;
        self
    }

    pub fn trace(mut self, trace: TraceLevel) -> Self {
        self.trace = trace;
        self
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        let bad = |msg: String| Err(DecodeError::InvalidConfig(msg));
        match self.variant {
            Variant::NormalizedMinSum(s) if !(s > 0.0 && s <= 1.0) => {
                return bad(format!("normalization factor {s} outside (0, 1]"));
            }
            Variant::OffsetMinSum(o) if !(o >= 0.0 && o.is_finite()) => {
                return bad(format!("offset {o} must be non-negative"));
            }
            _ => {}
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.llr_cap > 0.0) {
            return bad(format!("llr cap {} must be positive", self.llr_cap));
        }
        if let Some(q) = &self.quant {
            q.validate()?;
        }
        Ok(())
    }
}

/// Per-iteration statistics over the variable-to-check messages.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IterationStats {
    /// Fraction of edges whose α changed sign relative to the previous
    /// iteration (see [`sign_changed`]).
    pub sign_change_fraction: f64,
    /// Fraction of edges with α = 0.
    pub erasure_fraction: f64,
    /// Number of variables with γ̃ = 0 exactly (decided as bit 0).
    pub app_ties: usize,
}

/// All messages at the end of one iteration. `alpha` and `beta` are indexed
/// by edge id (see [`TannerGraph::chk_edges`]).
#[derive(Debug, Clone, PartialEq)]
pub struct IterationMessages {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub app: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub stats: Vec<IterationStats>,
    /// Filled only at [`TraceLevel::Full`].
    pub messages: Vec<IterationMessages>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    pub app: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Option<Trace>,
}

/// Sign-change rule for the statistics: nonzero→opposite sign and
/// nonzero→0 count; 0→nonzero counts when the new sign opposes the last
/// nonzero sign seen on the edge.
#[inline]
pub fn sign_changed(prev: f64, new: f64, last_nonzero_negative: Option<bool>) -> bool {
    match (prev != 0.0, new != 0.0) {
        (true, true) => (prev < 0.0) != (new < 0.0),
        (true, false) => true,
        (false, true) => last_nonzero_negative.is_some_and(|neg| neg != (new < 0.0)),
        (false, false) => false,
    }
}

/// Decodes one frame of channel LLRs `gamma`.
pub fn decode(graph: &TannerGraph, gamma: &[f64], config: &DecoderConfig) -> Result<DecodeResult, DecodeError> {
    config.validate()?;
    if gamma.len() != graph.n() {
        return Err(DecodeError::DimensionMismatch {
            expected: graph.n(),
            got: gamma.len(),
        });
    }
    if let Some(c) = (0..graph.m()).find(|&c| graph.chk_degree(c) < 2) {
        return Err(DecodeError::LowDegreeCheck(c, graph.chk_degree(c)));
    }
    Ok(FloodingDecoder::new(graph, gamma, config).run())
}

struct FloodingDecoder<'a> {
    graph: &'a TannerGraph,
    config: &'a DecoderConfig,
    gamma: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    app: Vec<f64>,
    bits: Vec<u8>,
    // last nonzero sign per edge, for sign-change statistics
    last_sign: Vec<Option<bool>>,
    scratch: Vec<f64>,
}

impl<'a> FloodingDecoder<'a> {
    fn new(graph: &'a TannerGraph, gamma: &[f64], config: &'a DecoderConfig) -> Self {
        let gamma: Vec<f64> = match &config.quant {
            Some(q) => gamma.iter().map(|&g| q.quantize(g, QuantRange::Message)).collect(),
            None => gamma.to_vec(),
        };
        let alpha: Vec<f64> = (0..graph.edge_count()).map(|e| gamma[graph.edge_var(e)]).collect();
        let last_sign = alpha.iter().map(|&a| (a != 0.0).then_some(a < 0.0)).collect();
        Self {
            graph,
            config,
            beta: vec![0.0; alpha.len()],
            app: gamma.clone(),
            bits: gamma.iter().map(|&g| u8::from(g < 0.0)).collect(),
            gamma,
            alpha,
            last_sign,
            scratch: Vec::new(),
        }
    }

    fn run(mut self) -> DecodeResult {
        let mut trace = (self.config.trace != TraceLevel::None).then(Trace::default);
        let mut iterations = 0;
        let mut converged = false;
        for _ in 0..self.config.max_iter {
            iterations += 1;
            self.check_pass();
            let stats = self.variable_pass(trace.is_some());
            if let Some(t) = trace.as_mut() {
                t.stats.push(stats);
                if self.config.trace == TraceLevel::Full {
                    t.messages.push(IterationMessages {
                        alpha: self.alpha.clone(),
                        beta: self.beta.clone(),
                        app: self.app.clone(),
                    });
                }
            }
            if self.config.early_stop && self.graph.syndrome_ok_unchecked(&self.bits) {
                converged = true;
                break;
            }
        }
        if !converged {
            converged = self.graph.syndrome_ok_unchecked(&self.bits);
        }
        DecodeResult {
            bits: self.bits,
            app: self.app,
            iterations,
            converged,
            trace,
        }
    }

    fn check_pass(&mut self) {
        let variant = self.config.variant;
        let quant = self.config.quant;
        for c in 0..self.graph.m() {
            let edges = self.graph.chk_edges(c);
            let alphas = &self.alpha[edges.clone()];
            let betas = &mut self.beta[edges];
            if variant.is_min_sum_family() {
                // two smallest magnitudes and the overall sign
                let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, 0);
                let mut sign = 1.0;
                for (k, &a) in alphas.iter().enumerate() {
                    let mag = a.abs();
                    if mag < min1 {
                        min2 = min1;
                        min1 = mag;
                        arg = k;
                    } else if mag < min2 {
                        min2 = mag;
                    }
                    sign *= sgn(a);
                }
                for (k, b) in betas.iter_mut().enumerate() {
                    let mag = if k == arg { min2 } else { min1 };
                    let raw = signed_magnitude(sign * sgn(alphas[k]), mag);
                    *b = apply_correction(raw, &variant);
                }
            } else {
                // prefix/suffix products of tanh(α/2) exclude the target edge
                let t = &mut self.scratch;
                t.clear();
                t.extend(alphas.iter().map(|&a| (0.5 * a).tanh()));
                let mut prefix = 1.0;
                for (k, b) in betas.iter_mut().enumerate() {
                    *b = prefix;
                    prefix *= t[k];
                }
                let mut suffix = 1.0;
                for k in (0..betas.len()).rev() {
                    betas[k] = rules::sp_from_product(betas[k] * suffix, self.config.llr_cap);
                    suffix *= t[k];
                }
            }
            if let Some(q) = &quant {
                for b in betas.iter_mut() {
                    *b = q.quantize(*b, QuantRange::Message);
                }
            }
        }
    }

    fn variable_pass(&mut self, collect: bool) -> IterationStats {
        let scms = self.config.variant == Variant::SelfCorrected;
        let quant = self.config.quant;
        let mut changes = 0usize;
        let mut erasures = 0usize;
        let mut ties = 0usize;
        let mut betas = std::mem::take(&mut self.scratch);
        for v in 0..self.graph.n() {
            let edges = self.graph.var_edges(v);
            let gamma = self.gamma[v];
            betas.clear();
            betas.extend(edges.iter().map(|&e| self.beta[e]));

            let mut app = betas.iter().fold(gamma, |acc, &b| acc + b);
            if let Some(q) = &quant {
                app = q.quantize(app, QuantRange::App);
            }
            self.app[v] = app;
            self.bits[v] = u8::from(app < 0.0);
            if app == 0.0 {
                ties += 1;
            }

            for (k, &e) in edges.iter().enumerate() {
                let mut tmp = extrinsic_sum(gamma, &betas, k);
                if let Some(q) = &quant {
                    tmp = q.quantize(tmp, QuantRange::Message);
                }
                let prev = self.alpha[e];
                let new = if scms { scms_filter(tmp, prev) } else { tmp };
                if collect {
                    if sign_changed(prev, new, self.last_sign[e]) {
                        changes += 1;
                    }
                    if new == 0.0 {
                        erasures += 1;
                    } else {
                        self.last_sign[e] = Some(new < 0.0);
                    }
                }
                self.alpha[e] = new;
            }
        }
        self.scratch = betas;
        let edges = self.graph.edge_count().max(1) as f64;
        IterationStats {
            sign_change_fraction: changes as f64 / edges,
            erasure_fraction: erasures as f64 / edges,
            app_ties: ties,
        }
    }
}
