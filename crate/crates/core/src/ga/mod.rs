//! Gaussian-approximation density evolution for min-sum type decoders with
//! erasures.
//!
//! Messages are assumed i.i.d. symmetric Gaussian (variance twice the mean)
//! and the all-zero codeword is sent. The state after iteration `l` is
//! `(P, E)`: the probabilities that a variable-to-check message is negative
//! and that it is erased (zero). One iteration goes through
//!
//! 1. `F' = 1 - ρ(1 - E)`, erased check messages;
//! 2. `R' = (ρ(1-E) - ρ(1-E-2P)) / 2`, negative check messages, and the
//!    check-message mean `m_β = 2 Q⁻¹(R')²`;
//! 3. `Q_i = Q(√((m_0 + ρ(1-E)(i-1) m_β) / 2))`, the probability that a fresh
//!    extrinsic at a degree-`i` variable is negative;
//! 4. `P' = (P + E) Σ λ_i Q_i`, `E' = P + (1 - E - 2P) Σ λ_i Q_i`.
//!
//! With erasures switched off this collapses to the scalar recurrence
//! `x' = Σ λ_i Q(√((m_0 + (i-1) m_β(x)) / 2))` ([`de_step_theorem1`]).

mod qfunc;
mod threshold;

pub use qfunc::{q, q_inv};
pub use threshold::{
    iterations_to_converge, threshold_search, trajectory, Recurrence, ThresholdOptions, TrajectoryPoint,
};

use thiserror::Error;

use crate::code::{CodeError, DegreeDistribution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("unsupported ensemble: {0}")]
    Unsupported(String),
    #[error("no threshold bracket in sigma range [{lo}, {hi}]: {reason}")]
    BracketNotFound { lo: f64, hi: f64, reason: String },
    #[error(transparent)]
    Code(#[from] CodeError),
}

const DOMAIN_SLACK: f64 = 1e-12;

/// Ensemble and channel: degree distribution, σ, and m_0 = 2/σ².
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleParams {
    dist: DegreeDistribution,
    sigma: f64,
    m0: f64,
}

impl EnsembleParams {
    pub fn new(dist: DegreeDistribution, sigma: f64) -> Result<Self, GaError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(GaError::Domain(format!("sigma must be positive, got {sigma}")));
        }
        dist.ensure_min_degree_two()
            .map_err(|e| GaError::Unsupported(e.to_string()))?;
        Ok(Self {
            dist,
            sigma,
            m0: 2.0 / (sigma * sigma),
        })
    }

    pub fn dist(&self) -> &DegreeDistribution {
        &self.dist
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self, GaError> {
        Self::new(self.dist.clone(), sigma)
    }
}

/// Variable-message state: `p = Pr(α < 0)`, `e = Pr(α = 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeState {
    pub p: f64,
    pub e: f64,
}

impl DeState {
    pub fn new(p: f64, e: f64) -> Result<Self, GaError> {
        let s = Self { p, e };
        s.validate()?;
        Ok(s)
    }

    /// Error probability `P + E`.
    pub fn pe(&self) -> f64 {
        self.p + self.e
    }

    fn validate(&self) -> Result<(), GaError> {
        if !(self.p >= 0.0 && self.e >= 0.0 && self.p + self.e <= 1.0 + DOMAIN_SLACK) {
            return Err(GaError::Domain(format!(
                "need P, E >= 0 and P + E <= 1, got P = {}, E = {}",
                self.p, self.e
            )));
        }
        Ok(())
    }
}

/// Check-message state: `r = Pr(β < 0)`, `f = Pr(β = 0)` and the mean of
/// the unerased symmetric Gaussian part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckState {
    pub r: f64,
    pub f: f64,
    pub m_beta: f64,
}

/// How the check-message mean is inferred from `R'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckErrorModel {
    /// `R' = Q(√(m_β/2))` with the unconditional `R'`.
    #[default]
    Unconditional,
    /// Uses `R' / (1 - F')`, the error probability among unerased messages.
    ConditionedOnUnerased,
}

/// Which form of the variable-side term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reading {
    /// `Q(√(m_0/2 + ρ(1-E)(i-1) Q⁻¹(R')²))`, consistent with `m_β = 2Q⁻¹(R')²`.
    #[default]
    Corrected,
    /// `Q(√(m_0/2 + ρ(1-E)(i-1) Q⁻¹(R')))`, kept for comparison only.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GaOptions {
    pub check_model: CheckErrorModel,
    pub reading: Reading,
}

fn check_unit(name: &str, x: f64) -> Result<(), GaError> {
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x) {
        return Err(GaError::Domain(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

/// `F' = 1 - ρ(1 - E)`.
pub fn erasure_step(e: f64, dist: &DegreeDistribution) -> Result<f64, GaError> {
    check_unit("E", e)?;
    Ok(1.0 - dist.eval_rho(1.0 - e))
}

/// `R' = (ρ(1-E) - ρ(1-E-2P)) / 2`.
pub fn negative_step(p: f64, e: f64, dist: &DegreeDistribution) -> Result<f64, GaError> {
    DeState::new(p, e)?;
    Ok(0.5 * (dist.eval_rho(1.0 - e) - dist.eval_rho(1.0 - e - 2.0 * p)))
}

/// `m_β = 2 Q⁻¹(R')²`; `+∞` when `R' = 0`.
pub fn mean_from_r(r: f64) -> Result<f64, GaError> {
    if !(0.0..=0.5).contains(&r) {
        return Err(GaError::Domain(format!("R = {r} outside [0, 1/2]")));
    }
    if r == 0.0 {
        return Ok(f64::INFINITY);
    }
    let s = q_inv(r);
    Ok(2.0 * s * s)
}

/// Check-node half of one iteration. `R'` above 1/2 (possible only when
/// `1 - E - 2P < 0`) is clamped to 1/2, i.e. uninformative check messages.
pub fn check_state(state: DeState, dist: &DegreeDistribution, model: CheckErrorModel) -> Result<CheckState, GaError> {
    let f = erasure_step(state.e, dist)?;
    let r = negative_step(state.p, state.e, dist)?;
    let r_eff = match model {
        CheckErrorModel::Unconditional => r,
        CheckErrorModel::ConditionedOnUnerased if f < 1.0 => r / (1.0 - f),
        CheckErrorModel::ConditionedOnUnerased => 0.5,
    };
    let m_beta = mean_from_r(r_eff.clamp(0.0, 0.5))?;
    Ok(CheckState { r, f, m_beta })
}

// Q_i given the check state and ρ(1-E)
fn variable_term(i: usize, rho_unerased: f64, check: &CheckState, params: &EnsembleParams, reading: Reading) -> f64 {
    let weight = rho_unerased * (i as f64 - 1.0);
    let half_m0 = 0.5 * params.m0;
    let extra = if weight == 0.0 {
        0.0
    } else {
        match reading {
            Reading::Corrected => weight * 0.5 * check.m_beta,
            // m_β/2 = Q⁻¹(R)², so Q⁻¹(R) = √(m_β/2)
            Reading::Literal => weight * (0.5 * check.m_beta).sqrt(),
        }
    };
    q((half_m0 + extra).sqrt())
}

/// `Q_i(P, E)` for a degree-`i` variable node.
pub fn q_i(p: f64, e: f64, i: usize, params: &EnsembleParams, opts: GaOptions) -> Result<f64, GaError> {
    if i < 2 {
        return Err(GaError::Domain(format!("variable degree {i} < 2")));
    }
    let state = DeState::new(p, e)?;
    let check = check_state(state, &params.dist, opts.check_model)?;
    Ok(variable_term(i, params.dist.eval_rho(1.0 - e), &check, params, opts.reading))
}

/// `Σ λ_i Q_i` together with the intermediate check state.
fn weighted_q(state: DeState, params: &EnsembleParams, opts: GaOptions) -> Result<(f64, CheckState), GaError> {
    let check = check_state(state, &params.dist, opts.check_model)?;
    let rho_unerased = params.dist.eval_rho(1.0 - state.e);
    let sum = params
        .dist
        .lambda_terms()
        .map(|(i, l)| l * variable_term(i, rho_unerased, &check, params, opts.reading))
        .sum();
    Ok((sum, check))
}

/// One joint iteration `(P, E) -> (φ1, φ2)` with
/// `φ1 = (P+E) ΣλQ` and `φ2 = P + (1-E-2P) ΣλQ`.
pub fn de_step(state: DeState, params: &EnsembleParams) -> Result<DeState, GaError> {
    de_step_with(state, params, GaOptions::default()).map(|(s, _)| s)
}

/// [`de_step`] with explicit options, also returning the check state used.
pub fn de_step_with(state: DeState, params: &EnsembleParams, opts: GaOptions) -> Result<(DeState, CheckState), GaError> {
    let (s, check) = weighted_q(state, params, opts)?;
    let (x, y) = (state.p, state.e);
    let next = DeState {
        p: (x + y) * s,
        e: x + (1.0 - y - 2.0 * x) * s,
    };
    Ok((next, check))
}

/// `Σ λ_i Q_i(P, E)`, exposed for checking identities between the displays.
pub fn weighted_error(state: DeState, params: &EnsembleParams, opts: GaOptions) -> Result<f64, GaError> {
    weighted_q(state, params, opts).map(|(s, _)| s)
}

/// Summand of [`de_step_theorem1`] for degree `i`, without the λ_i weight.
pub fn theorem1_term(x: f64, i: usize, params: &EnsembleParams, reading: Reading) -> Result<f64, GaError> {
    if !(0.0..=0.5).contains(&x) {
        return Err(GaError::Domain(format!("x = {x} outside [0, 1/2]")));
    }
    let r = 0.5 * (1.0 - params.dist.eval_rho(1.0 - 2.0 * x));
    let s = q_inv(r.clamp(0.0, 0.5));
    let k = i as f64 - 1.0;
    let arg = match reading {
        Reading::Corrected => (params.m0 + k * 2.0 * s * s) / 2.0,
        Reading::Literal => params.m0 / 2.0 + k * s,
    };
    Ok(q(arg.sqrt()))
}

/// Scalar recurrence on the error probability without erasures.
pub fn de_step_theorem1(x: f64, params: &EnsembleParams) -> Result<f64, GaError> {
    de_step_theorem1_with(x, params, Reading::Corrected)
}

pub fn de_step_theorem1_with(x: f64, params: &EnsembleParams, reading: Reading) -> Result<f64, GaError> {
    params
        .dist
        .lambda_terms()
        .map(|(i, l)| theorem1_term(x, i, params, reading).map(|t| l * t))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg36(sigma: f64) -> EnsembleParams {
        EnsembleParams::new(DegreeDistribution::regular(3, 6).unwrap(), sigma).unwrap()
    }

    #[test]
    fn erasure_step_examples() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        assert_eq!(erasure_step(0.0, &d).unwrap(), 0.0);
        assert_eq!(erasure_step(1.0, &d).unwrap(), 1.0);
        // 1 - 0.9^5 = 0.40951
        assert!((erasure_step(0.1, &d).unwrap() - 0.40951).abs() < 1e-15);
        assert!(erasure_step(1.5, &d).is_err());
    }

    #[test]
    fn negative_step_examples() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        assert_eq!(negative_step(0.0, 0.3, &d).unwrap(), 0.0);
        // (1 - 0.8^5) / 2 = 0.33616
        assert!((negative_step(0.1, 0.0, &d).unwrap() - 0.33616).abs() < 1e-15);
        for x in [0.01, 0.1, 0.3, 0.5] {
            let r = negative_step(x, 0.0, &d).unwrap();
            assert_eq!(r, 0.5 * (1.0 - d.eval_rho(1.0 - 2.0 * x)));
        }
        assert!(negative_step(0.7, 0.5, &d).is_err());
    }

    #[test]
    fn mean_from_r_examples() {
        assert_eq!(mean_from_r(0.5).unwrap(), 0.0);
        assert_eq!(mean_from_r(0.0).unwrap(), f64::INFINITY);
        // 2 * 1.28155156554460047^2
        assert!((mean_from_r(0.1).unwrap() - 3.284_748_830_299_633).abs() < 1e-12);
        assert!(mean_from_r(0.6).is_err());
        let mut m = 0.0;
        while m <= 100.0 {
            let r = q((m / 2.0f64).sqrt());
            assert!((mean_from_r(r).unwrap() - m).abs() < 1e-8, "m = {m}");
            m += 0.37;
        }
    }

    #[test]
    fn q_i_examples() {
        let params = reg36(1.0);
        let opts = GaOptions::default();
        assert_eq!(q_i(0.0, 0.0, 3, &params, opts).unwrap(), 0.0);
        // P = 1/2, E = 0 -> R' = 1/2, m_β = 0: Q(1/σ) for every degree
        for i in [2, 3, 7] {
            let v = q_i(0.5, 0.0, i, &params, opts).unwrap();
            assert!((v - q(1.0)).abs() < 1e-15);
        }
        assert!(q_i(0.1, 0.0, 1, &params, opts).is_err());
    }

    #[test]
    fn fixed_point_at_zero() {
        let params = reg36(0.9);
        let next = de_step(DeState::new(0.0, 0.0).unwrap(), &params).unwrap();
        assert_eq!(next, DeState { p: 0.0, e: 0.0 });
        assert_eq!(de_step_theorem1(0.0, &params).unwrap(), 0.0);
    }

    #[test]
    fn degree_one_unsupported() {
        let d = DegreeDistribution::new(&[(1, 1.0)], &[(6, 1.0)]).unwrap();
        assert!(matches!(EnsembleParams::new(d, 0.8), Err(GaError::Unsupported(_))));
    }

    #[test]
    fn literal_reading_differs() {
        let params = reg36(0.8);
        let corrected = de_step_theorem1_with(0.05, &params, Reading::Corrected).unwrap();
        let literal = de_step_theorem1_with(0.05, &params, Reading::Literal).unwrap();
        assert!(corrected != literal);
        let opts = GaOptions {
            reading: Reading::Literal,
            ..Default::default()
        };
        let t2 = q_i(0.05, 0.0, 3, &params, opts).unwrap();
        assert!((t2 - theorem1_term(0.05, 3, &params, Reading::Literal).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn conditioned_model_raises_error_estimate() {
        let params = reg36(0.8);
        let state = DeState::new(0.05, 0.1).unwrap();
        let base = check_state(state, params.dist(), CheckErrorModel::Unconditional).unwrap();
        let cond = check_state(state, params.dist(), CheckErrorModel::ConditionedOnUnerased).unwrap();
        assert!(cond.m_beta < base.m_beta);
        assert_eq!(cond.r, base.r);
    }
}
