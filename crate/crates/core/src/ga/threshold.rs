//! Threshold search by bisection on σ.

use std::fmt;
use std::str::FromStr;

use super::{de_step_with, mean_from_r, q, DeState, EnsembleParams, GaError, GaOptions, Reading};
use crate::code::DegreeDistribution;

/// Which recurrence is iterated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recurrence {
    /// Scalar error probability, no erasures.
    Theorem1,
    /// Joint `(P, E)` recurrence with erasures.
    Theorem2,
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Recurrence::Theorem1 => "theorem1",
            Recurrence::Theorem2 => "theorem2",
        })
    }
}

impl FromStr for Recurrence {
    type Err = GaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "theorem1" | "t1" => Ok(Recurrence::Theorem1),
            "theorem2" | "t2" => Ok(Recurrence::Theorem2),
            _ => Err(GaError::Domain(format!("unknown recurrence '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOptions {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub max_iter: usize,
    /// Convergence is declared once `P_e` drops below this.
    pub target: f64,
    /// Bisection stops when the bracket is narrower than this.
    pub tol: f64,
    pub ga: GaOptions,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            sigma_lo: 0.3,
            sigma_hi: 2.0,
            max_iter: 10_000,
            target: 1e-9,
            tol: 1e-5,
            ga: GaOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub p: f64,
    pub e: f64,
    pub pe: f64,
    pub r: f64,
    pub f: f64,
    pub m_beta: f64,
}

fn theorem1_point(x: f64, params: &EnsembleParams, reading: Reading) -> Result<(f64, f64, f64), GaError> {
    let r = 0.5 * (1.0 - params.dist().eval_rho(1.0 - 2.0 * x));
    let m_beta = mean_from_r(r.clamp(0.0, 0.5))?;
    let next = super::de_step_theorem1_with(x, params, reading)?;
    Ok((next, r, m_beta))
}

/// Runs the recurrence from `P = Q(1/σ)`, `E = 0` and records every state.
/// Stops after `max_iter` steps or once `P_e < target`.
pub fn trajectory(
    params: &EnsembleParams,
    recurrence: Recurrence,
    max_iter: usize,
    target: f64,
    opts: GaOptions,
) -> Result<Vec<TrajectoryPoint>, GaError> {
    let mut state = DeState::new(q(1.0 / params.sigma()), 0.0)?;
    let mut out = Vec::new();
    for iteration in 0..=max_iter {
        let (next, r, f, m_beta) = match recurrence {
            Recurrence::Theorem1 => {
                let (x, r, m) = theorem1_point(state.p, params, opts.reading)?;
                (DeState { p: x, e: 0.0 }, r, 0.0, m)
            }
            Recurrence::Theorem2 => {
                let (next, check) = de_step_with(state, params, opts)?;
                (next, check.r, check.f, check.m_beta)
            }
        };
        out.push(TrajectoryPoint {
            iteration,
            p: state.p,
            e: state.e,
            pe: state.pe(),
            r,
            f,
            m_beta,
        });
        if state.pe() < target || iteration == max_iter {
            break;
        }
        state = next;
    }
    Ok(out)
}

/// Number of iterations until `P_e < target`, or `None` within `max_iter`.
pub fn iterations_to_converge(
    params: &EnsembleParams,
    recurrence: Recurrence,
    max_iter: usize,
    target: f64,
    opts: GaOptions,
) -> Result<Option<usize>, GaError> {
    let mut state = DeState::new(q(1.0 / params.sigma()), 0.0)?;
    for l in 0..=max_iter {
        if state.pe() < target {
            return Ok(Some(l));
        }
        if l == max_iter {
            break;
        }
        state = match recurrence {
            Recurrence::Theorem1 => DeState {
                p: super::de_step_theorem1_with(state.p, params, opts.reading)?,
                e: 0.0,
            },
            Recurrence::Theorem2 => de_step_with(state, params, opts)?.0,
        };
    }
    Ok(None)
}

/// Largest σ in the configured range for which the recurrence converges,
/// to within `tol`.
pub fn threshold_search(
    dist: &DegreeDistribution,
    recurrence: Recurrence,
    opts: &ThresholdOptions,
) -> Result<f64, GaError> {
    if !(opts.tol > 0.0) {
        return Err(GaError::Domain(format!("tol must be positive, got {}", opts.tol)));
    }
    if !(opts.sigma_lo > 0.0 && opts.sigma_lo < opts.sigma_hi) {
        return Err(GaError::Domain(format!(
            "invalid sigma range [{}, {}]",
            opts.sigma_lo, opts.sigma_hi
        )));
    }
    dist.ensure_min_degree_two()
        .map_err(|e| GaError::Unsupported(e.to_string()))?;
    let converges = |sigma: f64| -> Result<bool, GaError> {
        let params = EnsembleParams::new(dist.clone(), sigma)?;
        Ok(iterations_to_converge(&params, recurrence, opts.max_iter, opts.target, opts.ga)?.is_some())
    };
    let (mut lo, mut hi) = (opts.sigma_lo, opts.sigma_hi);
    if !converges(lo)? {
        return Err(GaError::BracketNotFound {
            lo,
            hi,
            reason: "no convergence at the lower end".into(),
        });
    }
    if converges(hi)? {
        return Err(GaError::BracketNotFound {
            lo,
            hi,
            reason: "still converging at the upper end".into(),
        });
    }
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        if converges(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_recurrence() {
        assert_eq!("theorem1".parse::<Recurrence>().unwrap(), Recurrence::Theorem1);
        assert_eq!("THEOREM2".parse::<Recurrence>().unwrap(), Recurrence::Theorem2);
        assert!("x".parse::<Recurrence>().is_err());
    }

    #[test]
    fn degree_one_rejected() {
        let d = DegreeDistribution::new(&[(1, 1.0)], &[(6, 1.0)]).unwrap();
        let err = threshold_search(&d, Recurrence::Theorem1, &ThresholdOptions::default()).unwrap_err();
        assert!(matches!(err, GaError::Unsupported(_)));
    }

    #[test]
    fn bracket_errors() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        let opts = ThresholdOptions {
            sigma_lo: 1.5,
            sigma_hi: 2.0,
            ..Default::default()
        };
        assert!(matches!(
            threshold_search(&d, Recurrence::Theorem1, &opts),
            Err(GaError::BracketNotFound { .. })
        ));
    }

    #[test]
    fn trajectory_starts_at_channel_error() {
        let params = EnsembleParams::new(DegreeDistribution::regular(3, 6).unwrap(), 0.7).unwrap();
        let t = trajectory(&params, Recurrence::Theorem2, 1000, 1e-10, GaOptions::default()).unwrap();
        assert_eq!(t[0].p, q(1.0 / 0.7));
        assert_eq!(t[0].e, 0.0);
        assert!(t.last().unwrap().pe < 1e-10);
        assert!(t.len() <= 1001);
    }
}
