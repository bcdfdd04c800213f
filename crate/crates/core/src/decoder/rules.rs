//! Node update rules shared by the graph decoder and the computation-tree
//! evaluator.

use super::{DecodeError, Variant};

/// sgn with sgn(0) = +1. Only ever multiplied into a magnitude that is
/// already 0 when the argument is 0, so the choice does not leak.
#[inline]
pub(crate) fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Min-sum check-to-variable message from the incoming variable-to-check
/// messages of the *other* edges of the check.
pub fn check_update_ms(incoming: &[f64]) -> Result<f64, DecodeError> {
    if incoming.is_empty() {
        return Err(DecodeError::EmptyCheckInput);
    }
    let sign: f64 = incoming.iter().map(|&a| sgn(a)).product();
    let mag = incoming.iter().fold(f64::INFINITY, |m, a| m.min(a.abs()));
    Ok(signed_magnitude(sign, mag))
}

#[inline]
pub(crate) fn signed_magnitude(sign: f64, mag: f64) -> f64 {
    if mag == 0.0 {
        0.0
    } else {
        sign * mag
    }
}

/// Sum-product check-to-variable message, `2 atanh(Π tanh(α/2))`, with the
/// magnitude saturated at `llr_cap`.
pub fn check_update_sp(incoming: &[f64], llr_cap: f64) -> Result<f64, DecodeError> {
    if incoming.is_empty() {
        return Err(DecodeError::EmptyCheckInput);
    }
    let p: f64 = incoming.iter().map(|&a| (0.5 * a).tanh()).product();
    Ok(sp_from_product(p, llr_cap))
}

#[inline]
pub(crate) fn sp_from_product(p: f64, llr_cap: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    let b = 2.0 * p.atanh();
    b.clamp(-llr_cap, llr_cap)
}

/// Normalized / offset amplitude correction. Identity for the other variants.
#[inline]
pub fn apply_correction(beta: f64, variant: &Variant) -> f64 {
    match *variant {
        Variant::NormalizedMinSum(scale) => {
            if beta == 0.0 {
                0.0
            } else {
                scale * beta
            }
        }
        Variant::OffsetMinSum(offset) => {
            let mag = (beta.abs() - offset).max(0.0);
            signed_magnitude(sgn(beta), mag)
        }
        _ => beta,
    }
}

/// A-posteriori LLR `γ + Σβ` and the extrinsic message for every edge,
/// `γ + Σ_{j≠k} β_j`.
///
/// Extrinsics are summed directly rather than as `γ̃ - β_k`; the two agree
/// up to rounding, and the direct sum is unaffected by zero terms, which
/// keeps tree pruning bit-exact.
pub fn variable_update(gamma: f64, betas: &[f64]) -> (f64, Vec<f64>) {
    let app = betas.iter().fold(gamma, |acc, &b| acc + b);
    let extrinsic = (0..betas.len()).map(|k| extrinsic_sum(gamma, betas, k)).collect();
    (app, extrinsic)
}

#[inline]
pub(crate) fn extrinsic_sum(gamma: f64, betas: &[f64], skip: usize) -> f64 {
    let mut acc = gamma;
    for (j, &b) in betas.iter().enumerate() {
        if j != skip {
            acc += b;
        }
    }
    acc
}

/// Self-correction: keep the new extrinsic if its sign agrees with the
/// previous message, otherwise erase. A zero on either side counts as both
/// signs.
#[inline]
pub fn scms_filter(alpha_tmp: f64, alpha_prev: f64) -> f64 {
    if alpha_prev == 0.0 || alpha_tmp == 0.0 || (alpha_tmp < 0.0) == (alpha_prev < 0.0) {
        alpha_tmp
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ms_examples() {
        assert_eq!(check_update_ms(&[2.0, -1.5, 3.0]).unwrap(), -1.5);
        assert_eq!(check_update_ms(&[-1.0, -1.0]).unwrap(), 1.0);
        let z = check_update_ms(&[-2.0, 0.0, 3.0]).unwrap();
        assert_eq!(z, 0.0);
        assert!(z.is_sign_positive());
        assert!(check_update_ms(&[]).is_err());
    }

    #[test]
    fn sp_examples() {
        // 40-digit reference: (tanh 1)(tanh -0.75)(tanh 1.5) = -0.43784350002..., 2 atanh(.) = -0.93911941982738795...
        let b = check_update_sp(&[2.0, -1.5, 3.0], 30.0).unwrap();
        assert!((b - -0.9391194198273880).abs() < 1e-14, "{b}");
        assert!(b.abs() < 1.5);
        assert!((check_update_sp(&[1.3], 30.0).unwrap() - 1.3).abs() < 1e-12);
        assert_eq!(check_update_sp(&[4.0, 0.0, -1.0], 30.0).unwrap(), 0.0);
        assert_eq!(check_update_sp(&[80.0, 90.0], 30.0).unwrap(), 30.0);
        assert!(check_update_sp(&[], 30.0).is_err());
    }

    #[test]
    fn corrections() {
        assert!((apply_correction(-1.5, &Variant::NormalizedMinSum(0.8)) - -1.2).abs() < 1e-15);
        assert_eq!(apply_correction(0.3, &Variant::OffsetMinSum(0.5)), 0.0);
        assert_eq!(apply_correction(-2.0, &Variant::OffsetMinSum(0.5)), -1.5);
        assert_eq!(apply_correction(2.0, &Variant::SelfCorrected), 2.0);
        assert_eq!(apply_correction(2.0, &Variant::MinSum), 2.0);
        assert_eq!(apply_correction(2.0, &Variant::SumProduct), 2.0);
    }

    #[test]
    fn variable_examples() {
        let (app, ext) = variable_update(1.0, &[-0.5, 2.0]);
        assert_eq!(app, 2.5);
        assert_eq!(ext, vec![3.0, 0.5]);
        let (app, ext) = variable_update(1.0, &[0.7]);
        assert_eq!(app, 1.7);
        assert_eq!(ext, vec![1.0]);
        let (app, ext) = variable_update(-0.4, &[0.0, 0.0, 0.0]);
        assert_eq!(app, -0.4);
        assert_eq!(ext, vec![-0.4; 3]);
    }

    #[test]
    fn filter_examples() {
        assert_eq!(scms_filter(-0.3, 1.2), 0.0);
        assert_eq!(scms_filter(-0.3, 0.0), -0.3);
        assert_eq!(scms_filter(0.4, 1.2), 0.4);
        assert_eq!(scms_filter(0.0, -1.2), 0.0);
        assert_eq!(scms_filter(-2.0, -0.1), -2.0);
    }
}
