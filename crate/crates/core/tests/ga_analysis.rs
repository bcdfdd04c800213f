use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use scms_ldpc::code::DegreeDistribution;
use scms_ldpc::ga::{
    de_step, de_step_with, iterations_to_converge, negative_step, q, q_i, q_inv, theorem1_term, threshold_search,
    trajectory, weighted_error, DeState, EnsembleParams, GaOptions, Reading, Recurrence, ThresholdOptions,
};

fn reg36() -> DegreeDistribution {
    DegreeDistribution::regular(3, 6).unwrap()
}

fn irregular() -> DegreeDistribution {
    DegreeDistribution::new(&[(2, 0.3), (3, 0.3), (8, 0.4)], &[(6, 0.5), (7, 0.5)]).unwrap()
}

// Independent oracle: standard-normal tail and quantile from statrs, the
// scalar recurrence written out directly.
mod oracle {
    use super::*;

    pub fn q(x: f64) -> f64 {
        Normal::standard().sf(x)
    }

    pub fn q_inv(p: f64) -> f64 {
        -Normal::standard().inverse_cdf(p)
    }

    fn poly(coeffs: &[(usize, f64)], x: f64) -> f64 {
        coeffs.iter().map(|&(d, c)| c * x.powi(d as i32 - 1)).sum()
    }

    pub fn step(x: f64, lambda: &[(usize, f64)], rho: &[(usize, f64)], sigma: f64) -> f64 {
        let m0 = 2.0 / (sigma * sigma);
        let r = (1.0 - poly(rho, 1.0 - 2.0 * x)) / 2.0;
        let s = if r <= 0.0 { f64::INFINITY } else { q_inv(r) };
        lambda
            .iter()
            .map(|&(i, l)| l * q(((m0 + (i as f64 - 1.0) * 2.0 * s * s) / 2.0).sqrt()))
            .sum()
    }

    pub fn converges(lambda: &[(usize, f64)], rho: &[(usize, f64)], sigma: f64) -> bool {
        let mut x = q(1.0 / sigma);
        for _ in 0..10_000 {
            if x < 1e-9 {
                return true;
            }
            x = step(x, lambda, rho, sigma);
        }
        x < 1e-9
    }

    pub fn threshold(lambda: &[(usize, f64)], rho: &[(usize, f64)]) -> f64 {
        // fixed 60 halvings on its own bracket
        let (mut lo, mut hi) = (0.5, 1.5);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if converges(lambda, rho, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

// Q on a half-unit grid, 30-digit mpmath values rounded to f64
const MPMATH_Q: [(f64, f64); 33] = [
    (-8.0, 0.9999999999999993),
    (-7.5, 0.9999999999999681),
    (-7.0, 0.9999999999987201),
    (-6.5, 0.99999999995984),
    (-6.0, 0.9999999990134123),
    (-5.5, 0.9999999810104375),
    (-5.0, 0.9999997133484281),
    (-4.5, 0.9999966023268753),
    (-4.0, 0.9999683287581669),
    (-3.5, 0.9997673709209645),
    (-3.0, 0.9986501019683699),
    (-2.5, 0.9937903346742238),
    (-2.0, 0.9772498680518208),
    (-1.5, 0.9331927987311419),
    (-1.0, 0.8413447460685429),
    (-0.5, 0.6914624612740131),
    (0.0, 0.5),
    (0.5, 0.3085375387259869),
    (1.0, 0.15865525393145705),
    (1.5, 0.06680720126885807),
    (2.0, 0.02275013194817921),
    (2.5, 0.006209665325776135),
    (3.0, 0.0013498980316300946),
    (3.5, 0.00023262907903552504),
    (4.0, 3.1671241833119924e-05),
    (4.5, 3.3976731247300603e-06),
    (5.0, 2.866515718791939e-07),
    (5.5, 1.8989562465887718e-08),
    (6.0, 9.86587645037698e-10),
    (6.5, 4.016000583859118e-11),
    (7.0, 1.279812543885835e-12),
    (7.5, 3.1908916729108963e-14),
    (8.0, 6.220960574271784e-16),
];

#[test]
fn q_matches_high_precision_table() {
    for (x, want) in MPMATH_Q {
        assert!((q(x) - want).abs() <= 1e-12 * want.max(1e-4), "x = {x}");
    }
}

#[test]
fn q_matches_statrs_on_grid() {
    // statrs is itself only accurate to about 1e-11 here
    let mut x = -8.0;
    while x <= 8.0 {
        assert!((q(x) - oracle::q(x)).abs() <= 1e-10, "x = {x}");
        x += 0.01;
    }
}

#[test]
fn q_inv_matches_statrs() {
    for p in [1e-12, 1e-6, 0.001, 0.1, 0.3, 0.49, 0.5, 0.7, 0.99] {
        assert!((q_inv(p) - oracle::q_inv(p)).abs() < 1e-7, "p = {p}");
    }
}

#[test]
fn q_i_high_precision_example() {
    // λ(x) = x², ρ(x) = x⁵, σ = 1, P = 0.1, E = 0; 40-digit references
    let params = EnsembleParams::new(reg36(), 1.0).unwrap();
    let q3 = q_i(0.1, 0.0, 3, &params, GaOptions::default()).unwrap();
    assert!((q3 - 0.121_959_507_659_275_517_5).abs() < 1e-12, "{q3}");
    let q2 = q_i(0.1, 0.0, 2, &params, GaOptions::default()).unwrap();
    assert!((q2 - 0.138_789_991_580_666_224).abs() < 1e-12, "{q2}");
}

#[test]
fn joint_identity_on_grid() {
    for dist in [reg36(), irregular()] {
        let params = EnsembleParams::new(dist, 0.8).unwrap();
        for a in 0..100 {
            for b in 0..100 {
                let x = a as f64 / 99.0;
                let y = b as f64 / 99.0 * (1.0 - x);
                let state = DeState::new(x, y).unwrap();
                let next = de_step(state, &params).unwrap();
                let s = weighted_error(state, &params, GaOptions::default()).unwrap();
                let lhs = next.p + next.e;
                let rhs = x + (1.0 - x) * s;
                assert!((lhs - rhs).abs() <= 1e-12, "({x}, {y})");
                // domain preservation
                assert!(next.p >= 0.0 && next.e >= -1e-15 && next.p + next.e <= 1.0 + 1e-12, "({x}, {y}) -> {next:?}");
            }
        }
    }
}

#[test]
fn step_four_error_probability() {
    let params = EnsembleParams::new(irregular(), 0.9).unwrap();
    for (x, y) in [(0.05, 0.1), (0.2, 0.3), (0.01, 0.0)] {
        let state = DeState::new(x, y).unwrap();
        let next = de_step(state, &params).unwrap();
        let s = weighted_error(state, &params, GaOptions::default()).unwrap();
        assert!((next.pe() - (x * (1.0 - s) + s)).abs() < 1e-12);
        assert!((next.p - (x + y) * s).abs() < 1e-15);
    }
}

#[test]
fn r_without_erasures() {
    let d = irregular();
    for k in 0..=100 {
        let x = k as f64 / 200.0;
        let r = negative_step(x, 0.0, &d).unwrap();
        assert!((r - (1.0 - d.eval_rho(1.0 - 2.0 * x)) / 2.0).abs() <= 1e-15);
    }
}

#[test]
fn theorem1_summands_equal_q_i() {
    for dist in [reg36(), irregular()] {
        let params = EnsembleParams::new(dist.clone(), 0.85).unwrap();
        for x in [0.05, 0.1, 0.2] {
            for (i, _) in dist.lambda_terms() {
                let t = theorem1_term(x, i, &params, Reading::Corrected).unwrap();
                let qi = q_i(x, 0.0, i, &params, GaOptions::default()).unwrap();
                assert!((t - qi).abs() <= 1e-12, "x = {x}, i = {i}");
            }
        }
    }
}

#[test]
fn fixed_point_at_origin() {
    let params = EnsembleParams::new(irregular(), 1.2).unwrap();
    let s = DeState::new(0.0, 0.0).unwrap();
    assert_eq!(de_step(s, &params).unwrap(), s);
}

#[test]
fn below_threshold_trajectory_converges() {
    let params = EnsembleParams::new(reg36(), 0.7).unwrap();
    let t = trajectory(&params, Recurrence::Theorem2, 1000, 1e-10, GaOptions::default()).unwrap();
    assert!(t.last().unwrap().pe < 1e-10, "{:?}", t.last());
    let t1 = trajectory(&params, Recurrence::Theorem1, 1000, 1e-10, GaOptions::default()).unwrap();
    assert!(t1.last().unwrap().pe < 1e-10);
    // scalar recurrence decreases monotonically below threshold
    for w in t1.windows(2) {
        assert!(w[1].pe <= w[0].pe);
    }
}

#[test]
fn scalar_threshold_matches_oracle() {
    let opts = ThresholdOptions::default();
    let ours = threshold_search(&reg36(), Recurrence::Theorem1, &opts).unwrap();
    let theirs = oracle::threshold(&[(3, 1.0)], &[(6, 1.0)]);
    assert!((ours - theirs).abs() < 1e-3, "{ours} vs {theirs}");

    let d = irregular();
    let lambda: Vec<_> = d.lambda_terms().collect();
    let rho: Vec<_> = d.rho_terms().collect();
    let ours = threshold_search(&d, Recurrence::Theorem1, &opts).unwrap();
    let theirs = oracle::threshold(&lambda, &rho);
    assert!((ours - theirs).abs() < 1e-3, "{ours} vs {theirs}");
}

#[test]
fn scalar_step_matches_oracle() {
    let params = EnsembleParams::new(irregular(), 0.9).unwrap();
    let d = irregular();
    let lambda: Vec<_> = d.lambda_terms().collect();
    let rho: Vec<_> = d.rho_terms().collect();
    for k in 1..50 {
        let x = k as f64 / 100.0;
        let ours = scms_ldpc::ga::de_step_theorem1(x, &params).unwrap();
        let theirs = oracle::step(x, &lambda, &rho, 0.9);
        assert!((ours - theirs).abs() < 1e-9, "x = {x}");
    }
}

#[test]
fn threshold_stable_across_brackets() {
    let mut found = Vec::new();
    for (lo, hi) in [(0.3, 2.0), (0.5, 1.0), (0.8, 3.0), (0.6, 0.9)] {
        let opts = ThresholdOptions {
            sigma_lo: lo,
            sigma_hi: hi,
            ..Default::default()
        };
        found.push(threshold_search(&reg36(), Recurrence::Theorem1, &opts).unwrap());
    }
    for s in &found {
        assert!((s - found[0]).abs() < 1e-3, "{found:?}");
    }
}

#[test]
fn iterations_grow_towards_threshold() {
    let sigma_star = threshold_search(&reg36(), Recurrence::Theorem1, &ThresholdOptions::default()).unwrap();
    let mut last = 0;
    for k in 1..=20 {
        let sigma = 0.4 + (sigma_star - 0.01 - 0.4) * k as f64 / 20.0;
        let params = EnsembleParams::new(reg36(), sigma).unwrap();
        let it = iterations_to_converge(&params, Recurrence::Theorem1, 10_000, 1e-9, GaOptions::default())
            .unwrap()
            .expect("below threshold");
        assert!(it >= last, "sigma = {sigma}: {it} < {last}");
        last = it;
    }
}

#[test]
fn joint_threshold_not_below_scalar() {
    let scalar = threshold_search(&reg36(), Recurrence::Theorem1, &ThresholdOptions::default()).unwrap();
    let opts = ThresholdOptions {
        ga: GaOptions {
            check_model: scms_ldpc::ga::CheckErrorModel::ConditionedOnUnerased,
            ..Default::default()
        },
        ..Default::default()
    };
    let joint = threshold_search(&reg36(), Recurrence::Theorem2, &opts).unwrap();
    assert!(joint >= scalar, "{joint} < {scalar}");
}

#[test]
fn detailed_step_reports_check_state() {
    let params = EnsembleParams::new(reg36(), 0.8).unwrap();
    let (_, check) = de_step_with(DeState::new(0.1, 0.1).unwrap(), &params, GaOptions::default()).unwrap();
    assert!((check.f - (1.0 - 0.9f64.powi(5))).abs() < 1e-15);
    assert!((check.r - 0.5 * (0.9f64.powi(5) - 0.7f64.powi(5))).abs() < 1e-15);
    assert!(check.r + check.f <= 1.0);
}

proptest! {
    #[test]
    fn de_step_preserves_domain(x in 0.0f64..1.0, frac in 0.0f64..1.0, sigma in 0.3f64..2.0) {
        let y = frac * (1.0 - x);
        let params = EnsembleParams::new(irregular(), sigma).unwrap();
        let next = de_step(DeState::new(x, y).unwrap(), &params).unwrap();
        prop_assert!(next.p >= 0.0);
        prop_assert!(next.e >= -1e-15);
        prop_assert!(next.p + next.e <= 1.0 + 1e-12);
    }

    #[test]
    fn mean_round_trip(m in 0.0f64..100.0) {
        let r = q((m / 2.0).sqrt());
        let back = scms_ldpc::ga::mean_from_r(r).unwrap();
        prop_assert!((back - m).abs() < 1e-8);
    }
}
