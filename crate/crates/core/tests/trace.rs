#![allow(clippy::needless_range_loop)]

mod common;

use probarith::trace::DEFAULT_JUMP_THRESHOLD;
use probarith::{
    detect_features, refine_mul, trace_sweep, triple_from_pairs, GaussianTriple, MulSolverConfig, OperationSpec,
    SweepMode, SweepOperand, SweepSpec, TraceCurve,
};

fn quotient_base() -> GaussianTriple<f64> {
    triple_from_pairs([(0.7, 1.0), (2.0, 10.0), (5.0, 1.0)]).unwrap()
}

fn quotient_sweep(mode: SweepMode) -> TraceCurve<f64> {
    let sweep = SweepSpec::new(SweepOperand::First, -200.0, 200.0, 401, mode).unwrap();
    trace_sweep(&quotient_base(), &OperationSpec::mul(0.1).unwrap(), &sweep).unwrap()
}

fn second_differences_vanish(curve: &TraceCurve<f64>) {
    for w in curve.samples.windows(3) {
        for k in 0..3 {
            let d2 = w[0].refined.means[k] - 2.0 * w[1].refined.means[k] + w[2].refined.means[k];
            assert!(d2.abs() <= 1e-9, "second difference {d2} at {}", w[1].sweep_value);
        }
    }
}

#[test]
fn add_sweep_is_affine_in_every_operand() {
    let base = triple_from_pairs([(1.0, 1.0), (10.0, 5.0), (50.0, 10.0)]).unwrap();
    let op = OperationSpec::add(0.1).unwrap();
    for operand in [SweepOperand::First, SweepOperand::Second, SweepOperand::Third] {
        let sweep = SweepSpec::new(operand, -100.0, 100.0, 401, SweepMode::WarmStart).unwrap();
        let curve = trace_sweep(&base, &op, &sweep).unwrap();
        assert_eq!(curve.samples.len(), 401);
        second_differences_vanish(&curve);
    }
}

#[test]
fn quotient_sweep_hyperbola_regime() {
    let curve = quotient_sweep(SweepMode::ColdMultiStart);
    let at_50 = curve.samples.iter().find(|s| s.sweep_value == 50.0).unwrap();
    assert!((at_50.refined.means[1] - 0.1).abs() <= 0.05 * 0.1, "{:?}", at_50.refined.means);

    let f = detect_features(&curve, DEFAULT_JUMP_THRESHOLD, 50.0).unwrap();
    assert!(f.asymptote_max_rel_dev.unwrap() <= 0.05);
    assert!(f.max_second_mean.value.is_finite());
    assert!(!f.jumps.is_empty());
    assert!(f.jumps.iter().any(|j| j.midpoint() < 0.0 && j.midpoint() > -5.0), "{:?}", f.jumps);
}

#[test]
fn quotient_sweep_is_finite_in_both_modes() {
    for mode in [SweepMode::WarmStart, SweepMode::ColdMultiStart] {
        let curve = quotient_sweep(mode);
        assert!(curve.all_finite());
        assert!(curve.samples.iter().all(|s| s.refined.diagnostics.converged));
        let f = detect_features(&curve, DEFAULT_JUMP_THRESHOLD, 50.0).unwrap();
        assert!(f.max_second_mean.value.is_finite());
        assert!(!f.jumps.is_empty());
    }
}

#[test]
fn warm_start_follows_a_branch() {
    // sweeping upward, the branch with negative second mean persists past zero
    let curve = quotient_sweep(SweepMode::WarmStart);
    let at_1 = curve.samples.iter().find(|s| s.sweep_value == 1.0).unwrap();
    assert!(at_1.refined.means[1] < 0.0);
    let f = detect_features(&curve, DEFAULT_JUMP_THRESHOLD, 50.0).unwrap();
    // away from detected jumps, consecutive samples stay within the jump threshold
    let dists: Vec<f64> = curve
        .samples
        .windows(2)
        .map(|w| common::norm(&[0, 1, 2].map(|k| w[1].refined.means[k] - w[0].refined.means[k])))
        .collect();
    let mut sorted = dists.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    for (w, d) in curve.samples.windows(2).zip(&dists) {
        let is_jump = f.jumps.iter().any(|j| j.between == (w[0].sweep_value, w[1].sweep_value));
        if !is_jump {
            assert!(*d <= 10.0 * median);
        }
    }
}

#[test]
fn product_quotient_sweep_passes_through_example() {
    let base: GaussianTriple<f64> = triple_from_pairs([(1.2, 0.4), (-2.0, 10.0), (7.0, 6.0)]).unwrap();
    let sweep = SweepSpec::new(SweepOperand::First, -8.0, 8.0, 401, SweepMode::default()).unwrap();
    let curve = trace_sweep(&base, &OperationSpec::mul(0.1).unwrap(), &sweep).unwrap();
    let s = curve.samples.iter().find(|s| (s.sweep_value - 1.2).abs() < 1e-12).unwrap();
    let want = [1.234, 4.205, 5.189];
    for k in 0..3 {
        assert!((s.refined.means[k] - want[k]).abs() < 5e-3, "{:?}", s.refined.means);
    }
    assert!(curve.all_finite());
    let f = detect_features(&curve, DEFAULT_JUMP_THRESHOLD, 4.0).unwrap();
    assert!(f.max_second_mean.value.is_finite());
}

#[test]
fn cold_samples_match_independent_refinement() {
    let curve = quotient_sweep(SweepMode::ColdMultiStart);
    let op = OperationSpec::mul(0.1).unwrap();
    for s in curve.samples.iter().step_by(37) {
        let prior = quotient_base().with_mean(0, s.sweep_value).unwrap();
        let r = refine_mul(&prior, &op, &MulSolverConfig::default()).unwrap();
        assert_eq!(r.means, s.refined.means);
    }
}

#[test]
fn finite_across_zero_for_factorization_sweep() {
    let base = triple_from_pairs([(1.0, 10.0), (1.0, 10.0), (7.0, 2.0)]).unwrap();
    let op = OperationSpec::mul(0.01).unwrap();
    for mode in [SweepMode::WarmStart, SweepMode::ColdMultiStart] {
        let sweep = SweepSpec::new(SweepOperand::Third, -10.0, 10.0, 201, mode).unwrap();
        let curve = trace_sweep(&base, &op, &sweep).unwrap();
        assert!(curve.all_finite());
        let f = detect_features(&curve, DEFAULT_JUMP_THRESHOLD, 1.0).unwrap();
        assert_eq!(f.asymptote_max_rel_dev, None);
    }
}
