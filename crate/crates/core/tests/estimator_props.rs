use nisq_modal::circuit::NoiseModel;
use nisq_modal::estimator::{estimate_eigenvalue, repetition_seed, EstimationPlan, Shots};
use nisq_modal::oscillator::{standard_ladder, Geometry};
use proptest::prelude::*;

#[test]
fn noiseless_analytic_is_exact_for_every_eigenpair() {
    for g in [
        Geometry::chain(2),
        Geometry::chain(5),
        Geometry::chain(8),
        Geometry::chain(16),
    ]
    .into_iter()
    .chain(standard_ladder().into_iter().filter(|g| g.is_blade()).step_by(5))
    {
        let p = g.padded_matrix().unwrap();
        for k in 0..p.matrix.dim() {
            let e = estimate_eigenvalue(&p.matrix, k, &NoiseModel::noiseless(), Shots::Analytic, 0).unwrap();
            assert!((e.lambda_est - e.lambda_exact).abs() < 1e-8, "{g} k={k}");
        }
    }
}

#[test]
fn omega_is_root_of_estimate() {
    let p = Geometry::chain(8).padded_matrix().unwrap();
    let plan = EstimationPlan::for_max(&p.matrix).unwrap();
    for seed in 0..20 {
        let e = plan.run(&NoiseModel::default(), Shots::Sampled(64), seed).unwrap();
        if e.lambda_est >= 0.0 {
            assert_eq!(e.omega_est, e.lambda_est.sqrt());
            assert!(!e.omega_clamped);
        } else {
            assert_eq!(e.omega_est, 0.0);
            assert!(e.omega_clamped);
        }
    }
}

#[test]
fn analytic_rel_error_grows_with_gate_count() {
    let noise = NoiseModel::default();
    let mut points: Vec<(usize, f64)> = standard_ladder()
        .iter()
        .map(|g| {
            let plan = EstimationPlan::for_max(&g.padded_matrix().unwrap().matrix).unwrap();
            let e = plan.run(&noise, Shots::Analytic, 0).unwrap();
            (e.gate_count, e.rel_error.unwrap())
        })
        .collect();
    points.sort_by_key(|p| p.0);
    for w in points.windows(2) {
        if w[1].0 > w[0].0 {
            assert!(w[1].1 > w[0].1, "{points:?}");
        } else {
            assert!((w[1].1 - w[0].1).abs() < 1e-12);
        }
    }
}

#[test]
fn chain_gate_count_non_decreasing_in_qubits() {
    let counts: Vec<usize> = (1..=6)
        .map(|q| {
            let p = Geometry::chain(1 << q).padded_matrix().unwrap();
            EstimationPlan::for_max(&p.matrix).unwrap().gate_count()
        })
        .collect();
    for w in counts.windows(2) {
        assert!(w[1] >= w[0], "{counts:?}");
    }
}

#[test]
fn repetition_seeds_are_distinct() {
    let seeds: std::collections::HashSet<u64> = (0..10_000).map(|r| repetition_seed(42, r)).collect();
    assert_eq!(seeds.len(), 10_000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_noise_law(idx in 0usize..24, f in 0.9f64..0.99999) {
        let g = standard_ladder()[idx];
        let p = g.padded_matrix().unwrap();
        let plan = EstimationPlan::for_max(&p.matrix).unwrap();
        let noise = NoiseModel::global_depolarizing(f).unwrap();
        let e = plan.run(&noise, Shots::Analytic, 0).unwrap();
        let expect = 1.0 - f.powi(e.gate_count as i32);
        prop_assert!((e.rel_error.unwrap() - expect).abs() < 1e-9);
        let interp = e.lambda_mixed + f.powi(e.gate_count as i32) * (e.lambda_exact - e.lambda_mixed);
        prop_assert!((e.lambda_est - interp).abs() < 1e-9);
    }

    #[test]
    fn sampled_runs_are_seed_deterministic(seed in any::<u64>(), n in 2usize..12) {
        let p = Geometry::chain(n).padded_matrix().unwrap();
        let plan = EstimationPlan::for_max(&p.matrix).unwrap();
        let a = plan.run(&NoiseModel::default(), Shots::Sampled(256), seed).unwrap();
        let b = plan.run(&NoiseModel::default(), Shots::Sampled(256), seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
