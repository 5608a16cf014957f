mod common;

use common::*;
use interval_owa::milp::{build_owa_milp, parse_lp, write_lp};
use interval_owa::{
    bin_integrals, build_distribution, discrete_owa_value, exact_cdf, exact_var, interval_owa_exact,
    local_search_discrete_owa, make_power_weight, sample_scenarios, solve_discrete_owa_exact,
    solve_greedy_matroid, solve_sampling, BinWeights64, CostDistribution64, FeasibleSet,
    InnerSolver, IntervalInstance32, IntervalInstance64, ScenarioSample64, Solution,
    WeightDensity32,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bounds_strategy(max_m: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec(
        (0.0..20.0f64, prop_oneof![1 => Just(0.0), 5 => 1.0..12.0f64]).prop_map(|(lo, w)| (lo, lo + w)),
        1..=max_m,
    )
}

fn dist(bounds: &[(f64, f64)]) -> CostDistribution64 {
    CostDistribution64::from_intervals(bounds.iter().copied())
}

fn sample_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, usize)> {
    (1usize..=6, 1usize..=7).prop_flat_map(|(n, k)| {
        (
            prop::collection::vec(prop::collection::vec(0.0..20.0f64, n), k),
            Just(n),
        )
    })
}

fn power_bins(alpha: f64, k: usize) -> BinWeights64 {
    bin_integrals(&make_power_weight(alpha).unwrap(), k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_monotone_with_unit_endpoints(bounds in bounds_strategy(10)) {
        let d = dist(&bounds);
        prop_assume!(!d.is_point_mass());
        prop_assert!(exact_cdf(&d, d.lower()).unwrap().abs() <= 1e-9);
        prop_assert!((exact_cdf(&d, d.upper()).unwrap() - 1.0).abs() <= 1e-9);
        let mut prev = 0.0;
        for k in 0..=200 {
            let y = d.lower() + (d.upper() - d.lower()) * k as f64 / 200.0;
            let f = exact_cdf(&d, y).unwrap();
            prop_assert!(f >= prev - 1e-12, "F dropped from {prev} to {f} at {y}");
            prev = f;
        }
    }

    #[test]
    fn var_inverts_cdf(bounds in bounds_strategy(10)) {
        let d = dist(&bounds);
        prop_assume!(!d.is_point_mass());
        for k in 1..=99 {
            let t = k as f64 / 100.0;
            let v = exact_var(&d, t).unwrap();
            prop_assert!((exact_cdf(&d, v).unwrap() - t).abs() <= 1e-8);
        }
    }

    #[test]
    fn support_and_mean(bounds in bounds_strategy(10)) {
        let d = dist(&bounds);
        let lo: f64 = bounds.iter().map(|b| b.0).sum();
        let hi: f64 = bounds.iter().map(|b| b.1).sum();
        prop_assert!((d.lower() - lo).abs() < 1e-9);
        prop_assert!((d.upper() - hi).abs() < 1e-9);
        prop_assert!(d.widths().iter().all(|w| *w > 0.0));
    }

    #[test]
    fn exact_owa_matches_quantile_route(bounds in bounds_strategy(6), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_weight(&mut rng);
        let d = dist(&bounds);
        let a = interval_owa::owa_of_distribution(&d, &w, 1e-10).unwrap();
        let b = interval_owa::owa_by_quantile_integral(&d, &w, 1e-9).unwrap();
        prop_assert!((a - b).abs() <= 1e-5 * d.upper().abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn bins_are_normalized_and_nonincreasing(alpha in 1.0..20.0f64, k in 1usize..500) {
        let b = power_bins(alpha, k);
        let sum: f64 = b.values().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        prop_assert!(b.is_nonincreasing());
        prop_assert!(b.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn discrete_owa_ignores_scenario_order((rows, n) in sample_strategy(), alpha in 1.0..6.0f64, rot in 0usize..7) {
        let k = rows.len();
        let x = Solution::from_bits((0..n).map(|i| i % 2 == 0).collect());
        let a = ScenarioSample64::new(rows.clone(), power_bins(alpha, k)).unwrap();
        let mut rotated = rows.clone();
        rotated.rotate_left(rot % k);
        rotated.reverse();
        let b = ScenarioSample64::new(rotated, power_bins(alpha, k)).unwrap();
        let (va, vb) = (discrete_owa_value(&a, &x).unwrap(), discrete_owa_value(&b, &x).unwrap());
        prop_assert!((va - vb).abs() <= 1e-12 * va.abs().max(1.0));
    }

    #[test]
    fn uniform_discrete_weights_give_the_mean((rows, n) in sample_strategy()) {
        let k = rows.len();
        let x = Solution::from_bits(vec![true; n]);
        let uni = BinWeights64::from_values(vec![1.0 / k as f64; k]).unwrap();
        let s = ScenarioSample64::new(rows.clone(), uni).unwrap();
        let mean = rows.iter().map(|r| r.iter().sum::<f64>()).sum::<f64>() / k as f64;
        prop_assert!((discrete_owa_value(&s, &x).unwrap() - mean).abs() <= 1e-12 * mean.abs().max(1.0));
    }

    #[test]
    fn raising_a_scenario_cost_never_lowers_discrete_owa(
        (rows, n) in sample_strategy(), alpha in 1.0..6.0f64, j in 0usize..7, i in 0usize..6, bump in 0.0..5.0f64
    ) {
        let k = rows.len();
        let x = Solution::from_bits(vec![true; n]);
        let before = discrete_owa_value(&ScenarioSample64::new(rows.clone(), power_bins(alpha, k)).unwrap(), &x).unwrap();
        let mut raised = rows.clone();
        raised[j % k][i % n] += bump;
        let after = discrete_owa_value(&ScenarioSample64::new(raised, power_bins(alpha, k)).unwrap(), &x).unwrap();
        prop_assert!(after >= before - 1e-12);
    }

    #[test]
    fn milp_text_round_trips((rows, n) in sample_strategy(), alpha in 1.0..6.0f64, p in 0usize..6) {
        let k = rows.len();
        let s = ScenarioSample64::new(rows, power_bins(alpha, k)).unwrap();
        let fs = FeasibleSet::selection(n, p.min(n)).unwrap();
        let model = build_owa_milp(&s, &fs).unwrap();
        let text = write_lp(&model);
        let parsed = parse_lp(&text).unwrap();
        prop_assert_eq!(&parsed, &model);
        prop_assert_eq!(write_lp(&parsed), text);
        prop_assert_eq!(model.constraints.len(), k * k + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_values_are_ordered(seed in 0u64..10_000, n in 2usize..=9, k in 1usize..40, alpha in 1.0..6.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = 1 + (seed as usize) % n;
        let inst = random_instance(&mut rng, n, p);
        let w = make_power_weight(alpha).unwrap();
        let sample = sample_scenarios(&inst, k, seed).unwrap().with_density(&w).unwrap();
        let exact = solve_discrete_owa_exact(&sample, inst.feasibility()).unwrap();
        let start = Solution::from_indices(n, &(0..p).collect::<Vec<_>>()).unwrap();
        let local = local_search_discrete_owa(&sample, inst.feasibility(), &start, 10_000).unwrap();
        let greedy = solve_greedy_matroid(&inst, &w, k, seed).unwrap();
        let sampling = solve_sampling(&inst, &w, k, seed, InnerSolver::Exact).unwrap();
        prop_assert!(exact.reported_objective <= local.reported_objective);
        prop_assert!(exact.reported_objective <= greedy.reported_objective);
        prop_assert_eq!(sampling.reported_objective, exact.reported_objective);
        for r in [&exact, &local, &greedy, &sampling] {
            prop_assert!(inst.is_feasible(&r.solution).unwrap());
        }
    }

    #[test]
    fn f32_tracks_f64(bounds in bounds_strategy(5), alpha in 1.0..5.0f64) {
        let n = bounds.len();
        let x = Solution::from_bits(vec![true; n]);
        let fs = FeasibleSet::selection(n, n).unwrap();
        let i64_ = IntervalInstance64::from_bounds(&bounds, fs.clone()).unwrap();
        let b32: Vec<(f32, f32)> = bounds.iter().map(|&(a, b)| (a as f32, b as f32)).collect();
        let i32_ = IntervalInstance32::from_bounds(&b32, fs).unwrap();
        let v64 = interval_owa_exact(&i64_, &make_power_weight(alpha).unwrap(), &x, 1e-9).unwrap();
        let w32: WeightDensity32 = make_power_weight(alpha as f32).unwrap();
        let v32 = interval_owa_exact(&i32_, &w32, &x, 1e-5).unwrap();
        prop_assert!((v64 - v32 as f64).abs() <= 2e-3 * v64.abs().max(1.0), "{v64} vs {v32}");
    }
}

#[test]
fn parallel_results_do_not_depend_on_thread_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let inst = random_instance(&mut rng, 10, 5);
    let w = make_power_weight(4.0).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let s = sample_scenarios(&inst, 3000, 5).unwrap();
                let g = solve_greedy_matroid(&inst, &w, 200, 9).unwrap();
                let e = solve_sampling(&inst, &w, 200, 9, InnerSolver::Exact).unwrap();
                let v = interval_owa::interval_owa_sampled(&inst, &w, &e.solution, 50_000, 3).unwrap();
                (s, g.solution, g.reported_objective, e.solution, e.reported_objective, v)
            })
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.2.to_bits(), b.2.to_bits());
    assert_eq!(a.3, b.3);
    assert_eq!(a.4.to_bits(), b.4.to_bits());
    assert_eq!(a.5.to_bits(), b.5.to_bits());
}

#[test]
fn distribution_of_empty_selection_is_zero() {
    let inst = IntervalInstance64::from_bounds(&[(1.0, 4.0)], FeasibleSet::selection(1, 0).unwrap()).unwrap();
    let d = build_distribution(&inst, &Solution::empty(1)).unwrap();
    assert!(d.is_point_mass());
    assert_eq!(d.lower(), 0.0);
}
