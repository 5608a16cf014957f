mod common;

use common::*;
use interval_owa::{
    gen_type1, interval_owa_exact, local_search_discrete_owa, make_hurwicz_weight, make_power_weight,
    make_uniform_weight, sample_scenarios, solve_discrete_owa_exact, solve_greedy_matroid,
    solve_midpoint, solve_nominal, solve_sampling, solve_yager, BinWeights64, CumulativeWeight64,
    FeasibleSet, InnerSolver, IntervalInstance64, OwaError, ScenarioSample64, Solution,
    UniformMatroid,
};
use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn degenerate(costs: &[f64], p: usize) -> IntervalInstance64 {
    let b: Vec<(f64, f64)> = costs.iter().map(|&c| (c, c)).collect();
    IntervalInstance64::from_bounds(&b, FeasibleSet::selection(costs.len(), p).unwrap()).unwrap()
}

/// Nominal optimum by enumeration, ties to the lexicographically smallest.
fn nominal_oracle(costs: &[f64], p: usize) -> Vec<usize> {
    (0..costs.len())
        .combinations(p)
        .min_by(|a, b| {
            let ca: f64 = a.iter().map(|&i| costs[i]).sum();
            let cb: f64 = b.iter().map(|&i| costs[i]).sum();
            ca.partial_cmp(&cb).unwrap()
        })
        .unwrap()
}

#[test]
fn sampling_on_degenerate_instance_is_nominal() {
    let costs = [4.0, 1.0, 7.0, 2.0, 2.5, 9.0];
    let inst = degenerate(&costs, 3);
    for inner in [InnerSolver::Exact, InnerSolver::Local] {
        let r = solve_sampling(&inst, &make_power_weight(2.0).unwrap(), 17, 3, inner).unwrap();
        assert_eq!(r.solution.indices(), nominal_oracle(&costs, 3));
        assert_eq!(r.reported_objective, 5.5);
    }
}

#[test]
fn sampling_returns_p_items() {
    let inst: IntervalInstance64 = gen_type1(10, 4).unwrap();
    let r = solve_sampling(&inst, &make_power_weight(5.0).unwrap(), 10, 8, InnerSolver::Exact).unwrap();
    assert_eq!(r.solution.count(), 5);
    assert!(inst.is_feasible(&r.solution).unwrap());
    assert_eq!(r.k, Some(10));
}

#[test]
fn greedy_fills_rank_of_uniform_matroid() {
    let base: IntervalInstance64 = gen_type1(9, 2).unwrap();
    let inst = base
        .with_feasibility(FeasibleSet::matroid(UniformMatroid { n: 9, rank: 4 }))
        .unwrap();
    let r = solve_greedy_matroid(&inst, &make_power_weight(3.0).unwrap(), 30, 1).unwrap();
    assert_eq!(r.solution.count(), 4);
}

#[test]
fn greedy_on_degenerate_instance_is_nominal() {
    let costs = [3.0, 3.0, 1.0, 8.0, 0.5, 2.0, 2.0];
    let inst = degenerate(&costs, 4);
    let r = solve_greedy_matroid(&inst, &make_power_weight(5.0).unwrap(), 5, 0).unwrap();
    assert_eq!(r.solution.indices(), nominal_oracle(&costs, 4));
}

#[test]
fn greedy_is_deterministic() {
    let inst: IntervalInstance64 = gen_type1(12, 6).unwrap();
    let w = make_power_weight(1.5).unwrap();
    let a = solve_greedy_matroid(&inst, &w, 100, 42).unwrap();
    let b = solve_greedy_matroid(&inst, &w, 100, 42).unwrap();
    assert_eq!(a.solution, b.solution);
    assert_eq!(a.reported_objective.to_bits(), b.reported_objective.to_bits());
}

#[test]
fn greedy_rejects_explicit_sets() {
    let inst = table1(example_set());
    assert!(matches!(
        solve_greedy_matroid(&inst, &make_uniform_weight(), 10, 0),
        Err(OwaError::Capability(_))
    ));
}

#[test]
fn sampling_picks_x1_on_the_worked_example() {
    let inst = table1(example_set());
    let r = solve_sampling(&inst, &make_power_weight(3.0).unwrap(), 10_000, 1, InnerSolver::Exact).unwrap();
    assert_eq!(r.solution, x1());
}

#[test]
fn yager_baseline_examples() {
    let inst = table1(example_set());
    let r = solve_yager(&inst, &CumulativeWeight64::linear(), 1e-12).unwrap();
    assert_eq!(r.solution, x1());
    assert!((r.reported_objective - 6.0).abs() < 1e-12);

    let inst: IntervalInstance64 = gen_type1(10, 3).unwrap();
    let hi = inst.upper_costs();
    let lo = inst.lower_costs();
    // lambda is 1 (resp. 0) only up to quadrature error, which may reorder
    // ties, so compare the optimal values
    let total = |c: &[f64], idx: &[usize]| idx.iter().map(|&i| c[i]).sum::<f64>();
    let worst = solve_yager(&inst, &CumulativeWeight64::worst_case(), 1e-12).unwrap();
    assert_eq!(total(&hi, &worst.solution.indices()), total(&hi, &nominal_oracle(&hi, 5)));
    assert!((worst.reported_objective - total(&hi, &worst.solution.indices())).abs() < 1e-9);
    let best = solve_yager(&inst, &CumulativeWeight64::best_case(), 1e-12).unwrap();
    assert_eq!(total(&lo, &best.solution.indices()), total(&lo, &nominal_oracle(&lo, 5)));
}

#[test]
fn midpoint_is_optimal_for_symmetric_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let inst = random_instance(&mut rng, 7, 3);
        let mid = solve_midpoint(&inst).unwrap().solution;
        for w in [make_uniform_weight(), make_hurwicz_weight(0.5, 0.05).unwrap()] {
            let got = interval_owa_exact(&inst, &w, &mid, 1e-10).unwrap();
            let opt = (0..7)
                .combinations(3)
                .map(|idx| interval_owa_exact(&inst, &w, &Solution::from_indices(7, &idx).unwrap(), 1e-10).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(got <= opt + 1e-8, "{got} vs {opt}");
        }
    }
}

#[test]
fn midpoint_is_within_factor_two() {
    let inst: IntervalInstance64 = gen_type1::<f64>(8, 19).unwrap().with_feasibility(FeasibleSet::selection(8, 4).unwrap()).unwrap();
    let w = make_power_weight(5.0).unwrap();
    let mid = solve_midpoint(&inst).unwrap().solution;
    let got = interval_owa_exact(&inst, &w, &mid, 1e-10).unwrap();
    let opt = (0..8)
        .combinations(4)
        .map(|idx| interval_owa_exact(&inst, &w, &Solution::from_indices(8, &idx).unwrap(), 1e-10).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(got <= 2.0 * opt && got >= opt - 1e-8);
}

#[test]
fn local_search_is_bounded_by_enumeration() {
    let inst: IntervalInstance64 = gen_type1::<f64>(8, 5).unwrap().with_feasibility(FeasibleSet::selection(8, 4).unwrap()).unwrap();
    let w = make_power_weight(3.0).unwrap();
    let sample = sample_scenarios(&inst, 50, 6).unwrap().with_density(&w).unwrap();
    let exact = solve_discrete_owa_exact(&sample, inst.feasibility()).unwrap();
    let start = solve_nominal(inst.feasibility(), &inst.midpoints()).unwrap();
    let local = local_search_discrete_owa(&sample, inst.feasibility(), &start, 1000).unwrap();
    assert!(local.reported_objective >= exact.reported_objective);
    let start_value = interval_owa::discrete_owa_value(&sample, &start).unwrap();
    assert!(local.reported_objective <= start_value);
}

#[test]
fn worst_scenario_weights_give_min_max() {
    let rows = vec![vec![3.0, 1.0, 4.0, 1.5], vec![0.5, 6.0, 2.0, 2.0], vec![2.0, 2.0, 2.0, 5.0]];
    let s = ScenarioSample64::new(rows.clone(), BinWeights64::from_values(vec![1.0, 0.0, 0.0]).unwrap()).unwrap();
    let r = solve_discrete_owa_exact(&s, &FeasibleSet::selection(4, 2).unwrap()).unwrap();
    let oracle = (0..4)
        .combinations(2)
        .map(|idx| rows.iter().map(|row| idx.iter().map(|&i| row[i]).sum::<f64>()).fold(f64::MIN, f64::max))
        .fold(f64::INFINITY, f64::min);
    assert_eq!(r.reported_objective, oracle);
}

#[test]
fn identical_scenarios_reduce_to_nominal_selection() {
    let costs = vec![5.0, 1.0, 3.0, 3.0, 0.5];
    let s = ScenarioSample64::new(vec![costs.clone(); 6], BinWeights64::from_values(vec![0.5, 0.2, 0.1, 0.1, 0.05, 0.05]).unwrap()).unwrap();
    let r = solve_discrete_owa_exact(&s, &FeasibleSet::selection(5, 3).unwrap()).unwrap();
    assert_eq!(r.solution.indices(), nominal_oracle(&costs, 3));
    assert_eq!(r.reported_objective, 4.5);
}

#[test]
fn table1_midpoint_scenario_prefers_item_one() {
    let s = ScenarioSample64::new(vec![vec![3.0, 3.0, 6.0]], BinWeights64::from_values(vec![1.0]).unwrap()).unwrap();
    let r = solve_discrete_owa_exact(&s, &FeasibleSet::selection(3, 1).unwrap()).unwrap();
    assert_eq!(r.solution.indices(), vec![0]);
}

#[test]
fn enumeration_cap_is_enforced() {
    let s = ScenarioSample64::new(vec![vec![1.0; 30]], BinWeights64::from_values(vec![1.0]).unwrap()).unwrap();
    let err = solve_discrete_owa_exact(&s, &FeasibleSet::selection(30, 15).unwrap()).unwrap_err();
    assert!(matches!(err, OwaError::Capability(_)));
    assert!(err.to_string().contains("local search"));
}

#[test]
fn reports_serialize_one_based() {
    let inst = table1(FeasibleSet::selection(3, 1).unwrap());
    let r = solve_midpoint(&inst).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["selected"], serde_json::json!([1]));
    assert_eq!(v["solver"], "midpoint");
}
