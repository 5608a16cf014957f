//! Ordered weighted averaging (OWA) for combinatorial minimization when
//! item costs are only known to lie in intervals.
//!
//! Costs are modelled as independent uniforms on their intervals. The OWA
//! value of a solution integrates a preference density against the quantile
//! function of its total cost. This crate evaluates it exactly for up to
//! [`EXACT_LIMIT`] uncertain items and by sampling beyond that. It also
//! provides a sampling solver, a greedy solver for matroids, the Yager and
//! midpoint baselines, and an experiment harness.
//!
//! Everything is generic over the float type `F` (`f32` or `f64`). The
//! aliases at the crate root fix `f64` or `f32`.
//!
//! ```
//! use interval_owa::{interval_owa_exact, make_power_weight, FeasibleSet, IntervalInstance64, Solution};
//!
//! let inst = IntervalInstance64::from_bounds(
//!     &[(1.0, 5.0), (1.0, 5.0), (2.0, 10.0)],
//!     FeasibleSet::selection(3, 2).unwrap(),
//! )
//! .unwrap();
//! let w = make_power_weight(3.0).unwrap();
//! let x = Solution::from_indices(3, &[0, 1]).unwrap();
//! let v = interval_owa_exact(&inst, &w, &x, 1e-9).unwrap();
//! assert!((v - 7.4).abs() < 1e-8);
//! ```

// `!(a <= b)` style checks are kept on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete;
pub mod error;
pub mod harness;
pub mod instance;
pub mod milp;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod solvers;
pub mod var;
pub mod weights;

pub use discrete::{
    discrete_owa_value, local_search_discrete_owa, solve_discrete_owa_exact, ScenarioSample,
    ENUMERATION_CAP,
};
pub use error::{OwaError, Result};
pub use harness::{
    evaluate_final, gen_type1, gen_type2, run_experiment, ExperimentConfig, ExperimentOutput,
    InstanceType, Method,
};
pub use instance::{
    deterministic_cost, is_feasible, parse_instance, FeasibleSet, IndependenceOracle, Interval,
    IntervalInstance, PartitionMatroid, Solution, UniformMatroid,
};
pub use milp::{build_owa_milp, export_milp, parse_lp, write_lp, LpModel};
pub use report::SolveReport;
pub use scalar::Scalar;
pub use solvers::{
    solve_greedy_matroid, solve_midpoint, solve_nominal, solve_sampling, solve_yager, InnerSolver,
};
pub use var::{
    build_distribution, exact_cdf, exact_var, interval_owa_exact, interval_owa_sampled,
    owa_by_quantile_integral, owa_of_distribution, sample_scenarios, CostDistribution,
    EmpiricalQuantiles, DEFAULT_OWA_TOL, EXACT_LIMIT,
};
pub use weights::{
    bin_integrals, hurwicz_value, make_cvar_weight, make_hurwicz_weight, make_power_weight,
    make_uniform_weight, yager_lambda, yager_value, BinWeights, CumulativeWeight, WeightDensity,
    WeightKind,
};

pub type Interval64 = Interval<f64>;
pub type IntervalInstance64 = IntervalInstance<f64>;
pub type WeightDensity64 = WeightDensity<f64>;
pub type CumulativeWeight64 = CumulativeWeight<f64>;
pub type BinWeights64 = BinWeights<f64>;
pub type CostDistribution64 = CostDistribution<f64>;
pub type ScenarioSample64 = ScenarioSample<f64>;
pub type SolveReport64 = SolveReport<f64>;

pub type Interval32 = Interval<f32>;
pub type IntervalInstance32 = IntervalInstance<f32>;
pub type WeightDensity32 = WeightDensity<f32>;
pub type CumulativeWeight32 = CumulativeWeight<f32>;
pub type BinWeights32 = BinWeights<f32>;
pub type CostDistribution32 = CostDistribution<f32>;
pub type ScenarioSample32 = ScenarioSample<f32>;
pub type SolveReport32 = SolveReport<f32>;
