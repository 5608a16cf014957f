//! Solution methods: sampling (discrete OWA on a sample), greedy over a
//! matroid, and the Yager and midpoint baselines.

use crate::discrete::{local_search_discrete_owa, solve_discrete_owa_exact, ENUMERATION_CAP};
use crate::error::{check_len, OwaError, Result};
use crate::instance::{matroid_rank, FeasibleSet, IntervalInstance, Solution};
use crate::report::SolveReport;
use crate::scalar::{cmp_scalar, Scalar};
use crate::var::sample_scenarios;
use crate::weights::{yager_lambda, yager_value, CumulativeWeight, WeightDensity};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// Move budget for the local-search inner solver.
pub const LOCAL_SEARCH_MAX_ITERS: usize = 10_000;

/// Minimizer of the discrete problem inside the sampling method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    Exact,
    Local,
}

impl fmt::Display for InnerSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InnerSolver::Exact => "exact",
            InnerSolver::Local => "local",
        })
    }
}

impl FromStr for InnerSolver {
    type Err = OwaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(InnerSolver::Exact),
            "local" => Ok(InnerSolver::Local),
            other => Err(OwaError::Parameter(format!(
                "unknown inner solver `{other}` (expected exact or local)"
            ))),
        }
    }
}

fn ascending_by_cost<F: Scalar>(costs: &[F]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..costs.len()).collect();
    // stable: equal costs stay in index order
    order.sort_by(|&a, &b| cmp_scalar(&costs[a], &costs[b]));
    order
}

/// Minimizes `Σ costs_i x_i` over the feasible set. Ties go to the smallest
/// indices (selection, matroid) or the lexicographically smallest index list
/// (explicit sets).
pub fn solve_nominal<F: Scalar>(feasibility: &FeasibleSet, costs: &[F]) -> Result<Solution> {
    check_len(feasibility.n(), costs.len())?;
    let n = costs.len();
    match feasibility {
        FeasibleSet::Selection { p, .. } => {
            let mut idx: Vec<usize> = ascending_by_cost(costs).into_iter().take(*p).collect();
            idx.sort_unstable();
            Solution::from_indices(n, &idx)
        }
        FeasibleSet::Matroid(oracle) => {
            let mut set: Vec<usize> = Vec::new();
            let mut probe = Vec::new();
            for e in ascending_by_cost(costs) {
                probe.clear();
                probe.extend_from_slice(&set);
                let pos = probe.partition_point(|&v| v < e);
                probe.insert(pos, e);
                if oracle.is_independent(&probe) {
                    std::mem::swap(&mut set, &mut probe);
                }
            }
            Solution::from_indices(n, &set)
        }
        FeasibleSet::Explicit { .. } => {
            let mut best: Option<(F, Vec<usize>)> = None;
            for idx in feasibility.bases(ENUMERATION_CAP)? {
                let v = idx.iter().fold(F::zero(), |acc, &i| acc + costs[i]);
                if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                    best = Some((v, idx));
                }
            }
            let (_, idx) = best.expect("explicit feasible sets are nonempty");
            Solution::from_indices(n, &idx)
        }
    }
}

fn linear_cost<F: Scalar>(costs: &[F], x: &Solution) -> F {
    x.indices().iter().fold(F::zero(), |acc, &i| acc + costs[i])
}

/// Draws `K` scenarios, attaches the bin weights of `w` and minimizes the
/// discrete OWA with the chosen inner solver. The local inner solver starts
/// from the midpoint solution.
pub fn solve_sampling<F: Scalar>(
    instance: &IntervalInstance<F>,
    w: &WeightDensity<F>,
    k: usize,
    seed: u64,
    inner: InnerSolver,
) -> Result<SolveReport<F>> {
    let clock = Instant::now();
    let sample = sample_scenarios(instance, k, seed)?.with_density(w)?;
    let fs = instance.feasibility();
    let mut report = match inner {
        InnerSolver::Exact => solve_discrete_owa_exact(&sample, fs)?,
        InnerSolver::Local => {
            let start = solve_nominal(fs, &instance.midpoints())?;
            local_search_discrete_owa(&sample, fs, &start, LOCAL_SEARCH_MAX_ITERS)?
        }
    };
    report.solver = "sampling".into();
    report.k = Some(k);
    report.seed = Some(seed);
    report.wall_time = clock.elapsed().as_secs_f64();
    report
        .params
        .insert(0, ("inner".into(), inner.to_string()));
    report.params.push(("weight".into(), w.to_string()));
    Ok(report)
}

type IndependenceTest<'a> = Box<dyn Fn(&[usize]) -> bool + 'a>;

/// Greedy construction over a matroid on one scenario sample: starting from
/// the empty set, repeatedly add the element that keeps independence and
/// gives the smallest discrete OWA of the partial set, until a basis is
/// reached. Selection feasibility is the uniform matroid of rank `p`.
pub fn solve_greedy_matroid<F: Scalar>(
    instance: &IntervalInstance<F>,
    w: &WeightDensity<F>,
    k: usize,
    seed: u64,
) -> Result<SolveReport<F>> {
    let clock = Instant::now();
    let n = instance.n();
    let (independent, rank): (IndependenceTest<'_>, Option<usize>) =
        match instance.feasibility() {
            FeasibleSet::Selection { p, .. } => {
                let p = *p;
                (Box::new(move |s: &[usize]| s.len() <= p), Some(p))
            }
            FeasibleSet::Matroid(oracle) => {
                let known = oracle.rank().or_else(|| oracle.uniform_rank());
                (Box::new(move |s: &[usize]| oracle.is_independent(s)), known)
            }
            FeasibleSet::Explicit { .. } => {
                return Err(OwaError::Capability(
                    "the greedy method needs a matroid or selection feasible set".into(),
                ))
            }
        };
    if !independent(&[]) {
        return Err(OwaError::MatroidViolation(
            "independence oracle rejects the empty set".into(),
        ));
    }
    let sample = sample_scenarios(instance, k, seed)?.with_density(w)?;
    let mut set: Vec<usize> = Vec::new();
    let mut candidate = Vec::with_capacity(n);
    let mut value = F::zero();
    loop {
        let mut best: Option<(F, usize)> = None;
        for e in (0..n).filter(|e| set.binary_search(e).is_err()) {
            candidate.clear();
            candidate.extend_from_slice(&set);
            let pos = candidate.partition_point(|&v| v < e);
            candidate.insert(pos, e);
            if !independent(&candidate) {
                continue;
            }
            let v = sample.value_of_indices(&candidate);
            if best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, e));
            }
        }
        match best {
            Some((v, e)) => {
                let pos = set.partition_point(|&x| x < e);
                set.insert(pos, e);
                value = v;
            }
            None => break,
        }
    }
    if let Some(r) = rank {
        if set.len() != r {
            return Err(OwaError::MatroidViolation(format!(
                "greedy stalled at {} elements but the rank is {r}",
                set.len()
            )));
        }
    }
    if set.is_empty() {
        value = sample.value_of_indices(&set);
    }
    let mut report = SolveReport::new("greedy", Solution::from_indices(n, &set)?, value)
        .param("weight", w);
    report.k = Some(k);
    report.seed = Some(seed);
    report.wall_time = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Yager baseline: minimizes `λ Σ hi_i x_i + (1-λ) Σ lo_i x_i`, which is
/// linear in `x`, and reports that value.
pub fn solve_yager<F: Scalar>(
    instance: &IntervalInstance<F>,
    cumulative: &CumulativeWeight<F>,
    quad_tol: F,
) -> Result<SolveReport<F>> {
    let clock = Instant::now();
    let lambda = yager_lambda(cumulative, quad_tol)?;
    let costs: Vec<F> = instance
        .items()
        .iter()
        .map(|it| lambda * it.hi + (F::one() - lambda) * it.lo)
        .collect();
    let x = solve_nominal(instance.feasibility(), &costs)?;
    let value = yager_value(
        lambda,
        linear_cost(&instance.lower_costs(), &x),
        linear_cost(&instance.upper_costs(), &x),
    );
    let mut report = SolveReport::new("yager", x, value)
        .param("W", cumulative.name())
        .param("lambda", lambda);
    report.wall_time = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Midpoint baseline: minimizes `Σ ĉ_i x_i` with `ĉ = (lo + hi) / 2`.
pub fn solve_midpoint<F: Scalar>(instance: &IntervalInstance<F>) -> Result<SolveReport<F>> {
    let clock = Instant::now();
    let mid = instance.midpoints();
    let x = solve_nominal(instance.feasibility(), &mid)?;
    let value = linear_cost(&mid, &x);
    let mut report = SolveReport::new("midpoint", x, value);
    report.wall_time = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// Rank used by the greedy method, if the feasible set is a matroid.
pub fn matroid_rank_of(feasibility: &FeasibleSet) -> Option<usize> {
    match feasibility {
        FeasibleSet::Selection { p, .. } => Some(*p),
        FeasibleSet::Matroid(o) => Some(matroid_rank(o.as_ref())),
        FeasibleSet::Explicit { .. } => None,
    }
}
