//! Discrete-scenario OWA: rank-weighted aggregation of scenario costs, an
//! enumeration solver and a swap local search.

use crate::error::{check_len, OwaError, Result};
use crate::instance::{FeasibleSet, Solution};
use crate::report::SolveReport;
use crate::scalar::{cmp_scalar, Scalar};
use crate::weights::{bin_integrals, BinWeights, WeightDensity};
use rayon::prelude::*;
use std::time::Instant;

/// Largest number of candidate solutions the enumeration solver visits.
pub const ENUMERATION_CAP: u128 = 2_000_000;

const ENUMERATION_CHUNK: usize = 4096;

/// `K` scenario cost vectors over `n` items plus rank weights `w'`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSample<F> {
    n: usize,
    costs: Vec<F>,
    weights: BinWeights<F>,
    seed: Option<u64>,
}

impl<F: Scalar> ScenarioSample<F> {
    pub fn new(scenarios: Vec<Vec<F>>, weights: BinWeights<F>) -> Result<Self> {
        let n = scenarios.first().map(Vec::len).ok_or_else(|| {
            OwaError::Parameter("scenario sample must contain at least one scenario".into())
        })?;
        for s in &scenarios {
            check_len(n, s.len())?;
        }
        Self::from_flat(n, scenarios.concat(), weights, None)
    }

    /// Row-major `K × n` costs.
    pub fn from_flat(n: usize, costs: Vec<F>, weights: BinWeights<F>, seed: Option<u64>) -> Result<Self> {
        if n == 0 || !costs.len().is_multiple_of(n) {
            return Err(OwaError::Parameter(format!(
                "{} cost entries do not form rows of length {n}",
                costs.len()
            )));
        }
        check_len(costs.len() / n, weights.len())?;
        Ok(Self {
            n,
            costs,
            weights,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.costs.len() / self.n
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn scenario(&self, j: usize) -> &[F] {
        &self.costs[j * self.n..(j + 1) * self.n]
    }

    pub fn weights(&self) -> &BinWeights<F> {
        &self.weights
    }

    pub fn with_weights(mut self, weights: BinWeights<F>) -> Result<Self> {
        check_len(self.k(), weights.len())?;
        self.weights = weights;
        Ok(self)
    }

    /// Attaches `w'_k = ∫_{(k-1)/K}^{k/K} w`.
    pub fn with_density(self, w: &WeightDensity<F>) -> Result<Self> {
        let b = bin_integrals(w, self.k())?;
        self.with_weights(b)
    }

    /// `a_j = (c^j)^T x` for a sorted index list, summed in index order.
    pub fn totals_for_indices(&self, indices: &[usize]) -> Vec<F> {
        self.costs
            .chunks_exact(self.n)
            .map(|row| indices.iter().fold(F::zero(), |acc, &i| acc + row[i]))
            .collect()
    }

    /// Discrete OWA of the items in `indices` (sorted ascending).
    pub fn value_of_indices(&self, indices: &[usize]) -> F {
        let mut a = self.totals_for_indices(indices);
        sort_descending(&mut a);
        ordered_weighted_sum(&a, self.weights.values())
    }
}

/// Stable descending sort; equal totals keep scenario order.
pub(crate) fn sort_descending<F: Scalar>(a: &mut [F]) {
    a.sort_by(|p, q| cmp_scalar(q, p));
}

/// `Σ_k w_k a_k` for normalized weights, accumulated in rank order as
/// `a_min + Σ_k w_k (a_k - a_min)`, so equal values come back exactly.
pub(crate) fn ordered_weighted_sum<F: Scalar>(sorted: &[F], weights: &[F]) -> F {
    let Some(&base) = sorted.last() else {
        return F::zero();
    };
    base + sorted
        .iter()
        .zip(weights)
        .fold(F::zero(), |acc, (a, w)| acc + *w * (*a - base))
}

/// `OWA^d(x) = Σ_k w'_k a_(k)` with `a_(1) ≥ a_(2) ≥ …`.
pub fn discrete_owa_value<F: Scalar>(sample: &ScenarioSample<F>, x: &Solution) -> Result<F> {
    check_len(sample.n(), x.len())?;
    Ok(sample.value_of_indices(&x.indices()))
}

/// Minimizes the discrete OWA over every feasible point. Ties go to the
/// lexicographically smallest list of selected indices.
pub fn solve_discrete_owa_exact<F: Scalar>(
    sample: &ScenarioSample<F>,
    feasibility: &FeasibleSet,
) -> Result<SolveReport<F>> {
    check_len(sample.n(), feasibility.n())?;
    let start = Instant::now();
    let mut bases = feasibility.bases(ENUMERATION_CAP)?;
    let mut best: Option<(F, Vec<usize>)> = None;
    let mut visited = 0usize;
    loop {
        let chunk: Vec<Vec<usize>> = bases.by_ref().take(ENUMERATION_CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        visited += chunk.len();
        let local = chunk
            .par_iter()
            .enumerate()
            .map(|(pos, idx)| (sample.value_of_indices(idx), pos))
            .reduce_with(|a, b| match cmp_scalar(&a.0, &b.0) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => {
                    if a.1 <= b.1 {
                        a
                    } else {
                        b
                    }
                }
            });
        if let Some((v, pos)) = local {
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, chunk[pos].clone()));
            }
        }
    }
    let (value, idx) = best.ok_or_else(|| {
        OwaError::Validation("feasible set has no solutions to enumerate".into())
    })?;
    let mut report = SolveReport::new(
        "discrete-exact",
        Solution::from_indices(sample.n(), &idx)?,
        value,
    )
    .param("enumerated", visited);
    report.k = Some(sample.k());
    report.seed = sample.seed();
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

fn swap_is_feasible(feasibility: &FeasibleSet, candidate: &[usize], n: usize) -> Result<bool> {
    Ok(match feasibility {
        FeasibleSet::Selection { .. } => true,
        FeasibleSet::Matroid(oracle) => oracle.is_independent(candidate),
        FeasibleSet::Explicit { .. } => {
            feasibility.contains(&Solution::from_indices(n, candidate)?)?
        }
    })
}

/// First-improvement swap search: drop one selected item, add one
/// unselected item, scanning removals then additions in ascending index
/// order and restarting after every accepted move. At most `max_iters`
/// moves are accepted.
pub fn local_search_discrete_owa<F: Scalar>(
    sample: &ScenarioSample<F>,
    feasibility: &FeasibleSet,
    start: &Solution,
    max_iters: usize,
) -> Result<SolveReport<F>> {
    check_len(sample.n(), start.len())?;
    if !feasibility.contains(start)? {
        return Err(OwaError::Validation(
            "local search start solution is infeasible".into(),
        ));
    }
    let clock = Instant::now();
    let n = sample.n();
    let mut current = start.indices();
    let mut value = sample.value_of_indices(&current);
    let mut moves = 0usize;
    let mut local_optimum = false;
    let mut candidate = Vec::with_capacity(current.len());
    'outer: while moves < max_iters {
        for r in 0..current.len() {
            for add in 0..n {
                if current.binary_search(&add).is_ok() {
                    continue;
                }
                candidate.clear();
                candidate.extend(current.iter().copied().filter(|&e| e != current[r]));
                let pos = candidate.partition_point(|&e| e < add);
                candidate.insert(pos, add);
                if !swap_is_feasible(feasibility, &candidate, n)? {
                    continue;
                }
                let v = sample.value_of_indices(&candidate);
                if v < value {
                    std::mem::swap(&mut current, &mut candidate);
                    value = v;
                    moves += 1;
                    continue 'outer;
                }
            }
        }
        local_optimum = true;
        break;
    }
    let mut report = SolveReport::new("discrete-local", Solution::from_indices(n, &current)?, value)
        .param("moves", moves)
        .param("local_optimum", local_optimum);
    report.k = Some(sample.k());
    report.seed = sample.seed();
    report.wall_time = clock.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn weights(v: &[f64]) -> BinWeights<f64> {
        BinWeights::from_values(v.to_vec()).unwrap()
    }

    /// Maximum over all rank assignments of Σ w_k a_{σ(k)}: for nonincreasing
    /// weights the sorted pairing attains it (rearrangement inequality).
    fn permutation_oracle(a: &[f64], w: &[f64]) -> f64 {
        (0..a.len())
            .permutations(a.len())
            .map(|p| p.iter().zip(w).map(|(&i, wk)| wk * a[i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn robust_weights_pick_the_worst_scenario() {
        let s = ScenarioSample::new(
            vec![vec![1.0, 4.0], vec![3.0, 0.5], vec![2.0, 2.0]],
            weights(&[1.0, 0.0, 0.0]),
        )
        .unwrap();
        let x = Solution::from_bits(vec![true, true]);
        assert_eq!(discrete_owa_value(&s, &x).unwrap(), 5.0);
    }

    #[test]
    fn sort_and_dot_matches_permutation_oracle() {
        let w = [0.5, 0.3, 0.2];
        let s = ScenarioSample::new(vec![vec![3.0], vec![1.0], vec![2.0]], weights(&w)).unwrap();
        let v = discrete_owa_value(&s, &Solution::from_bits(vec![true])).unwrap();
        assert!((v - 2.3).abs() < 1e-12);
        assert!((permutation_oracle(&[3.0, 1.0, 2.0], &w) - 2.3).abs() < 1e-12);
    }

    #[test]
    fn identical_scenarios_give_nominal_cost() {
        let s = ScenarioSample::new(vec![vec![2.0, 5.0]; 4], weights(&[0.7, 0.1, 0.1, 0.1])).unwrap();
        let x = Solution::from_bits(vec![true, true]);
        assert_eq!(discrete_owa_value(&s, &x).unwrap(), 7.0);
    }

    #[test]
    fn exact_prefers_smallest_index_on_ties() {
        let s = ScenarioSample::new(vec![vec![3.0, 3.0, 6.0]], weights(&[1.0])).unwrap();
        let fs = FeasibleSet::selection(3, 1).unwrap();
        let r = solve_discrete_owa_exact(&s, &fs).unwrap();
        assert_eq!(r.solution.indices(), vec![0]);
        assert_eq!(r.reported_objective, 3.0);
    }

    #[test]
    fn local_search_edge_cases() {
        let s = ScenarioSample::new(
            vec![vec![1.0, 5.0, 2.0, 4.0], vec![2.0, 1.0, 6.0, 3.0]],
            weights(&[0.6, 0.4]),
        )
        .unwrap();
        let fs = FeasibleSet::selection(4, 2).unwrap();
        let start = Solution::from_indices(4, &[1, 2]).unwrap();
        let r = local_search_discrete_owa(&s, &fs, &start, 0).unwrap();
        assert_eq!(r.solution, start);
        let best = solve_discrete_owa_exact(&s, &fs).unwrap();
        let again = local_search_discrete_owa(&s, &fs, &best.solution, 100).unwrap();
        assert_eq!(again.solution, best.solution);
        assert_eq!(again.reported_objective, best.reported_objective);
        let bad = Solution::from_indices(4, &[1]).unwrap();
        assert!(local_search_discrete_owa(&s, &fs, &bad, 10).is_err());
    }
}
