use crate::error::{OwaError, Result};
use crate::instance::{FeasibleSet, Interval, IntervalInstance, Solution};
use crate::rng::{derive_seed, tags};
use crate::scalar::Scalar;
use crate::var::interval_owa_sampled;
use crate::weights::WeightDensity;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Random instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceType {
    /// Interval spanned by two integers drawn from `{1, …, 11}`.
    I,
    /// Midpoint in `{14, …, 17}` plus or minus a deviation in `{1, …, 11}`.
    II,
}

impl fmt::Display for InstanceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceType::I => "I",
            InstanceType::II => "II",
        })
    }
}

impl FromStr for InstanceType {
    type Err = OwaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "1" | "type1" => Ok(InstanceType::I),
            "II" | "2" | "type2" => Ok(InstanceType::II),
            other => Err(OwaError::Parameter(format!(
                "unknown instance type `{other}` (expected I or II)"
            ))),
        }
    }
}

fn build<F: Scalar>(n: usize, seed: u64, mut draw: impl FnMut(&mut ChaCha8Rng) -> (i64, i64)) -> Result<IntervalInstance<F>> {
    if n == 0 {
        return Err(OwaError::Parameter("instance needs at least one item".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = (0..n)
        .map(|_| {
            let (lo, hi) = draw(&mut rng);
            Interval::new(F::c(lo as f64), F::c(hi as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    IntervalInstance::new(items, FeasibleSet::selection(n, n / 2)?)
}

/// Type I: two independent integers uniform on `{1, …, 11}`; the interval
/// runs from the smaller to the larger. Feasibility defaults to selecting
/// `n / 2` items.
pub fn gen_type1<F: Scalar>(n: usize, seed: u64) -> Result<IntervalInstance<F>> {
    build(n, seed, |rng| {
        let a: i64 = rng.gen_range(1..=11);
        let b: i64 = rng.gen_range(1..=11);
        (a.min(b), a.max(b))
    })
}

/// Type II: midpoint uniform on `{14, …, 17}`, deviation uniform on
/// `{1, …, 11}`, interval `[m - d, m + d]`. Feasibility defaults to
/// selecting `n / 2` items.
pub fn gen_type2<F: Scalar>(n: usize, seed: u64) -> Result<IntervalInstance<F>> {
    build(n, seed, |rng| {
        let m: i64 = rng.gen_range(14..=17);
        let d: i64 = rng.gen_range(1..=11);
        (m - d, m + d)
    })
}

pub fn generate<F: Scalar>(kind: InstanceType, n: usize, seed: u64) -> Result<IntervalInstance<F>> {
    match kind {
        InstanceType::I => gen_type1(n, seed),
        InstanceType::II => gen_type2(n, seed),
    }
}

/// Common evaluation of a final solution: the sampled interval OWA with
/// `K_eval` scenarios drawn from the evaluation stream of `seed`, which is
/// disjoint from the streams the solvers draw from.
pub fn evaluate_final<F: Scalar>(
    instance: &IntervalInstance<F>,
    w: &WeightDensity<F>,
    x: &Solution,
    k_eval: usize,
    seed: u64,
) -> Result<F> {
    if !instance.is_feasible(x)? {
        return Err(OwaError::Validation("solution to evaluate is infeasible".into()));
    }
    interval_owa_sampled(instance, w, x, k_eval, derive_seed(seed, tags::EVAL, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type1_ranges_and_determinism() {
        let a: IntervalInstance<f64> = gen_type1(200, 5).unwrap();
        assert!(a.items().iter().all(|it| it.lo >= 1.0 && it.hi <= 11.0 && it.lo <= it.hi));
        let b: IntervalInstance<f64> = gen_type1(200, 5).unwrap();
        assert_eq!(a.items(), b.items());
        assert_eq!(a.feasibility().n(), 200);
    }

    #[test]
    fn type1_degenerate_fraction() {
        let a: IntervalInstance<f64> = gen_type1(10_000, 99).unwrap();
        let frac = a.items().iter().filter(|it| it.is_degenerate()).count() as f64 / 1e4;
        assert!((frac - 1.0 / 11.0).abs() <= 0.01, "{frac}");
    }

    #[test]
    fn type2_ranges_and_widths() {
        let a: IntervalInstance<f64> = gen_type2(500, 8).unwrap();
        for it in a.items() {
            assert!(it.lo >= 3.0 && it.hi <= 28.0);
            let w = it.width();
            assert!((2.0..=22.0).contains(&w) && w % 2.0 == 0.0);
        }
        let b: IntervalInstance<f64> = gen_type2(500, 8).unwrap();
        assert_eq!(a.items(), b.items());
    }

    #[test]
    fn degenerate_instance_evaluates_to_its_cost() {
        let inst = IntervalInstance::from_bounds(
            &[(2.0, 2.0), (3.5, 3.5), (1.0, 1.0)],
            FeasibleSet::selection(3, 2).unwrap(),
        )
        .unwrap();
        let w = crate::weights::make_power_weight(5.0).unwrap();
        let x = Solution::from_indices(3, &[0, 1]).unwrap();
        assert_eq!(evaluate_final(&inst, &w, &x, 1000, 1).unwrap(), 5.5);
    }
}
