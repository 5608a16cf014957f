#![allow(dead_code)]

use interval_owa::{
    make_cvar_weight, make_hurwicz_weight, make_power_weight, make_uniform_weight, FeasibleSet,
    IntervalInstance64, Solution, WeightDensity64,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// Items [1,5], [1,5], [2,10].
pub fn table1(fs: FeasibleSet) -> IntervalInstance64 {
    IntervalInstance64::from_bounds(&[(1.0, 5.0), (1.0, 5.0), (2.0, 10.0)], fs).unwrap()
}

pub fn x1() -> Solution {
    Solution::from_bits(vec![true, true, false])
}

pub fn x2() -> Solution {
    Solution::from_bits(vec![false, false, true])
}

pub fn example_set() -> FeasibleSet {
    FeasibleSet::explicit(3, vec![x1(), x2()]).unwrap()
}

/// Bounds with lower ends in [0, 20] and widths either 0 (with probability
/// `degenerate`) or in [1, 12].
pub fn random_bounds(rng: &mut impl Rng, n: usize, degenerate: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let lo = rng.gen_range(0.0..20.0);
            if rng.gen_bool(degenerate) {
                (lo, lo)
            } else {
                (lo, lo + rng.gen_range(1.0..12.0))
            }
        })
        .collect()
}

pub fn random_instance(rng: &mut impl Rng, n: usize, p: usize) -> IntervalInstance64 {
    IntervalInstance64::from_bounds(&random_bounds(rng, n, 0.15), FeasibleSet::selection(n, p).unwrap()).unwrap()
}

/// A random subset of `{0..n}` with between 1 and `max_m` items.
pub fn random_solution(rng: &mut impl Rng, n: usize, max_m: usize) -> Solution {
    let m = rng.gen_range(1..=max_m.min(n));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut chosen = idx[..m].to_vec();
    chosen.sort_unstable();
    Solution::from_indices(n, &chosen).unwrap()
}

pub fn random_weight(rng: &mut impl Rng) -> WeightDensity64 {
    match rng.gen_range(0..4) {
        0 => make_uniform_weight(),
        1 => make_power_weight(rng.gen_range(1.0..6.0)).unwrap(),
        2 => make_cvar_weight(rng.gen_range(0.05..=1.0)).unwrap(),
        _ => make_hurwicz_weight(rng.gen_range(0.0..=1.0), rng.gen_range(0.01..0.3)).unwrap(),
    }
}

pub fn cost(bounds: &[f64], x: &Solution) -> f64 {
    x.indices().iter().map(|&i| bounds[i]).sum()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
