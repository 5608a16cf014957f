//! Distribution of the total cost `c^T x` when every item cost is uniform on
//! its interval, and the interval OWA objective built on its quantiles.
//!
//! The total is a shifted, scaled Irwin–Hall sum. Its CDF comes from the
//! inclusion–exclusion box-volume formula, with equal widths grouped into
//! binomial multiplicities and evaluation reflected onto the lower half of
//! the (symmetric) support to limit cancellation.

use crate::discrete::{ordered_weighted_sum, ScenarioSample};
use crate::error::{check_len, OwaError, Result};
use crate::instance::{IntervalInstance, Solution};
use crate::quadrature::adaptive_simpson_panels;
use crate::rng::{unit_f64, ScenarioStreams};
use crate::scalar::{cmp_scalar, CompensatedSum, Scalar};
use crate::weights::{bin_integrals, WeightDensity};
use rayon::prelude::*;

/// Largest number of non-degenerate selected items the exact engine accepts.
pub const EXACT_LIMIT: usize = 18;

/// Default relative tolerance of [`interval_owa_exact`].
pub const DEFAULT_OWA_TOL: f64 = 1e-6;

/// Relative bisection tolerance of [`exact_var`].
pub const VAR_TOL: f64 = 1e-10;

/// Above this many distinct subset sums the CDF knots are not used as
/// quadrature panel edges.
const KNOT_LIMIT: usize = 512;

/// Law of `Σ c_i x_i` for independent `c_i ~ U[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostDistribution<F> {
    shift: F,
    const_total: F,
    widths: Vec<F>,
    groups: Vec<(F, usize)>,
    total_width: F,
}

impl<F: Scalar> CostDistribution<F> {
    /// From the selected intervals as `(lo, hi)` pairs.
    pub fn from_intervals(bounds: impl IntoIterator<Item = (F, F)>) -> Self {
        let mut shift = F::zero();
        let mut const_total = F::zero();
        let mut widths = Vec::new();
        for (lo, hi) in bounds {
            if lo == hi {
                const_total = const_total + lo;
            } else {
                shift = shift + lo;
                widths.push(hi - lo);
            }
        }
        widths.sort_by(cmp_scalar);
        let mut groups: Vec<(F, usize)> = Vec::new();
        for &d in &widths {
            match groups.last_mut() {
                Some((w, c)) if *w == d => *c += 1,
                _ => groups.push((d, 1)),
            }
        }
        let total_width = widths.iter().fold(F::zero(), |a, &d| a + d);
        Self {
            shift,
            const_total,
            widths,
            groups,
            total_width,
        }
    }

    /// `Σ lo_i` over selected non-degenerate items.
    pub fn shift(&self) -> F {
        self.shift
    }

    /// Sum of the selected degenerate costs.
    pub fn const_total(&self) -> F {
        self.const_total
    }

    /// Widths of the non-degenerate selected items, ascending.
    pub fn widths(&self) -> &[F] {
        &self.widths
    }

    pub fn m(&self) -> usize {
        self.widths.len()
    }

    pub fn lower(&self) -> F {
        self.shift + self.const_total
    }

    pub fn upper(&self) -> F {
        self.lower() + self.total_width
    }

    pub fn mean(&self) -> F {
        self.lower() + self.total_width / F::c(2.0)
    }

    pub fn is_point_mass(&self) -> bool {
        self.widths.is_empty()
    }

    fn ensure_exact(&self) -> Result<()> {
        if self.m() > EXACT_LIMIT {
            return Err(OwaError::Capability(format!(
                "{} uncertain selected items exceed the exact limit of {EXACT_LIMIT}; \
                 use the sampled evaluator",
                self.m()
            )));
        }
        Ok(())
    }

    /// `P(sum ≤ lower + s)` for `0 < s ≤ total/2` by inclusion–exclusion.
    fn lower_half_cdf(&self, s: F) -> F {
        let mut acc = CompensatedSum::new();
        self.accumulate(0, F::zero(), F::one(), false, s, &mut acc);
        acc.total()
    }

    /// Walks every multiset `(j_1..j_r)`, `0 ≤ j_g ≤ mult_g`, pruning once
    /// the partial width sum reaches `s` (all further terms vanish).
    fn accumulate(
        &self,
        g: usize,
        offset: F,
        coef: F,
        negative: bool,
        s: F,
        acc: &mut CompensatedSum<F>,
    ) {
        if offset >= s {
            return;
        }
        if g == self.groups.len() {
            // r^m / (m! Π d_i), multiplied out factor by factor
            let r = s - offset;
            let mut term = coef;
            for (i, d) in self.widths.iter().enumerate() {
                term = term * r / (F::from_usize_lossy(i + 1) * *d);
            }
            acc.add(if negative { -term } else { term });
            return;
        }
        let (d, mult) = self.groups[g];
        let mut binom = F::one();
        for j in 0..=mult {
            let off = offset + d * F::from_usize_lossy(j);
            if off >= s {
                break;
            }
            self.accumulate(g + 1, off, coef * binom, negative ^ (j % 2 == 1), s, acc);
            binom = binom * F::from_usize_lossy(mult - j) / F::from_usize_lossy(j + 1);
        }
    }

    /// Sorted distinct values `lower + Σ_{i∈S} d_i`, where the CDF changes
    /// polynomial piece. `None` when there are too many.
    pub fn knots(&self) -> Option<Vec<F>> {
        let combos = self
            .groups
            .iter()
            .try_fold(1usize, |acc, (_, c)| acc.checked_mul(c + 1))?;
        if combos > 64 * KNOT_LIMIT {
            return None;
        }
        let mut sums = vec![F::zero()];
        for &(d, mult) in &self.groups {
            let mut next = Vec::with_capacity(sums.len() * (mult + 1));
            for &base in &sums {
                for j in 0..=mult {
                    next.push(base + d * F::from_usize_lossy(j));
                }
            }
            sums = next;
        }
        sums.sort_by(cmp_scalar);
        sums.dedup();
        if sums.len() > KNOT_LIMIT {
            return None;
        }
        let lower = self.lower();
        Some(sums.into_iter().map(|s| lower + s).collect())
    }
}

/// Distribution of `c^T x` for the given solution.
pub fn build_distribution<F: Scalar>(
    instance: &IntervalInstance<F>,
    x: &Solution,
) -> Result<CostDistribution<F>> {
    check_len(instance.n(), x.len())?;
    Ok(CostDistribution::from_intervals(
        instance
            .items()
            .iter()
            .zip(x.bits())
            .filter(|(_, b)| **b)
            .map(|(i, _)| (i.lo, i.hi)),
    ))
}

/// `P(c^T x ≤ y)`.
pub fn exact_cdf<F: Scalar>(dist: &CostDistribution<F>, y: F) -> Result<F> {
    dist.ensure_exact()?;
    let lower = dist.lower();
    if dist.is_point_mass() {
        return Ok(if y >= lower { F::one() } else { F::zero() });
    }
    let s = y - lower;
    let total = dist.total_width;
    if s <= F::zero() {
        return Ok(F::zero());
    }
    if s >= total {
        return Ok(F::one());
    }
    let half = total / F::c(2.0);
    let p = if s <= half {
        dist.lower_half_cdf(s)
    } else {
        F::one() - dist.lower_half_cdf(total - s)
    };
    Ok(p.max(F::zero()).min(F::one()))
}

/// Value-at-Risk `inf{y : F(y) ≥ t}`; `t = 0` maps to the lower support
/// bound. Bisection to `VAR_TOL · max(1, upper - lower)`.
pub fn exact_var<F: Scalar>(dist: &CostDistribution<F>, t: F) -> Result<F> {
    if !(t >= F::zero() && t <= F::one()) {
        return Err(OwaError::Parameter(format!("probability {t} outside [0, 1]")));
    }
    dist.ensure_exact()?;
    let (lower, upper) = (dist.lower(), dist.upper());
    if dist.is_point_mass() || t == F::zero() {
        return Ok(lower);
    }
    if t == F::one() {
        return Ok(upper);
    }
    let tol = F::c(VAR_TOL) * (upper - lower).max(F::one());
    let (mut lo, mut hi) = (lower, upper);
    while hi - lo > tol {
        let mid = lo + (hi - lo) / F::c(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if exact_cdf(dist, mid)? >= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo + (hi - lo) / F::c(2.0))
}

/// Interval OWA `∫_0^1 w(t) VaR_{1-t}(c^T x) dt` on an explicit distribution.
///
/// Substituting `y = VaR_{1-t}` and integrating by parts turns the quantile
/// integral into `lower + ∫_lower^upper W(1 - F(y)) dy`, where `W` is the
/// antiderivative of `w`. The integrand needs only CDF values, is continuous
/// and is smooth between CDF knots and the points where `1 - F(y)` crosses a
/// weight breakpoint, so those are used as panel edges for adaptive Simpson.
/// `tol` is relative to `max(1, |upper|)`.
pub fn owa_of_distribution<F: Scalar>(
    dist: &CostDistribution<F>,
    w: &WeightDensity<F>,
    tol: F,
) -> Result<F> {
    dist.ensure_exact()?;
    let lower = dist.lower();
    if dist.is_point_mass() {
        return Ok(lower);
    }
    let upper = dist.upper();
    let mut edges = dist.knots().unwrap_or_default();
    for b in w.breakpoints() {
        edges.push(exact_var(dist, F::one() - b)?);
    }
    let abs_tol = tol * upper.abs().max(lower.abs()).max(F::one());
    let mut failure = None;
    let area = adaptive_simpson_panels(
        &mut |y| match exact_cdf(dist, y) {
            Ok(p) => w.antiderivative(F::one() - p),
            Err(e) => {
                failure.get_or_insert(e);
                F::zero()
            }
        },
        lower,
        upper,
        &edges,
        abs_tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(lower + area)
}

/// Interval OWA value of `x`, exact up to quadrature tolerance `tol`.
pub fn interval_owa_exact<F: Scalar>(
    instance: &IntervalInstance<F>,
    w: &WeightDensity<F>,
    x: &Solution,
    tol: F,
) -> Result<F> {
    owa_of_distribution(&build_distribution(instance, x)?, w, tol)
}

/// The defining quantile integral evaluated literally: adaptive Simpson on
/// `w(t) · VaR_{1-t}` over `[0, 1]`, split at the weight breakpoints, with
/// every VaR value obtained by bisection. Slower and less accurate near the
/// endpoints than [`owa_of_distribution`]; kept as an independent route.
pub fn owa_by_quantile_integral<F: Scalar>(
    dist: &CostDistribution<F>,
    w: &WeightDensity<F>,
    tol: F,
) -> Result<F> {
    dist.ensure_exact()?;
    if dist.is_point_mass() {
        return Ok(dist.lower());
    }
    let mut failure = None;
    let v = adaptive_simpson_panels(
        &mut |t| {
            let wt = w.evaluate(t);
            if wt == F::zero() {
                return F::zero();
            }
            match exact_var(dist, F::one() - t) {
                Ok(q) => wt * q,
                Err(e) => {
                    failure.get_or_insert(e);
                    F::zero()
                }
            }
        },
        F::zero(),
        F::one(),
        &w.breakpoints(),
        tol * dist.upper().abs().max(F::one()),
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

#[inline]
fn draw<F: Scalar>(lo: F, hi: F, u: f64) -> F {
    if lo == hi {
        lo
    } else {
        (lo + (hi - lo) * F::c(u)).min(hi)
    }
}

/// `K` independent uniform scenarios. Scenario `j`, item `i` is the `i`-th
/// draw of key stream `j` under `seed`; the sample carries uniform bin
/// weights until [`ScenarioSample::with_density`] is applied.
pub fn sample_scenarios<F: Scalar>(
    instance: &IntervalInstance<F>,
    k: usize,
    seed: u64,
) -> Result<ScenarioSample<F>> {
    if k == 0 {
        return Err(OwaError::Parameter("sample size K must be at least 1".into()));
    }
    let n = instance.n();
    let items = instance.items();
    let streams = ScenarioStreams::new(seed);
    let mut flat = vec![F::zero(); k * n];
    flat.par_chunks_mut(n)
        .enumerate()
        .for_each(|(j, row)| {
            let mut rng = streams.scenario(j as u64);
            for (c, it) in row.iter_mut().zip(items) {
                *c = draw(it.lo, it.hi, unit_f64(&mut rng));
            }
        });
    ScenarioSample::from_flat(n, flat, bin_integrals(&crate::weights::make_uniform_weight(), k)?, Some(seed))
}

/// Scenario totals `c^j · x`, `j = 0..K`, with the same draws as
/// [`sample_scenarios`] but without materialising the sample.
fn sampled_totals<F: Scalar>(
    instance: &IntervalInstance<F>,
    x: &Solution,
    k: usize,
    seed: u64,
) -> Vec<F> {
    let items = instance.items();
    let bits = x.bits();
    let streams = ScenarioStreams::new(seed);
    (0..k)
        .into_par_iter()
        .map(|j| {
            let mut rng = streams.scenario(j as u64);
            let mut total = F::zero();
            for (it, &b) in items.iter().zip(bits) {
                let u = unit_f64(&mut rng);
                if b {
                    total = total + draw(it.lo, it.hi, u);
                }
            }
            total
        })
        .collect()
}

/// Discrete OWA of `x` over `K` sampled scenarios with bin weights of `w`.
pub fn interval_owa_sampled<F: Scalar>(
    instance: &IntervalInstance<F>,
    w: &WeightDensity<F>,
    x: &Solution,
    k: usize,
    seed: u64,
) -> Result<F> {
    check_len(instance.n(), x.len())?;
    let weights = bin_integrals(w, k)?;
    let mut totals = sampled_totals(instance, x, k, seed);
    totals.par_sort_unstable_by(|a, b| cmp_scalar(b, a));
    Ok(ordered_weighted_sum(&totals, weights.values()))
}

/// Sorted sample of `c^T x` defining the empirical quantile function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalQuantiles<F> {
    pub sorted_values: Vec<F>,
    pub seed: u64,
    pub k: usize,
}

impl<F: Scalar> EmpiricalQuantiles<F> {
    pub fn sample(instance: &IntervalInstance<F>, x: &Solution, k: usize, seed: u64) -> Result<Self> {
        check_len(instance.n(), x.len())?;
        if k == 0 {
            return Err(OwaError::Parameter("sample size K must be at least 1".into()));
        }
        let mut sorted_values = sampled_totals(instance, x, k, seed);
        sorted_values.par_sort_unstable_by(cmp_scalar);
        Ok(Self { sorted_values, seed, k })
    }

    /// Sample VaR: the `⌈tK⌉`-th smallest value (the minimum at `t = 0`).
    pub fn var(&self, t: F) -> F {
        let kf = F::from_usize_lossy(self.k);
        let idx = (t * kf).ceil().to_usize().unwrap_or(0).max(1).min(self.k);
        self.sorted_values[idx - 1]
    }

    /// Empirical CDF.
    pub fn cdf(&self, y: F) -> F {
        let count = self.sorted_values.partition_point(|v| *v <= y);
        F::from_usize_lossy(count) / F::from_usize_lossy(self.k)
    }
}
