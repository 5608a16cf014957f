//! Problem data: cost intervals, feasible sets and solutions, plus the JSON
//! instance and solution file formats.
//!
//! Item indices are 0-based in the API and 1-based in every file format.

use crate::error::{check_len, OwaError, Result};
use crate::scalar::Scalar;
use itertools::Itertools;
use serde_json::{json, Value};
use std::fmt;
use std::sync::Arc;

/// Cost interval `[lo, hi]` of a single item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Scalar> Interval<F> {
    pub fn new(lo: F, hi: F) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(OwaError::Validation(format!(
                "interval bounds must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo > hi {
            return Err(OwaError::Validation(format!(
                "interval lower bound {lo} exceeds upper bound {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval holding a deterministic cost.
    pub fn point(c: F) -> Self {
        Self { lo: c, hi: c }
    }

    pub fn width(&self) -> F {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> F {
        (self.lo + self.hi) / F::c(2.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

/// Independence test of a matroid over the ground set `0..ground_size()`.
///
/// `set` is always passed sorted ascending without duplicates.
pub trait IndependenceOracle: Send + Sync + fmt::Debug {
    fn ground_size(&self) -> usize;

    fn is_independent(&self, set: &[usize]) -> bool;

    /// Rank of the matroid when the oracle knows it; used to detect oracles
    /// that stall before a basis is reached.
    fn rank(&self) -> Option<usize> {
        None
    }

    /// `Some(rank)` when the oracle is the uniform matroid, so it can be
    /// written back to an instance file.
    fn uniform_rank(&self) -> Option<usize> {
        None
    }
}

/// Uniform matroid: every set of at most `rank` elements is independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformMatroid {
    pub n: usize,
    pub rank: usize,
}

impl IndependenceOracle for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        set.len() <= self.rank && set.iter().all(|&e| e < self.n)
    }

    fn rank(&self) -> Option<usize> {
        Some(self.rank)
    }

    fn uniform_rank(&self) -> Option<usize> {
        Some(self.rank)
    }
}

/// Partition matroid: element `e` lies in block `block_of[e]`, and a set is
/// independent when it takes at most `capacity[b]` elements from block `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMatroid {
    pub block_of: Vec<usize>,
    pub capacity: Vec<usize>,
}

impl IndependenceOracle for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.block_of.len()
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        let mut used = vec![0usize; self.capacity.len()];
        for &e in set {
            let Some(&b) = self.block_of.get(e) else {
                return false;
            };
            used[b] += 1;
            if used[b] > self.capacity[b] {
                return false;
            }
        }
        true
    }

    fn rank(&self) -> Option<usize> {
        let mut sizes = vec![0usize; self.capacity.len()];
        for &b in &self.block_of {
            sizes[b] += 1;
        }
        Some(
            sizes
                .iter()
                .zip(&self.capacity)
                .map(|(s, c)| (*s).min(*c))
                .sum(),
        )
    }
}

/// Feasible solutions `X ⊆ {0,1}^n`.
#[derive(Debug, Clone)]
pub enum FeasibleSet {
    /// Exactly `p` of `n` items.
    Selection { n: usize, p: usize },
    /// Bases of a matroid given by its independence oracle.
    Matroid(Arc<dyn IndependenceOracle>),
    /// An explicitly enumerated list of feasible points.
    Explicit { n: usize, solutions: Vec<Solution> },
}

impl FeasibleSet {
    pub fn selection(n: usize, p: usize) -> Result<Self> {
        if p > n {
            return Err(OwaError::Validation(format!(
                "selection size p = {p} exceeds item count n = {n}"
            )));
        }
        Ok(FeasibleSet::Selection { n, p })
    }

    pub fn uniform_matroid(n: usize, rank: usize) -> Result<Self> {
        if rank > n {
            return Err(OwaError::Validation(format!(
                "matroid rank {rank} exceeds ground set size {n}"
            )));
        }
        Ok(FeasibleSet::Matroid(Arc::new(UniformMatroid { n, rank })))
    }

    pub fn matroid(oracle: impl IndependenceOracle + 'static) -> Self {
        FeasibleSet::Matroid(Arc::new(oracle))
    }

    pub fn explicit(n: usize, solutions: Vec<Solution>) -> Result<Self> {
        if solutions.is_empty() {
            return Err(OwaError::Validation(
                "explicit feasible set must contain at least one solution".into(),
            ));
        }
        for s in &solutions {
            check_len(n, s.len())?;
        }
        Ok(FeasibleSet::Explicit { n, solutions })
    }

    pub fn n(&self) -> usize {
        match self {
            FeasibleSet::Selection { n, .. } | FeasibleSet::Explicit { n, .. } => *n,
            FeasibleSet::Matroid(o) => o.ground_size(),
        }
    }

    pub fn contains(&self, x: &Solution) -> Result<bool> {
        check_len(self.n(), x.len())?;
        Ok(match self {
            FeasibleSet::Selection { p, .. } => x.count() == *p,
            FeasibleSet::Matroid(oracle) => {
                let set = x.indices();
                oracle.is_independent(&set) && is_maximal(oracle.as_ref(), &set)
            }
            FeasibleSet::Explicit { solutions, .. } => solutions.contains(x),
        })
    }

    /// Number of feasible points, saturating at `u128::MAX`.
    pub fn basis_count_bound(&self) -> u128 {
        match self {
            FeasibleSet::Selection { n, p } => binomial(*n, *p),
            FeasibleSet::Matroid(oracle) => {
                binomial(oracle.ground_size(), matroid_rank(oracle.as_ref()))
            }
            FeasibleSet::Explicit { solutions, .. } => solutions.len() as u128,
        }
    }

    /// All feasible points as sorted 0-based index lists, in lexicographic
    /// order of those lists. Fails when more than `cap` candidates would be
    /// enumerated.
    pub fn bases(&self, cap: u128) -> Result<Box<dyn Iterator<Item = Vec<usize>> + '_>> {
        let bound = self.basis_count_bound();
        if bound > cap {
            return Err(OwaError::Capability(format!(
                "{bound} candidate solutions exceed the enumeration cap of {cap}; \
                 use local search or export the MILP instead"
            )));
        }
        Ok(match self {
            FeasibleSet::Selection { n, p } => Box::new((0..*n).combinations(*p)),
            FeasibleSet::Matroid(oracle) => {
                let r = matroid_rank(oracle.as_ref());
                Box::new(
                    (0..oracle.ground_size())
                        .combinations(r)
                        .filter(move |s| oracle.is_independent(s)),
                )
            }
            FeasibleSet::Explicit { solutions, .. } => {
                let mut lists: Vec<Vec<usize>> = solutions.iter().map(|s| s.indices()).collect();
                lists.sort();
                lists.dedup();
                Box::new(lists.into_iter())
            }
        })
    }
}

fn is_maximal(oracle: &dyn IndependenceOracle, set: &[usize]) -> bool {
    let mut probe = Vec::with_capacity(set.len() + 1);
    (0..oracle.ground_size())
        .filter(|e| set.binary_search(e).is_err())
        .all(|e| {
            probe.clear();
            probe.extend_from_slice(set);
            let pos = probe.partition_point(|&v| v < e);
            probe.insert(pos, e);
            !oracle.is_independent(&probe)
        })
}

/// Rank of a matroid, from the oracle when it knows it, otherwise by greedily
/// growing an independent set.
pub(crate) fn matroid_rank(oracle: &dyn IndependenceOracle) -> usize {
    if let Some(r) = oracle.rank() {
        return r;
    }
    let mut set = Vec::new();
    for e in 0..oracle.ground_size() {
        set.push(e);
        if !oracle.is_independent(&set) {
            set.pop();
        }
    }
    set.len()
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Selection bit-vector `x ∈ {0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    selected: Vec<bool>,
}

impl Solution {
    pub fn empty(n: usize) -> Self {
        Self {
            selected: vec![false; n],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { selected: bits }
    }

    /// From 0-based indices.
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut selected = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(OwaError::Validation(format!(
                    "item index {} out of range 1..={n}",
                    i + 1
                )));
            }
            selected[i] = true;
        }
        Ok(Self { selected })
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn count(&self) -> usize {
        self.selected.iter().filter(|b| **b).count()
    }

    pub fn is_selected(&self, i: usize) -> bool {
        self.selected[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.selected[i] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.selected
    }

    /// Sorted 0-based indices of the selected items.
    pub fn indices(&self) -> Vec<usize> {
        self.selected
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i))
            .collect()
    }

    /// `{"selected":[i1,i2,...]}` with 1-based indices.
    pub fn to_json(&self) -> String {
        let one_based: Vec<usize> = self.indices().iter().map(|i| i + 1).collect();
        json!({ "selected": one_based }).to_string()
    }

    pub fn parse_json(text: &str, n: usize) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(json_err)?;
        let list = v
            .get("selected")
            .and_then(Value::as_array)
            .ok_or_else(|| OwaError::Validation("solution needs a `selected` array".into()))?;
        let mut indices = Vec::with_capacity(list.len());
        for item in list {
            let i = item
                .as_u64()
                .filter(|&i| i >= 1)
                .ok_or_else(|| OwaError::Validation(format!("bad item index {item}")))?;
            indices.push(i as usize - 1);
        }
        Self::from_indices(n, &indices)
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.selected {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Item cost intervals together with the feasible set.
#[derive(Debug, Clone)]
pub struct IntervalInstance<F> {
    items: Vec<Interval<F>>,
    feasibility: FeasibleSet,
}

impl<F: Scalar> IntervalInstance<F> {
    pub fn new(items: Vec<Interval<F>>, feasibility: FeasibleSet) -> Result<Self> {
        if items.is_empty() {
            return Err(OwaError::Validation("instance needs at least one item".into()));
        }
        for (i, it) in items.iter().enumerate() {
            if !(it.lo <= it.hi) || !it.lo.is_finite() || !it.hi.is_finite() {
                return Err(OwaError::Validation(format!(
                    "item {}: invalid interval [{}, {}]",
                    i + 1,
                    it.lo,
                    it.hi
                )));
            }
        }
        check_len(items.len(), feasibility.n())?;
        Ok(Self { items, feasibility })
    }

    /// Convenience constructor from `(lo, hi)` pairs.
    pub fn from_bounds(bounds: &[(F, F)], feasibility: FeasibleSet) -> Result<Self> {
        let mut items = Vec::with_capacity(bounds.len());
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            items.push(Interval::new(lo, hi).map_err(|e| {
                OwaError::Validation(format!("item {}: {e}", i + 1))
            })?);
        }
        Self::new(items, feasibility)
    }

    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[Interval<F>] {
        &self.items
    }

    pub fn feasibility(&self) -> &FeasibleSet {
        &self.feasibility
    }

    pub fn with_feasibility(&self, feasibility: FeasibleSet) -> Result<Self> {
        Self::new(self.items.clone(), feasibility)
    }

    pub fn lower_costs(&self) -> Vec<F> {
        self.items.iter().map(|i| i.lo).collect()
    }

    pub fn upper_costs(&self) -> Vec<F> {
        self.items.iter().map(|i| i.hi).collect()
    }

    /// Midpoint scenario `(lo + hi) / 2`.
    pub fn midpoints(&self) -> Vec<F> {
        self.items.iter().map(Interval::midpoint).collect()
    }

    /// Copy with `k` added to every bound.
    pub fn shifted(&self, k: F) -> Self {
        Self {
            items: self
                .items
                .iter()
                .map(|i| Interval {
                    lo: i.lo + k,
                    hi: i.hi + k,
                })
                .collect(),
            feasibility: self.feasibility.clone(),
        }
    }

    pub fn is_feasible(&self, x: &Solution) -> Result<bool> {
        is_feasible(self, x)
    }

    /// Writes the JSON instance format.
    pub fn to_json(&self) -> Result<String> {
        let intervals: Vec<Value> = self
            .items
            .iter()
            .map(|i| Value::Array(vec![number(i.lo.as_f64()), number(i.hi.as_f64())]))
            .collect();
        let feasibility = match &self.feasibility {
            FeasibleSet::Selection { p, .. } => json!({"type": "selection", "p": p}),
            FeasibleSet::Matroid(oracle) => match oracle.uniform_rank() {
                Some(rank) => json!({"type": "uniform_matroid", "rank": rank}),
                None => {
                    return Err(OwaError::Capability(
                        "only uniform matroids can be written to instance files".into(),
                    ))
                }
            },
            FeasibleSet::Explicit { solutions, .. } => {
                let lists: Vec<Vec<usize>> = solutions
                    .iter()
                    .map(|s| s.indices().iter().map(|i| i + 1).collect())
                    .collect();
                json!({"type": "explicit", "solutions": lists})
            }
        };
        let doc = json!({
            "n": self.n(),
            "intervals": intervals,
            "feasibility": feasibility,
        });
        Ok(serde_json::to_string_pretty(&doc).expect("json value serializes"))
    }
}

fn number(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        Value::from(v as i64)
    } else {
        serde_json::Number::from_f64(v)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

fn json_err(e: serde_json::Error) -> OwaError {
    OwaError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses the JSON instance format and validates every invariant.
pub fn parse_instance<F: Scalar>(text: &str) -> Result<IntervalInstance<F>> {
    let doc: Value = serde_json::from_str(text).map_err(json_err)?;
    let field = |name: &str| {
        doc.get(name)
            .ok_or_else(|| OwaError::Validation(format!("missing field `{name}`")))
    };
    let n = field("n")?
        .as_u64()
        .ok_or_else(|| OwaError::Validation("`n` must be a non-negative integer".into()))?
        as usize;
    let raw = field("intervals")?
        .as_array()
        .ok_or_else(|| OwaError::Validation("`intervals` must be an array".into()))?;
    if raw.len() != n {
        return Err(OwaError::Validation(format!(
            "`n` is {n} but {} intervals are listed",
            raw.len()
        )));
    }
    let mut items = Vec::with_capacity(n);
    for (i, pair) in raw.iter().enumerate() {
        let bounds = pair
            .as_array()
            .filter(|a| a.len() == 2)
            .and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)))
            .ok_or_else(|| {
                OwaError::Validation(format!("item {}: expected a [lo, hi] number pair", i + 1))
            })?;
        let (lo, hi) = bounds;
        if lo > hi {
            return Err(OwaError::Validation(format!(
                "item {}: lower bound {lo} exceeds upper bound {hi}",
                i + 1
            )));
        }
        items.push(Interval {
            lo: F::c(lo),
            hi: F::c(hi),
        });
    }
    let feas = field("feasibility")?;
    let count = |name: &str| {
        feas.get(name)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| OwaError::Validation(format!("feasibility needs integer `{name}`")))
    };
    let feasibility = match feas.get("type").and_then(Value::as_str) {
        Some("selection") => FeasibleSet::selection(n, count("p")?)?,
        Some("uniform_matroid") => FeasibleSet::uniform_matroid(n, count("rank")?)?,
        Some("explicit") => {
            let lists = feas
                .get("solutions")
                .and_then(Value::as_array)
                .ok_or_else(|| OwaError::Validation("explicit feasibility needs `solutions`".into()))?;
            let mut solutions = Vec::with_capacity(lists.len());
            for list in lists {
                let idx: Option<Vec<usize>> = list.as_array().and_then(|a| {
                    a.iter()
                        .map(|v| v.as_u64().filter(|&i| i >= 1).map(|i| i as usize - 1))
                        .collect()
                });
                let idx = idx.ok_or_else(|| {
                    OwaError::Validation(format!("bad explicit solution {list}"))
                })?;
                solutions.push(Solution::from_indices(n, &idx)?);
            }
            FeasibleSet::explicit(n, solutions)?
        }
        other => {
            return Err(OwaError::Validation(format!(
                "unknown feasibility type {other:?}"
            )))
        }
    };
    IntervalInstance::new(items, feasibility)
}

pub fn is_feasible<F: Scalar>(instance: &IntervalInstance<F>, x: &Solution) -> Result<bool> {
    instance.feasibility.contains(x)
}

/// Nominal cost `Σ costs_i x_i`, summed in item order.
pub fn deterministic_cost<F: Scalar>(costs: &[F], x: &Solution) -> Result<F> {
    check_len(costs.len(), x.len())?;
    Ok(costs
        .iter()
        .zip(x.bits())
        .filter(|(_, b)| **b)
        .fold(F::zero(), |acc, (c, _)| acc + *c))
}
