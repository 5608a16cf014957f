//! Preference weights.
//!
//! Two representations are kept apart on purpose. [`WeightDensity`] is a
//! bounded, normalized density `w` on `[0, 1]` that weights the quantile
//! curve (`t = 0` is the worst outcome). [`CumulativeWeight`] is the monotone
//! quantifier `W` with `W(0) = 0`, `W(1) = 1` that the bounds-only aggregation
//! consumes, and from which its mixing coefficient `λ = ∫ W` is derived.

use crate::error::{OwaError, Result};
use crate::quadrature::{adaptive_simpson, adaptive_simpson_panels};
use crate::scalar::{CompensatedSum, Scalar};
use std::fmt;
use std::sync::Arc;

/// Normalization tolerance for densities with closed-form antiderivatives.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Tolerance of the tabulated antiderivative built for custom densities.
pub const CUSTOM_QUAD_TOL: f64 = 1e-10;

const CUSTOM_TABLE_PANELS: usize = 256;

type ScalarFn<F> = Arc<dyn Fn(F) -> F + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind<F> {
    /// `α (1 - t)^(α - 1)`, `α ≥ 1`.
    Power(F),
    /// `1/α` on `[0, α)`, zero afterwards.
    Cvar(F),
    Uniform,
    /// `mix/ε` on `[0, ε)` plus `(1 - mix)/ε` on `(1 - ε, 1]`.
    Hurwicz { mix: F, eps: F },
    Custom,
}

#[derive(Clone)]
struct Custom<F> {
    density: ScalarFn<F>,
    antiderivative: Antiderivative<F>,
    breakpoints: Vec<F>,
    nonincreasing: bool,
}

#[derive(Clone)]
enum Antiderivative<F> {
    Supplied(ScalarFn<F>),
    /// Cumulative integral at `k / CUSTOM_TABLE_PANELS`, refined locally.
    Tabulated(Arc<Vec<F>>),
}

/// Normalized preference density on `[0, 1]`.
#[derive(Clone)]
pub struct WeightDensity<F> {
    kind: WeightKind<F>,
    custom: Option<Custom<F>>,
}

impl<F: Scalar> fmt::Debug for WeightDensity<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightDensity").field("kind", &self.kind).finish()
    }
}

impl<F: Scalar> fmt::Display for WeightDensity<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WeightKind::Power(a) => write!(f, "power:{a}"),
            WeightKind::Cvar(a) => write!(f, "cvar:{a}"),
            WeightKind::Uniform => f.write_str("uniform"),
            WeightKind::Hurwicz { mix, eps } => write!(f, "hurwicz:{mix}:{eps}"),
            WeightKind::Custom => f.write_str("custom"),
        }
    }
}

pub fn make_power_weight<F: Scalar>(alpha: F) -> Result<WeightDensity<F>> {
    if !(alpha >= F::one()) || !alpha.is_finite() {
        return Err(OwaError::Parameter(format!(
            "power weight needs alpha >= 1, got {alpha}"
        )));
    }
    Ok(WeightDensity {
        kind: WeightKind::Power(alpha),
        custom: None,
    })
}

pub fn make_cvar_weight<F: Scalar>(alpha: F) -> Result<WeightDensity<F>> {
    if !(alpha > F::zero() && alpha <= F::one()) {
        return Err(OwaError::Parameter(format!(
            "cvar weight needs 0 < alpha <= 1, got {alpha}"
        )));
    }
    Ok(WeightDensity {
        kind: WeightKind::Cvar(alpha),
        custom: None,
    })
}

pub fn make_uniform_weight<F: Scalar>() -> WeightDensity<F> {
    WeightDensity {
        kind: WeightKind::Uniform,
        custom: None,
    }
}

pub fn make_hurwicz_weight<F: Scalar>(mix: F, eps: F) -> Result<WeightDensity<F>> {
    if !(mix >= F::zero() && mix <= F::one()) {
        return Err(OwaError::Parameter(format!(
            "hurwicz mix must lie in [0, 1], got {mix}"
        )));
    }
    if !(eps > F::zero() && eps < F::c(0.5)) {
        return Err(OwaError::Parameter(format!(
            "hurwicz epsilon must lie in (0, 0.5), got {eps}"
        )));
    }
    Ok(WeightDensity {
        kind: WeightKind::Hurwicz { mix, eps },
        custom: None,
    })
}

/// Closed-form Hurwicz value `mix · worst + (1 - mix) · best`, the limit of
/// the smoothed Hurwicz density as `ε → 0`.
pub fn hurwicz_value<F: Scalar>(mix: F, best: F, worst: F) -> F {
    mix * worst + (F::one() - mix) * best
}

impl<F: Scalar> WeightDensity<F> {
    /// Custom density. Without an antiderivative, one is tabulated eagerly by
    /// adaptive Simpson at `CUSTOM_QUAD_TOL`, split at `breakpoints`.
    pub fn custom(
        density: impl Fn(F) -> F + Send + Sync + 'static,
        antiderivative: Option<Box<dyn Fn(F) -> F + Send + Sync>>,
        breakpoints: Vec<F>,
        nonincreasing: bool,
    ) -> Result<Self> {
        let density: ScalarFn<F> = Arc::new(density);
        let (antiderivative, tol) = match antiderivative {
            Some(w) => (Antiderivative::Supplied(Arc::from(w)), F::c(NORMALIZATION_TOL)),
            None => {
                let mut table = Vec::with_capacity(CUSTOM_TABLE_PANELS + 1);
                table.push(F::zero());
                let mut acc = CompensatedSum::new();
                let step = F::one() / F::from_usize_lossy(CUSTOM_TABLE_PANELS);
                let d = density.clone();
                for k in 0..CUSTOM_TABLE_PANELS {
                    let a = step * F::from_usize_lossy(k);
                    let b = if k + 1 == CUSTOM_TABLE_PANELS {
                        F::one()
                    } else {
                        step * F::from_usize_lossy(k + 1)
                    };
                    let tol = F::c(CUSTOM_QUAD_TOL) * step;
                    acc.add(adaptive_simpson_panels(&mut |t| d(t), a, b, &breakpoints, tol));
                    table.push(acc.total());
                }
                (Antiderivative::Tabulated(Arc::new(table)), F::c(10.0 * CUSTOM_QUAD_TOL))
            }
        };
        let w = WeightDensity {
            kind: WeightKind::Custom,
            custom: Some(Custom {
                density,
                antiderivative,
                breakpoints,
                nonincreasing,
            }),
        };
        let total = w.antiderivative(F::one()) - w.antiderivative(F::zero());
        if (total - F::one()).abs() > tol {
            return Err(OwaError::Parameter(format!(
                "custom density integrates to {total}, expected 1"
            )));
        }
        Ok(w)
    }

    /// Parses `power:<alpha>`, `cvar:<alpha>`, `uniform` or
    /// `hurwicz:<mix>:<eps>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map(F::c)
                .map_err(|_| OwaError::Parameter(format!("bad number `{s}` in weight `{spec}`")))
        };
        match parts.as_slice() {
            ["power", a] => make_power_weight(num(a)?),
            ["cvar", a] => make_cvar_weight(num(a)?),
            ["uniform"] => Ok(make_uniform_weight()),
            ["hurwicz", m, e] => make_hurwicz_weight(num(m)?, num(e)?),
            _ => Err(OwaError::Parameter(format!(
                "unknown weight `{spec}`; expected power:<a>, cvar:<a>, uniform or hurwicz:<mix>:<eps>"
            ))),
        }
    }

    pub fn kind(&self) -> WeightKind<F> {
        self.kind
    }

    pub fn evaluate(&self, t: F) -> F {
        let one = F::one();
        match self.kind {
            WeightKind::Power(a) => {
                if a == one {
                    one
                } else {
                    a * (one - t).max(F::zero()).powf(a - one)
                }
            }
            WeightKind::Cvar(a) => {
                if t < a {
                    one / a
                } else {
                    F::zero()
                }
            }
            WeightKind::Uniform => one,
            WeightKind::Hurwicz { mix, eps } => {
                let mut v = F::zero();
                if t < eps {
                    v = v + mix / eps;
                }
                if t > one - eps {
                    v = v + (one - mix) / eps;
                }
                v
            }
            WeightKind::Custom => (self.custom.as_ref().expect("custom").density)(t),
        }
    }

    /// `W(t) = ∫_0^t w`.
    pub fn antiderivative(&self, t: F) -> F {
        let one = F::one();
        let t = t.max(F::zero()).min(one);
        match self.kind {
            WeightKind::Power(a) => {
                if a == one {
                    t
                } else {
                    one - (one - t).powf(a)
                }
            }
            WeightKind::Cvar(a) => (t / a).min(one),
            WeightKind::Uniform => t,
            WeightKind::Hurwicz { mix, eps } => {
                let head = (t / eps).min(one);
                let tail = ((t - (one - eps)) / eps).max(F::zero());
                mix * head + (one - mix) * tail
            }
            WeightKind::Custom => {
                let c = self.custom.as_ref().expect("custom");
                match &c.antiderivative {
                    Antiderivative::Supplied(w) => w(t),
                    Antiderivative::Tabulated(table) => {
                        let scaled = t * F::from_usize_lossy(CUSTOM_TABLE_PANELS);
                        let k = scaled
                            .floor()
                            .to_usize()
                            .unwrap_or(0)
                            .min(CUSTOM_TABLE_PANELS);
                        let start = F::from_usize_lossy(k) / F::from_usize_lossy(CUSTOM_TABLE_PANELS);
                        if t <= start {
                            return table[k];
                        }
                        let d = c.density.clone();
                        let tol = F::c(CUSTOM_QUAD_TOL)
                            / F::from_usize_lossy(CUSTOM_TABLE_PANELS);
                        table[k] + adaptive_simpson_panels(&mut |s| d(s), start, t, &c.breakpoints, tol)
                    }
                }
            }
        }
    }

    /// Points in `(0, 1)` where the density may jump.
    pub fn breakpoints(&self) -> Vec<F> {
        let one = F::one();
        match self.kind {
            WeightKind::Cvar(a) if a < one => vec![a],
            WeightKind::Hurwicz { eps, .. } => vec![eps, one - eps],
            WeightKind::Custom => self.custom.as_ref().expect("custom").breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    pub fn is_nonincreasing(&self) -> bool {
        match self.kind {
            WeightKind::Power(_) | WeightKind::Cvar(_) | WeightKind::Uniform => true,
            WeightKind::Hurwicz { mix, .. } => mix == F::one(),
            WeightKind::Custom => self.custom.as_ref().expect("custom").nonincreasing,
        }
    }

    /// `w(t) = w(1 - t)` by construction.
    pub fn is_symmetric(&self) -> bool {
        match self.kind {
            WeightKind::Uniform => true,
            WeightKind::Power(a) => a == F::one(),
            WeightKind::Cvar(a) => a == F::one(),
            WeightKind::Hurwicz { mix, .. } => mix == F::c(0.5),
            WeightKind::Custom => false,
        }
    }
}

/// Integrals of a density over `K` equal bins of `[0, 1]`, first bin first.
#[derive(Debug, Clone, PartialEq)]
pub struct BinWeights<F> {
    values: Vec<F>,
}

impl<F: Scalar> BinWeights<F> {
    /// Validates nonnegativity and `Σ = 1` (within `1e-9`).
    pub fn from_values(values: Vec<F>) -> Result<Self> {
        if values.is_empty() {
            return Err(OwaError::Parameter("weight vector is empty".into()));
        }
        if values.iter().any(|v| !(*v >= F::zero())) {
            return Err(OwaError::Parameter("weights must be nonnegative".into()));
        }
        let total: F = values.iter().copied().sum();
        if (total - F::one()).abs() > F::c(1e-9) {
            return Err(OwaError::Parameter(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

/// `w'_k = W(k/K) - W((k-1)/K)` for `k = 1..=K`.
pub fn bin_integrals<F: Scalar>(w: &WeightDensity<F>, k: usize) -> Result<BinWeights<F>> {
    if k == 0 {
        return Err(OwaError::Parameter("bin count K must be at least 1".into()));
    }
    let kf = F::from_usize_lossy(k);
    let uniform = || vec![F::one() / kf; k];
    let values = match w.kind {
        WeightKind::Uniform => uniform(),
        WeightKind::Power(a) if a == F::one() => uniform(),
        WeightKind::Power(a) => (1..=k)
            .map(|j| {
                let hi = F::from_usize_lossy(k - j + 1) / kf;
                let lo = F::from_usize_lossy(k - j) / kf;
                hi.powf(a) - lo.powf(a)
            })
            .collect(),
        _ => {
            let mut prev = w.antiderivative(F::zero());
            (1..=k)
                .map(|j| {
                    let next = w.antiderivative(F::from_usize_lossy(j) / kf);
                    let v = (next - prev).max(F::zero());
                    prev = next;
                    v
                })
                .collect()
        }
    };
    Ok(BinWeights { values })
}

/// Monotone quantifier `W: [0, 1] → [0, 1]` with `W(0) = 0`, `W(1) = 1`.
#[derive(Clone)]
pub struct CumulativeWeight<F> {
    name: String,
    eval: ScalarFn<F>,
}

impl<F: Scalar> fmt::Debug for CumulativeWeight<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CumulativeWeight").field("name", &self.name).finish()
    }
}

const CUMULATIVE_PROBES: usize = 1024;

impl<F: Scalar> CumulativeWeight<F> {
    /// Validates the endpoints and monotonicity on a probe grid.
    pub fn new(name: impl Into<String>, eval: impl Fn(F) -> F + Send + Sync + 'static) -> Result<Self> {
        let w = Self {
            name: name.into(),
            eval: Arc::new(eval),
        };
        let tol = F::c(NORMALIZATION_TOL);
        if w.evaluate(F::zero()).abs() > tol || (w.evaluate(F::one()) - F::one()).abs() > tol {
            return Err(OwaError::Validation(format!(
                "cumulative weight `{}` must satisfy W(0) = 0 and W(1) = 1",
                w.name
            )));
        }
        let probes: Vec<(F, F)> = (0..=CUMULATIVE_PROBES)
            .map(|k| {
                let y = F::from_usize_lossy(k) / F::from_usize_lossy(CUMULATIVE_PROBES);
                (y, w.evaluate(y))
            })
            .collect();
        check_monotone(&w.name, probes)?;
        Ok(w)
    }

    pub fn linear() -> Self {
        Self::new("linear", |y| y).expect("valid")
    }

    /// `W(y) = y^q`.
    pub fn power(q: F) -> Result<Self> {
        if !(q > F::zero()) {
            return Err(OwaError::Parameter(format!("exponent must be positive, got {q}")));
        }
        Self::new(format!("y^{q}"), move |y: F| y.powf(q))
    }

    /// All weight on the worst outcome: `W(y) = 1` for `y > 0`.
    pub fn worst_case() -> Self {
        Self::new("worst-case", |y: F| if y > F::zero() { F::one() } else { F::zero() })
            .expect("valid")
    }

    /// All weight on the best outcome: `W(y) = 0` for `y < 1`.
    pub fn best_case() -> Self {
        Self::new("best-case", |y: F| if y < F::one() { F::zero() } else { F::one() })
            .expect("valid")
    }

    /// The antiderivative of a density read as a quantifier, so the density
    /// `α(1-t)^(α-1)` pairs with `W(y) = 1 - (1-y)^α`.
    pub fn from_density(w: &WeightDensity<F>) -> Self {
        let w = w.clone();
        Self {
            name: format!("cumulative({w})"),
            eval: Arc::new(move |y| w.antiderivative(y)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn evaluate(&self, y: F) -> F {
        (self.eval)(y)
    }
}

fn check_monotone<F: Scalar>(name: &str, mut probes: Vec<(F, F)>) -> Result<()> {
    probes.sort_by(|a, b| crate::scalar::cmp_scalar(&a.0, &b.0));
    let slack = F::c(NORMALIZATION_TOL);
    for w in probes.windows(2) {
        if w[1].1 < w[0].1 - slack {
            return Err(OwaError::Validation(format!(
                "cumulative weight `{name}` decreases between y = {} and y = {}",
                w[0].0, w[1].0
            )));
        }
    }
    Ok(())
}

/// Mixing coefficient `λ = 1 - ∫ y dW(y) = ∫_0^1 W(y) dy`, by adaptive
/// quadrature to `quad_tol`. Every quadrature probe is also checked for
/// monotonicity.
pub fn yager_lambda<F: Scalar>(w: &CumulativeWeight<F>, quad_tol: F) -> Result<F> {
    let mut probes = Vec::new();
    let lambda = adaptive_simpson(
        &mut |y| {
            let v = w.evaluate(y);
            probes.push((y, v));
            v
        },
        F::zero(),
        F::one(),
        quad_tol,
    );
    check_monotone(w.name(), probes)?;
    Ok(lambda.max(F::zero()).min(F::one()))
}

/// Bounds-only aggregation `λ b + (1 - λ) a`.
pub fn yager_value<F: Scalar>(lambda: F, lower: F, upper: F) -> F {
    lambda * upper + (F::one() - lambda) * lower
}
