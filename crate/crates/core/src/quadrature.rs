//! Adaptive Simpson quadrature over panels.

use crate::scalar::{CompensatedSum, Scalar};

/// Recursion limit for a single panel.
pub const MAX_DEPTH: u32 = 30;

/// Panels are always bisected at least this many times before the error
/// estimate is trusted.
const MIN_DEPTH: u32 = 2;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F, G>(f: &mut G, a: F, b: F, tol: F) -> F
where
    F: Scalar,
    G: FnMut(F) -> F,
{
    integrate(f, a, b, tol, false, false)
}

/// Like [`adaptive_simpson`], but an end flagged as open is sampled a few
/// ulps inside the panel, so a jump sitting exactly on it takes the value
/// from within the panel.
fn integrate<F, G>(f: &mut G, a: F, b: F, tol: F, open_a: bool, open_b: bool) -> F
where
    F: Scalar,
    G: FnMut(F) -> F,
{
    if a == b {
        return F::zero();
    }
    let nudge = (b - a) * F::epsilon() * F::c(4.0);
    let fa = f(if open_a { a + nudge } else { a });
    let fb = f(if open_b { b - nudge } else { b });
    let m = mid(a, b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, 0)
}

/// Integrates `f` over `[a, b]` split at every breakpoint strictly inside
/// the range; the tolerance is shared proportionally to panel length.
pub fn adaptive_simpson_panels<F, G>(f: &mut G, a: F, b: F, breakpoints: &[F], tol: F) -> F
where
    F: Scalar,
    G: FnMut(F) -> F,
{
    if a == b {
        return F::zero();
    }
    let mut edges: Vec<F> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    edges.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
    edges.push(b);
    edges.sort_by(crate::scalar::cmp_scalar);
    edges.dedup();
    let span = b - a;
    let mut acc = CompensatedSum::new();
    let last = edges.len() - 2;
    for (i, w) in edges.windows(2).enumerate() {
        let share = tol * (w[1] - w[0]) / span;
        acc.add(integrate(f, w[0], w[1], share, i > 0, i < last));
    }
    acc.total()
}

#[inline]
fn mid<F: Scalar>(a: F, b: F) -> F {
    a + (b - a) / F::c(2.0)
}

#[inline]
fn simpson<F: Scalar>(a: F, b: F, fa: F, fm: F, fb: F) -> F {
    (b - a) / F::c(6.0) * (fa + F::c(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F, G>(
    f: &mut G,
    a: F,
    b: F,
    fa: F,
    fm: F,
    fb: F,
    whole: F,
    tol: F,
    depth: u32,
    level: u32,
) -> F
where
    F: Scalar,
    G: FnMut(F) -> F,
{
    let m = mid(a, b);
    let lm = mid(a, m);
    let rm = mid(m, b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || (level >= MIN_DEPTH && delta.abs() <= F::c(15.0) * tol) {
        return left + right + delta / F::c(15.0);
    }
    let half = tol / F::c(2.0);
    recurse(f, a, m, fa, flm, fm, left, half, depth - 1, level + 1)
        + recurse(f, m, b, fm, frm, fb, right, half, depth - 1, level + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(&mut |x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert!((v - 0.0).abs() < 1e-12);
    }

    #[test]
    fn square_root_singularity() {
        let v = adaptive_simpson(&mut |x: f64| x.sqrt(), 0.0, 1.0, 1e-10);
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn step_split_at_breakpoint() {
        let mut step = |x: f64| if x < 0.3 { 1.0 / 0.3 } else { 0.0 };
        let v = adaptive_simpson_panels(&mut step, 0.0, 1.0, &[0.3], 1e-12);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
