//! Proximal operators: closed forms, a 1D bisection oracle, and the
//! fixed-point approximation used when no prox rule is available.
//!
//! The proximal operator of `g` with parameter `t > 0` is
//!
//! ```text
//! prox_{t g}(x) = argmin_y { g(y) + ||y - x||^2 / (2t) }
//! ```
//!
//! For convex `g` the minimizer is unique and the map is nonexpansive.
//! Multivalued cases (a concave `-|.|`, argmax ties in the `l1 - eps*l2`
//! formula) use fixed deterministic selections so that runs are reproducible.

use crate::error::ProxError;
use crate::point::Point;

/// Componentwise soft threshold: `sign(x_i) * max(|x_i| - t, 0)`.
pub fn prox_l1(x: &Point, t: f64) -> Point {
    assert!(t > 0.0, "prox parameter must be positive");
    Point::from_vec_unchecked(
        x.as_slice()
            .iter()
            .map(|&v| v.signum() * (v.abs() - t).max(0.0))
            .collect(),
    )
}

/// Block soft threshold: `max(1 - t/||x||, 0) * x`, with `prox(0) = 0`.
pub fn prox_l2(x: &Point, t: f64) -> Point {
    assert!(t > 0.0, "prox parameter must be positive");
    let n = x.norm();
    if n <= t {
        // Includes x = 0, where the shrink factor would be 0/0.
        return Point::zeros(x.dim());
    }
    x.scale(1.0 - t / n)
}

/// Closed-form prox of `l1 - eps * l2` for `eps` in `(0, 1]`.
///
/// Three branches on `||x||_inf`:
/// zero when `||x||_inf <= (1 - eps) t`; a rescaled soft threshold when
/// `||x||_inf > t`; otherwise a single spike on the largest coordinate
/// (lowest index on ties).
pub fn prox_l1_minus_eps_l2(x: &Point, t: f64, eps: f64) -> Point {
    assert!(t > 0.0, "prox parameter must be positive");
    assert!(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
    let max_abs = x.norm_inf();
    if max_abs <= (1.0 - eps) * t {
        return Point::zeros(x.dim());
    }
    if max_abs > t {
        let shrunk = prox_l1(x, t);
        let factor = 1.0 + eps * t / shrunk.norm();
        return shrunk.scale(factor);
    }
    // (1 - eps) t < ||x||_inf <= t: spike on the first coordinate of
    // maximal magnitude.
    let i_star = x
        .as_slice()
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v.abs() > bv {
                (i, v.abs())
            } else {
                (bi, bv)
            }
        })
        .0;
    let mut out = vec![0.0; x.dim()];
    out[i_star] = x[i_star].signum() * (max_abs + (eps - 1.0) * t);
    Point::from_vec_unchecked(out)
}

/// Prox of the concave scalar function `-|.|`, which is multivalued at 0.
///
/// Returns `v + gam` for `v > 0`, `v - gam` for `v < 0`, and the fixed
/// selection `+gam` at `v = 0` (the minimizer set there is `{gam, -gam}`).
pub fn prox_neg_abs(v: f64, gam: f64) -> f64 {
    assert!(gam > 0.0, "prox parameter must be positive");
    if v > 0.0 {
        v + gam
    } else if v < 0.0 {
        v - gam
    } else {
        gam
    }
}

/// A scalar convex function given by a value and a subgradient selection.
pub struct ScalarConvexFn {
    value: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    subgradient: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ScalarConvexFn {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        subgradient: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Box::new(value),
            subgradient: Box::new(subgradient),
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        (self.value)(y)
    }

    pub fn subgradient(&self, y: f64) -> f64 {
        (self.subgradient)(y)
    }

    /// Random midpoint probe of convexity over `[lo, hi]`:
    /// `value((a+b)/2) <= (value(a)+value(b))/2 + 1e-9` on sampled pairs.
    pub fn check_midpoint_convexity(&self, lo: f64, hi: f64, pairs: usize, seed: u64) -> bool {
        let mut rng = crate::rng::RandomStream::new(seed, 0);
        for _ in 0..pairs {
            // Map normals through tanh-free affine clamping to stay in range.
            let u = lo + (hi - lo) * normal_to_unit(rng.normal());
            let v = lo + (hi - lo) * normal_to_unit(rng.normal());
            let mid = self.value(0.5 * (u + v));
            let avg = 0.5 * (self.value(u) + self.value(v));
            if mid > avg + 1e-9 {
                return false;
            }
        }
        true
    }
}

fn normal_to_unit(z: f64) -> f64 {
    // Cheap squashing of a normal draw into (0, 1); distribution does not
    // matter for a probe, coverage of the interval does.
    1.0 / (1.0 + (-z).exp())
}

/// Tolerance (in the argument) of the 1D bisection prox.
pub const PROX_1D_TOL: f64 = 1e-10;

/// Prox of a scalar convex function by bisection.
///
/// Solves for the unique minimizer of `phi(y) + (y - x)^2 / (2t)` as the
/// zero crossing of the nondecreasing map `y -> subgradient(y) + (y - x)/t`.
/// Bisection (rather than Newton) is deliberate: the map may jump across
/// zero at a kink of `phi`, in which case the minimizer is the kink itself.
pub fn prox_1d_convex(phi: &ScalarConvexFn, t: f64, x: f64) -> Result<f64, ProxError> {
    assert!(t > 0.0, "prox parameter must be positive");
    let psi = |y: f64| phi.subgradient(y) + (y - x) / t;

    let at_x = psi(x);
    if at_x == 0.0 {
        return Ok(x);
    }
    let limit = x.abs() + 1e6;

    // Expand a bracket [lo, hi] with psi(lo) <= 0 <= psi(hi). The minimizer
    // always lies on the side of x where the quadratic pull balances the
    // subgradient.
    let (mut lo, mut hi);
    let mut width = t.max(1e-3);
    if at_x > 0.0 {
        hi = x;
        loop {
            let cand = x - width;
            if psi(cand) <= 0.0 {
                lo = cand;
                break;
            }
            width *= 2.0;
            if width > limit {
                return Err(ProxError::BracketExpansion { x });
            }
        }
    } else {
        lo = x;
        loop {
            let cand = x + width;
            if psi(cand) >= 0.0 {
                hi = cand;
                break;
            }
            width *= 2.0;
            if width > limit {
                return Err(ProxError::BracketExpansion { x });
            }
        }
    }

    while hi - lo > PROX_1D_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // f64 resolution reached.
            break;
        }
        if psi(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Approximate prox by subgradient fixed-point iterations.
///
/// Starting from `v_0 = x`, iterates `v <- x - eta * subgrad(v)` the given
/// number of times. Used when a regularizer component exposes only a
/// subgradient oracle; one or a few iterations already give a usable
/// surrogate for `prox_{eta g}(x)`.
pub fn approx_prox_fixed_point<F>(subgrad: F, eta: f64, x: &Point, iters: usize) -> Point
where
    F: Fn(&Point) -> Point,
{
    assert!(eta > 0.0, "eta must be positive");
    assert!(iters >= 1, "need at least one iteration");
    let mut v = x.clone();
    for _ in 0..iters {
        v = x.axpy(-eta, &subgrad(&v));
    }
    v
}
