//! Moreau envelopes of convex functions and the prox-of-envelope identity.
//!
//! For convex `g` and `lam > 0` the envelope
//!
//! ```text
//! g^lam(x) = inf_y { g(y) + ||x - y||^2 / (2 lam) }
//! ```
//!
//! is convex, `1/lam`-smooth, and a lower bound of `g`; its gradient is
//! `(x - prox_{lam g}(x)) / lam`, and if `g` is `G`-Lipschitz the gap to `g`
//! is at most `G^2 lam / 2`. Everything here reduces to prox evaluations,
//! so the module revolves around the [`ConvexFunction`] trait.

use std::sync::Arc;

use crate::error::ProxError;
use crate::point::Point;
use crate::prox::{prox_1d_convex, prox_l1, prox_l2, ScalarConvexFn};

/// A convex function with value, a fixed subgradient selection, and a prox.
///
/// Selections are deterministic (`sign(0) = 0`, the l2 subgradient at 0 is 0)
/// so that sampler trajectories are reproducible.
pub trait ConvexFunction: Send + Sync {
    fn value(&self, x: &Point) -> f64;
    fn subgradient(&self, x: &Point) -> Point;
    fn prox(&self, t: f64, x: &Point) -> Result<Point, ProxError>;
}

/// Envelope value `g(p) + ||x - p||^2 / (2 lam)` at `p = prox_{lam g}(x)`.
pub fn moreau_value(g: &dyn ConvexFunction, lam: f64, x: &Point) -> Result<f64, ProxError> {
    assert!(lam > 0.0, "smoothing parameter must be positive");
    let p = g.prox(lam, x)?;
    let d = x.sub(&p);
    Ok(g.value(&p) + d.dot(&d) / (2.0 * lam))
}

/// Envelope gradient `(x - prox_{lam g}(x)) / lam`.
pub fn moreau_grad(g: &dyn ConvexFunction, lam: f64, x: &Point) -> Result<Point, ProxError> {
    assert!(lam > 0.0, "smoothing parameter must be positive");
    let p = g.prox(lam, x)?;
    Ok(x.sub(&p).scale(1.0 / lam))
}

/// Prox of the envelope via the exact identity
///
/// ```text
/// prox_{gam g^lam}(x) = (gam * prox_{(gam+lam) g}(x) + lam * x) / (gam + lam)
/// ```
pub fn prox_of_moreau(
    g: &dyn ConvexFunction,
    lam: f64,
    gam: f64,
    x: &Point,
) -> Result<Point, ProxError> {
    assert!(lam > 0.0 && gam > 0.0, "parameters must be positive");
    let p = g.prox(gam + lam, x)?;
    Ok(p.scale(gam / (gam + lam)).axpy(lam / (gam + lam), x))
}

/// The l1 norm.
#[derive(Clone, Copy, Debug, Default)]
pub struct L1Norm;

impl ConvexFunction for L1Norm {
    fn value(&self, x: &Point) -> f64 {
        x.norm_l1()
    }
    fn subgradient(&self, x: &Point) -> Point {
        Point::from_vec_unchecked(x.as_slice().iter().map(|&v| sign0(v)).collect())
    }
    fn prox(&self, t: f64, x: &Point) -> Result<Point, ProxError> {
        Ok(prox_l1(x, t))
    }
}

/// The l2 (Euclidean) norm.
#[derive(Clone, Copy, Debug, Default)]
pub struct L2Norm;

impl ConvexFunction for L2Norm {
    fn value(&self, x: &Point) -> f64 {
        x.norm()
    }
    fn subgradient(&self, x: &Point) -> Point {
        let n = x.norm();
        if n == 0.0 {
            Point::zeros(x.dim())
        } else {
            x.scale(1.0 / n)
        }
    }
    fn prox(&self, t: f64, x: &Point) -> Result<Point, ProxError> {
        Ok(prox_l2(x, t))
    }
}

/// The zero function; its prox is the identity.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroFn;

impl ConvexFunction for ZeroFn {
    fn value(&self, _x: &Point) -> f64 {
        0.0
    }
    fn subgradient(&self, x: &Point) -> Point {
        Point::zeros(x.dim())
    }
    fn prox(&self, _t: f64, x: &Point) -> Result<Point, ProxError> {
        Ok(x.clone())
    }
}

/// `s * g` for `s > 0`; the prox folds the scale into the parameter.
#[derive(Clone)]
pub struct Scaled<G> {
    pub scale: f64,
    pub inner: G,
}

impl<G: ConvexFunction> ConvexFunction for Scaled<G> {
    fn value(&self, x: &Point) -> f64 {
        self.scale * self.inner.value(x)
    }
    fn subgradient(&self, x: &Point) -> Point {
        self.inner.subgradient(x).scale(self.scale)
    }
    fn prox(&self, t: f64, x: &Point) -> Result<Point, ProxError> {
        self.inner.prox(t * self.scale, x)
    }
}

/// Separable convex function `x -> sum_i phi(x_i)` built from a shared
/// scalar rule; the prox solves one bisection per coordinate.
pub struct Separable {
    phi: Arc<ScalarConvexFn>,
}

impl Separable {
    pub fn new(phi: ScalarConvexFn) -> Self {
        Self { phi: Arc::new(phi) }
    }
}

impl ConvexFunction for Separable {
    fn value(&self, x: &Point) -> f64 {
        x.as_slice().iter().map(|&v| self.phi.value(v)).sum()
    }
    fn subgradient(&self, x: &Point) -> Point {
        Point::from_vec_unchecked(x.as_slice().iter().map(|&v| self.phi.subgradient(v)).collect())
    }
    fn prox(&self, t: f64, x: &Point) -> Result<Point, ProxError> {
        let mut out = Vec::with_capacity(x.dim());
        for &v in x.as_slice() {
            out.push(prox_1d_convex(&self.phi, t, v)?);
        }
        Ok(Point::from_vec_unchecked(out))
    }
}

pub(crate) fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}
