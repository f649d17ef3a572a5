//! Catalog of difference-of-convex regularizers `r = r1 - r2`.
//!
//! Each kind carries its convex components with fixed subgradient
//! selections, proximal rules (closed form where available, per-coordinate
//! bisection otherwise), and the Lipschitz/Hölder constants used by the
//! dissipativity and step-size calculators. The sparsity weight `scale`
//! multiplies both components, so `r = scale*r1 - scale*r2` stays a valid
//! DC decomposition and the prox rules absorb the scale into their
//! parameter.

use std::fmt;
use std::sync::Arc;

use crate::error::{ModelError, ProxError};
use crate::moreau::{sign0, ConvexFunction, L1Norm, L2Norm, ZeroFn};
use crate::point::Point;
use crate::prox::{prox_1d_convex, prox_l1_minus_eps_l2, ScalarConvexFn};

/// Which DC component an operation addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    R1,
    R2,
}

/// Lipschitz bound on `r2`'s subgradients, or a Hölder gradient modulus for
/// differentiable `r2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SecondComponentBound {
    Lipschitz(f64),
    Holder { kappa: f64, m: f64 },
}

/// Constants attached to a regularizer at a given dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizerInfo {
    /// Bound on `||u||` over `u` in the subdifferential of `r1` (so `r1` is
    /// `g1`-Lipschitz).
    pub g1: f64,
    /// Regularity of `r2`.
    pub g2: SecondComponentBound,
    /// Smoothness constant of `r2` when it is C^{1,1}; gates the simplified
    /// sampler variant.
    pub r2_smooth: Option<f64>,
}

/// Caller-supplied DC pair for regularizers outside the built-in catalog.
///
/// Components are unscaled; the enclosing [`DcRegularizer`] applies its
/// `scale` on top. `full_prox`, when given, must evaluate
/// `prox_{t (r1 - r2)}` of the unscaled pair and is used by the
/// forward-backward sampler that needs the prox of the whole `r`.
#[derive(Clone)]
pub struct CustomDc {
    pub r1: Arc<dyn ConvexFunction>,
    pub r2: Arc<dyn ConvexFunction>,
    /// Unscaled constants: `(g1, g2 bound, L_r2 when smooth)` at dimension d
    /// is taken as declared, then multiplied by `scale`.
    pub info: RegularizerInfo,
    pub full_prox: Option<Arc<dyn Fn(f64, &Point) -> Point + Send + Sync>>,
}

impl fmt::Debug for CustomDc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDc")
            .field("info", &self.info)
            .field("full_prox", &self.full_prox.is_some())
            .finish()
    }
}

/// Kinds of DC regularizers.
#[derive(Clone, Debug)]
pub enum RegKind {
    /// `||x||_1 - ||x||_2`.
    L1MinusL2,
    /// `||x||_1 - ||x||_{sigma_q}` where the second term sums the `q`
    /// largest magnitudes.
    L1MinusSigmaQ { q: usize },
    /// `sum_i min(1, theta |x_i|)` split as
    /// `theta ||x||_1 - sum_i max(theta |x_i| - 1, 0)`.
    CappedL1 { theta: f64 },
    /// Piecewise-linear ramp `sum_i min(1, max(0, (theta |x_i| - 1)/(a-1)))`.
    PiL { theta: f64, a: f64 },
    /// `||x||_1 - ||x||_2^p` with `p` in `(1, 2)`; the second component is
    /// differentiable with a `(p-1)`-Hölder gradient. The Hölder modulus is
    /// not constructive, so it can be supplied; the conservative default is
    /// `p * 2^p`.
    L1MinusL2PowP { p: f64, holder_m: Option<f64> },
    /// `r = 0`; turns every sampler into its unregularized form.
    Zero,
    /// Caller-supplied components.
    Custom(CustomDc),
}

impl RegKind {
    pub fn name(&self) -> &'static str {
        match self {
            RegKind::L1MinusL2 => "l1_minus_l2",
            RegKind::L1MinusSigmaQ { .. } => "l1_minus_sigma_q",
            RegKind::CappedL1 { .. } => "capped_l1",
            RegKind::PiL { .. } => "pil",
            RegKind::L1MinusL2PowP { .. } => "l1_minus_l2_pow_p",
            RegKind::Zero => "zero",
            RegKind::Custom(_) => "custom",
        }
    }
}

/// A scaled DC regularizer with ready-to-call components.
#[derive(Clone)]
pub struct DcRegularizer {
    kind: RegKind,
    scale: f64,
    r1: Arc<dyn ConvexFunction>,
    r2: Arc<dyn ConvexFunction>,
}

impl fmt::Debug for DcRegularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DcRegularizer")
            .field("kind", &self.kind)
            .field("scale", &self.scale)
            .finish()
    }
}

impl DcRegularizer {
    pub fn new(kind: RegKind, scale: f64) -> Result<Self, ModelError> {
        if !matches!(kind, RegKind::Zero) && !(scale > 0.0 && scale.is_finite()) {
            return Err(ModelError::NonPositive {
                name: "scale",
                value: scale,
            });
        }
        match &kind {
            RegKind::L1MinusSigmaQ { q } if *q == 0 => {
                return Err(ModelError::NonPositive { name: "q", value: 0.0 })
            }
            RegKind::CappedL1 { theta } if !(*theta > 0.0) => {
                return Err(ModelError::NonPositive { name: "theta", value: *theta })
            }
            RegKind::PiL { theta, a } => {
                if !(*theta > 0.0) {
                    return Err(ModelError::NonPositive { name: "theta", value: *theta });
                }
                if !(*a > 1.0) {
                    return Err(ModelError::NonPositive { name: "a - 1", value: *a - 1.0 });
                }
            }
            RegKind::L1MinusL2PowP { p, .. } if !(*p > 1.0 && *p < 2.0) => {
                return Err(ModelError::NonPositive { name: "p - 1 (with p < 2)", value: *p - 1.0 })
            }
            _ => {}
        }
        let scale = if matches!(kind, RegKind::Zero) { 1.0 } else { scale };
        let (r1, r2) = build_components(&kind, scale);
        Ok(Self { kind, scale, r1, r2 })
    }

    /// Shorthand for the zero regularizer.
    pub fn zero() -> Self {
        Self::new(RegKind::Zero, 1.0).expect("zero regularizer is always valid")
    }

    pub fn kind(&self) -> &RegKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, RegKind::Zero)
    }

    /// The scaled convex component.
    pub fn component(&self, which: Component) -> &Arc<dyn ConvexFunction> {
        match which {
            Component::R1 => &self.r1,
            Component::R2 => &self.r2,
        }
    }

    /// Values `(r1, r2, r1 - r2)` at `x`, scale included.
    pub fn dc_eval(&self, x: &Point) -> Result<(f64, f64, f64), ModelError> {
        self.check_dim(x)?;
        let r1 = self.r1.value(x);
        let r2 = self.r2.value(x);
        Ok((r1, r2, r1 - r2))
    }

    /// Subgradient selections `(g1, g2)` at `x`, scale included.
    pub fn dc_subgradient(&self, x: &Point) -> Result<(Point, Point), ModelError> {
        self.check_dim(x)?;
        Ok((self.r1.subgradient(x), self.r2.subgradient(x)))
    }

    /// `prox_{t * scale * component}(x)`.
    pub fn component_prox(&self, which: Component, t: f64, x: &Point) -> Result<Point, ProxError> {
        assert!(t > 0.0, "prox parameter must be positive");
        self.component(which).prox(t, x)
    }

    /// `prox_{t * scale * (r1 - r2)}(x)` where a rule for the whole DC
    /// function exists.
    pub fn full_prox(&self, t: f64, x: &Point) -> Result<Point, ProxError> {
        assert!(t > 0.0, "prox parameter must be positive");
        match &self.kind {
            RegKind::Zero => Ok(x.clone()),
            RegKind::L1MinusL2 => Ok(prox_l1_minus_eps_l2(x, t * self.scale, 1.0)),
            RegKind::Custom(c) => match &c.full_prox {
                Some(f) => Ok(f(t * self.scale, x)),
                None => Err(ProxError::NoFullProx {
                    kind: self.kind.name().to_string(),
                }),
            },
            other => Err(ProxError::NoFullProx {
                kind: other.name().to_string(),
            }),
        }
    }

    /// Lipschitz/Hölder constants at dimension `d`, scale included.
    pub fn lipschitz_info(&self, d: usize) -> RegularizerInfo {
        assert!(d >= 1);
        let sd = (d as f64).sqrt();
        let tau = self.scale;
        match &self.kind {
            RegKind::L1MinusL2 => RegularizerInfo {
                g1: tau * sd,
                g2: SecondComponentBound::Lipschitz(tau),
                r2_smooth: None,
            },
            RegKind::L1MinusSigmaQ { .. } => RegularizerInfo {
                g1: tau * sd,
                g2: SecondComponentBound::Lipschitz(tau * sd),
                r2_smooth: None,
            },
            RegKind::CappedL1 { theta } => RegularizerInfo {
                g1: tau * theta * sd,
                g2: SecondComponentBound::Lipschitz(2.0 * tau * theta * sd),
                r2_smooth: None,
            },
            RegKind::PiL { theta, a } => RegularizerInfo {
                g1: tau * theta * sd / (a - 1.0),
                g2: SecondComponentBound::Lipschitz(2.0 * tau * theta * sd / (a - 1.0)),
                r2_smooth: None,
            },
            RegKind::L1MinusL2PowP { p, holder_m } => RegularizerInfo {
                g1: tau * sd,
                g2: SecondComponentBound::Holder {
                    kappa: p - 1.0,
                    m: tau * holder_m.unwrap_or_else(|| p * 2f64.powf(*p)),
                },
                r2_smooth: None,
            },
            RegKind::Zero => RegularizerInfo {
                g1: 0.0,
                g2: SecondComponentBound::Lipschitz(0.0),
                r2_smooth: None,
            },
            RegKind::Custom(c) => RegularizerInfo {
                g1: tau * c.info.g1,
                g2: match c.info.g2 {
                    SecondComponentBound::Lipschitz(g2) => {
                        SecondComponentBound::Lipschitz(tau * g2)
                    }
                    SecondComponentBound::Holder { kappa, m } => {
                        SecondComponentBound::Holder { kappa, m: tau * m }
                    }
                },
                r2_smooth: c.info.r2_smooth.map(|l| tau * l),
            },
        }
    }

    fn check_dim(&self, x: &Point) -> Result<(), ModelError> {
        if let RegKind::L1MinusSigmaQ { q } = self.kind {
            if q > x.dim() {
                return Err(ModelError::DimensionMismatch {
                    expected: q,
                    got: x.dim(),
                });
            }
        }
        Ok(())
    }
}

fn build_components(kind: &RegKind, scale: f64) -> (Arc<dyn ConvexFunction>, Arc<dyn ConvexFunction>) {
    match kind {
        RegKind::L1MinusL2 => (
            Arc::new(ScaledDyn::new(scale, Arc::new(L1Norm))),
            Arc::new(ScaledDyn::new(scale, Arc::new(L2Norm))),
        ),
        RegKind::L1MinusSigmaQ { q } => (
            Arc::new(ScaledDyn::new(scale, Arc::new(L1Norm))),
            Arc::new(ScaledDyn::new(scale, Arc::new(SigmaQNorm { q: *q }))),
        ),
        RegKind::CappedL1 { theta } => {
            let th = *theta;
            (
                Arc::new(ScaledDyn::new(scale * th, Arc::new(L1Norm))),
                Arc::new(ScaledDyn::new(
                    scale,
                    Arc::new(SeparableDyn::new(ScalarConvexFn::new(
                        move |u| (th * u.abs() - 1.0).max(0.0),
                        move |u| if th * u.abs() > 1.0 { th * sign0(u) } else { 0.0 },
                    ))),
                )),
            )
        }
        RegKind::PiL { theta, a } => {
            let th = *theta;
            let c = th / (a - 1.0);
            let aa = *a;
            (
                Arc::new(ScaledDyn::new(
                    scale,
                    Arc::new(SeparableDyn::new(ScalarConvexFn::new(
                        move |u| c * (1.0 / th).max(u.abs()),
                        move |u| if u.abs() > 1.0 / th { c * sign0(u) } else { 0.0 },
                    ))),
                )),
                Arc::new(ScaledDyn::new(
                    scale,
                    Arc::new(SeparableDyn::new(ScalarConvexFn::new(
                        move |u| {
                            c * (1.0 / th).max(u.abs())
                                - ((th * u.abs() - 1.0) / (aa - 1.0)).clamp(0.0, 1.0)
                        },
                        move |u| if u.abs() > aa / th { c * sign0(u) } else { 0.0 },
                    ))),
                )),
            )
        }
        RegKind::L1MinusL2PowP { p, .. } => (
            Arc::new(ScaledDyn::new(scale, Arc::new(L1Norm))),
            Arc::new(ScaledDyn::new(scale, Arc::new(PowNorm { p: *p }))),
        ),
        RegKind::Zero => (Arc::new(ZeroFn), Arc::new(ZeroFn)),
        RegKind::Custom(c) => (
            Arc::new(ScaledDyn::new(scale, c.r1.clone())),
            Arc::new(ScaledDyn::new(scale, c.r2.clone())),
        ),
    }
}

/// Dyn-friendly version of [`crate::moreau::Scaled`].
struct ScaledDyn {
    scale: f64,
    inner: Arc<dyn ConvexFunction>,
}

impl ScaledDyn {
    fn new(scale: f64, inner: Arc<dyn ConvexFunction>) -> Self {
        Self { scale, inner }
    }
}

impl ConvexFunction for ScaledDyn {
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

/// Dyn-friendly separable function (shared scalar rule per coordinate).
struct SeparableDyn {
    phi: ScalarConvexFn,
}

impl SeparableDyn {
    fn new(phi: ScalarConvexFn) -> Self {
        Self { phi }
    }
}

impl ConvexFunction for SeparableDyn {
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

/// Sum of the `q` largest magnitudes. Ties in the magnitude ranking break
/// toward the lowest index so the subgradient selection is deterministic.
struct SigmaQNorm {
    q: usize,
}

impl SigmaQNorm {
    fn top_indices(&self, x: &Point) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..x.dim()).collect();
        idx.sort_by(|&i, &j| {
            x[j].abs()
                .partial_cmp(&x[i].abs())
                .expect("finite coordinates")
                .then(i.cmp(&j))
        });
        idx.truncate(self.q.min(x.dim()));
        idx
    }
}

impl ConvexFunction for SigmaQNorm {
    fn value(&self, x: &Point) -> f64 {
        assert!(self.q <= x.dim(), "sigma_q needs q <= d");
        self.top_indices(x).iter().map(|&i| x[i].abs()).sum()
    }
    fn subgradient(&self, x: &Point) -> Point {
        assert!(self.q <= x.dim(), "sigma_q needs q <= d");
        let mut g = vec![0.0; x.dim()];
        for i in self.top_indices(x) {
            g[i] = sign0(x[i]);
        }
        Point::from_vec_unchecked(g)
    }
    fn prox(&self, t: f64, x: &Point) -> Result<Point, ProxError> {
        // No closed form in general; the q = d case collapses to the l1 norm.
        if self.q == x.dim() {
            return Ok(crate::prox::prox_l1(x, t));
        }
        Err(ProxError::UnsupportedComponent {
            kind: "l1_minus_sigma_q".to_string(),
            which: "r2",
        })
    }
}

/// `||x||_2^p` for `p` in `(1, 2)`. The prox is radial, so it reduces to a
/// scalar bisection along `x`'s direction.
struct PowNorm {
    p: f64,
}

impl ConvexFunction for PowNorm {
    fn value(&self, x: &Point) -> f64 {
        x.norm().powf(self.p)
    }
    fn subgradient(&self, x: &Point) -> Point {
        let n = x.norm();
        if n == 0.0 {
            Point::zeros(x.dim())
        } else {
            x.scale(self.p * n.powf(self.p - 2.0))
        }
    }
    fn prox(&self, t: f64, x: &Point) -> Result<Point, ProxError> {
        let n = x.norm();
        if n == 0.0 {
            return Ok(Point::zeros(x.dim()));
        }
        let p = self.p;
        let phi = ScalarConvexFn::new(
            move |u| u.abs().powf(p),
            move |u| {
                if u == 0.0 {
                    0.0
                } else {
                    p * u.abs().powf(p - 1.0) * sign0(u)
                }
            },
        );
        let alpha = prox_1d_convex(&phi, t, n)?;
        Ok(x.scale(alpha / n))
    }
}
