//! Target potentials `V = f + scale*(r1 - r2)`, their Moreau-smoothed
//! surrogates, and calculators for dissipativity constants and admissible
//! step sizes.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{ModelError, PotentialError, ProxError};
use crate::moreau::moreau_value;
use crate::point::Point;
use crate::regularizers::{Component, DcRegularizer, SecondComponentBound};

/// Quadratic smooth term `f(x) = (x - m)^T S (x - m) / 2` with a symmetric
/// positive definite `S`.
#[derive(Clone, Debug)]
pub struct QuadraticF {
    mean: Point,
    precision: DMatrix<f64>,
    l_f: f64,
    mu_f: f64,
}

impl QuadraticF {
    /// Validates symmetry (to 1e-12) and positive definiteness; the extreme
    /// eigenvalues become the smoothness and strong convexity moduli.
    pub fn new(mean: Point, precision: Vec<Vec<f64>>) -> Result<Self, PotentialError> {
        let d = mean.dim();
        if precision.len() != d || precision.iter().any(|row| row.len() != d) {
            return Err(ModelError::DimensionMismatch {
                expected: d,
                got: precision.len(),
            }
            .into());
        }
        let m = DMatrix::from_fn(d, d, |i, j| precision[i][j]);
        let mut max_asym = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                max_asym = max_asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if max_asym > 1e-12 {
            return Err(PotentialError::NotSymmetric { max_asym });
        }
        let eigs = m.clone().symmetric_eigen().eigenvalues;
        let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_eig = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if min_eig <= 0.0 {
            return Err(PotentialError::NotPositiveDefinite { min_eig });
        }
        Ok(Self {
            mean,
            precision: m,
            l_f: max_eig,
            mu_f: min_eig,
        })
    }

    /// Identity-precision Gaussian potential centered at `mean`.
    pub fn standard(mean: Point) -> Self {
        let d = mean.dim();
        let eye = vec![(0..d).map(|_| 0.0).collect::<Vec<_>>(); d];
        let mut eye = eye;
        for (i, row) in eye.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self::new(mean, eye).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.mean.dim()
    }

    pub fn mean(&self) -> &Point {
        &self.mean
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    /// Largest eigenvalue of the precision matrix.
    pub fn l_f(&self) -> f64 {
        self.l_f
    }

    /// Smallest eigenvalue of the precision matrix.
    pub fn mu_f(&self) -> f64 {
        self.mu_f
    }

    /// `(value, gradient)` at `x`.
    pub fn eval_grad(&self, x: &Point) -> (f64, Point) {
        assert_eq!(x.dim(), self.dim(), "dimension mismatch");
        let diff = DVector::from_iterator(
            x.dim(),
            x.as_slice().iter().zip(self.mean.as_slice()).map(|(a, b)| a - b),
        );
        let grad = &self.precision * &diff;
        let value = 0.5 * diff.dot(&grad);
        (value, Point::from_vec_unchecked(grad.iter().cloned().collect()))
    }
}

/// Smooth term of the potential: the built-in quadratic or a callback with
/// declared constants (the smoothness modulus is required; the dissipativity
/// pair is optional and only needed by the constant calculators).
#[derive(Clone)]
pub enum SmoothTerm {
    Quadratic(QuadraticF),
    Custom {
        eval_grad: Arc<dyn Fn(&Point) -> (f64, Point) + Send + Sync>,
        l_f: f64,
        dissipativity: Option<(f64, f64)>,
    },
}

impl fmt::Debug for SmoothTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothTerm::Quadratic(q) => f.debug_tuple("Quadratic").field(q).finish(),
            SmoothTerm::Custom { l_f, dissipativity, .. } => f
                .debug_struct("Custom")
                .field("l_f", l_f)
                .field("dissipativity", dissipativity)
                .finish(),
        }
    }
}

impl SmoothTerm {
    pub fn eval_grad(&self, x: &Point) -> (f64, Point) {
        match self {
            SmoothTerm::Quadratic(q) => q.eval_grad(x),
            SmoothTerm::Custom { eval_grad, .. } => eval_grad(x),
        }
    }

    pub fn l_f(&self) -> f64 {
        match self {
            SmoothTerm::Quadratic(q) => q.l_f(),
            SmoothTerm::Custom { l_f, .. } => *l_f,
        }
    }

    /// `(mu_f, R_f)` when known: a quadratic is `(mu_f, 0)`-dissipative.
    pub fn dissipativity(&self) -> Option<(f64, f64)> {
        match self {
            SmoothTerm::Quadratic(q) => Some((q.mu_f(), 0.0)),
            SmoothTerm::Custom { dissipativity, .. } => *dissipativity,
        }
    }
}

/// Smooth second component for the simplified sampler variant: a gradient
/// callback plus its smoothness constant (and optionally a value for
/// potential evaluation).
#[derive(Clone)]
pub struct SmoothR2 {
    pub grad: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
    pub value: Option<Arc<dyn Fn(&Point) -> f64 + Send + Sync>>,
    pub l_r2: f64,
}

impl fmt::Debug for SmoothR2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothR2").field("l_r2", &self.l_r2).finish()
    }
}

/// The assembled target potential.
#[derive(Clone, Debug)]
pub struct DcPotential {
    pub f: SmoothTerm,
    pub reg: DcRegularizer,
    /// Smooth replacement for `r2`, consumed by the simplified variant only.
    pub smooth_r2: Option<SmoothR2>,
    dim: usize,
}

impl DcPotential {
    pub fn new(f: SmoothTerm, reg: DcRegularizer, dim: usize) -> Result<Self, PotentialError> {
        if let SmoothTerm::Quadratic(q) = &f {
            if q.dim() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    got: q.dim(),
                }
                .into());
            }
        }
        Ok(Self {
            f,
            reg,
            smooth_r2: None,
            dim,
        })
    }

    pub fn with_smooth_r2(mut self, r2: SmoothR2) -> Self {
        self.smooth_r2 = Some(r2);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `V(x) = f(x) + scale*(r1(x) - r2(x))`.
    pub fn eval(&self, x: &Point) -> f64 {
        let (fv, _) = self.f.eval_grad(x);
        let (_, _, r) = self.reg.dc_eval(x).expect("dimension checked at build");
        fv + r
    }

    /// The smoothed surrogate `V_lam(x) = f(x) + r1^lam(x) - r2^lam(x)`.
    pub fn eval_smoothed(&self, lam: f64, x: &Point) -> Result<f64, ProxError> {
        assert!(lam > 0.0, "smoothing parameter must be positive");
        let (fv, _) = self.f.eval_grad(x);
        let m1 = moreau_value(self.reg.component(Component::R1).as_ref(), lam, x)?;
        let m2 = moreau_value(self.reg.component(Component::R2).as_ref(), lam, x)?;
        Ok(fv + m1 - m2)
    }

    /// Drift selection `grad f + g1 - g2` used by the subgradient baseline
    /// sampler and the dissipativity probe.
    pub fn subgradient_drift(&self, x: &Point) -> Point {
        let (_, grad_f) = self.f.eval_grad(x);
        let (g1, g2) = self.reg.dc_subgradient(x).expect("dimension checked at build");
        grad_f.add(&g1).sub(&g2)
    }

    /// Distant dissipativity constants of the whole potential.
    ///
    /// With `(mu_f, R_f)` for `f`, the potential is `(mu_f/2, R)`-distant
    /// dissipative with `R = max(R_f, 4 G2 / mu_f)` in the Lipschitz case
    /// and `R = max(R_f, (2M/mu_f)^{1/(1-kappa)})` in the Hölder case; when
    /// `G2 = 0` (no concave part) the constants of `f` carry over unchanged.
    pub fn dissipativity_constants(&self) -> Result<DissipativityConstants, PotentialError> {
        let (mu_f, r_f) = self
            .f
            .dissipativity()
            .ok_or(PotentialError::MissingDissipativityDeclaration)?;
        if mu_f <= 0.0 {
            return Err(PotentialError::NonDissipativeF { mu_f });
        }
        let info = self.reg.lipschitz_info(self.dim);
        let constants = match info.g2 {
            SecondComponentBound::Lipschitz(g2) if g2 == 0.0 => DissipativityConstants {
                mu: mu_f,
                radius: r_f,
            },
            SecondComponentBound::Lipschitz(g2) => DissipativityConstants {
                mu: 0.5 * mu_f,
                radius: r_f.max(4.0 * g2 / mu_f),
            },
            SecondComponentBound::Holder { kappa, m } => DissipativityConstants {
                mu: 0.5 * mu_f,
                radius: r_f.max((2.0 * m / mu_f).powf(1.0 / (1.0 - kappa))),
            },
        };
        Ok(constants)
    }
}

/// Modulus and radius of the distant dissipativity inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DissipativityConstants {
    pub mu: f64,
    pub radius: f64,
}

/// Which step-size theorem to apply.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSizeVariant {
    /// Both components smoothed; the drift modulus is `2/lam + L_f`.
    DcLa,
    /// Smooth `r2` used directly; the modulus is `1/lam + L_f + L_r2`.
    DcLaS { l_r2: f64 },
}

/// Largest step size covered by the convergence guarantees for the given
/// Wasserstein order `q`.
///
/// For the fully smoothed scheme:
/// `q = 1`: `mu lam^2 / (2 (2 + lam L_f)^2)`;
/// `q >= 2`: `min(mu lam^2 / ((2 + lam L_f)^2 2^{2q+3} (2q - 1)), lam / (4 (2 + lam L_f)))`.
/// The simplified variant replaces `2 + lam L_f` by `1 + lam (L_f + L_r2)`.
pub fn max_stepsize(q: u32, mu: f64, lam: f64, l_f: f64, variant: StepSizeVariant) -> f64 {
    assert!(q >= 1, "Wasserstein order must be at least 1");
    assert!(mu > 0.0 && lam > 0.0 && l_f > 0.0, "parameters must be positive");
    let a = match variant {
        StepSizeVariant::DcLa => 2.0 + lam * l_f,
        StepSizeVariant::DcLaS { l_r2 } => {
            assert!(l_r2 > 0.0, "l_r2 must be positive");
            1.0 + lam * l_f + lam * l_r2
        }
    };
    if q == 1 {
        mu * lam * lam / (2.0 * a * a)
    } else {
        let qf = f64::from(q);
        let first = mu * lam * lam / (a * a * 2f64.powi(2 * q as i32 + 3) * (2.0 * qf - 1.0));
        let second = lam / (4.0 * a);
        first.min(second)
    }
}
