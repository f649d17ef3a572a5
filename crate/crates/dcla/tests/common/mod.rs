//! Shared builders and independent oracles for the integration suites.

#![allow(dead_code)]

use std::sync::Arc;

use dcla::moreau::{ConvexFunction, L1Norm, ZeroFn};
use dcla::point::Point;
use dcla::potentials::{DcPotential, QuadraticF, SmoothTerm};
use dcla::regularizers::{CustomDc, DcRegularizer, RegKind, RegularizerInfo, SecondComponentBound};
use dcla::rng::RandomStream;

pub fn pt(v: &[f64]) -> Point {
    Point::new(v.to_vec()).unwrap()
}

/// The synthetic 2D target: correlated Gaussian likelihood plus the scaled
/// l1-minus-l2 prior.
pub fn paper_potential(mean: [f64; 2], tau: f64) -> DcPotential {
    let f = QuadraticF::new(pt(&mean), vec![vec![1.0, 0.8], vec![0.8, 1.0]]).unwrap();
    let reg = DcRegularizer::new(RegKind::L1MinusL2, tau).unwrap();
    DcPotential::new(SmoothTerm::Quadratic(f), reg, 2).unwrap()
}

/// Identity-precision Gaussian with the given regularizer.
pub fn gaussian_potential(mean: [f64; 2], reg: DcRegularizer) -> DcPotential {
    let f = QuadraticF::standard(pt(&mean));
    DcPotential::new(SmoothTerm::Quadratic(f), reg, 2).unwrap()
}

/// Flat smooth term (f = 0) for isolating regularizer behavior.
pub fn flat_potential(dim: usize, reg: DcRegularizer) -> DcPotential {
    let f = SmoothTerm::Custom {
        eval_grad: Arc::new(move |x: &Point| (0.0, Point::zeros(x.dim()))),
        l_f: 1.0,
        dissipativity: None,
    };
    DcPotential::new(f, reg, dim).unwrap()
}

/// `r1 = |.|`, `r2 = 0` as a custom pair, with the soft threshold as the
/// full prox (the whole r is just r1 here).
pub fn l1_only_reg(scale: f64) -> DcRegularizer {
    DcRegularizer::new(
        RegKind::Custom(CustomDc {
            r1: Arc::new(L1Norm),
            r2: Arc::new(ZeroFn),
            info: RegularizerInfo {
                g1: 1.0,
                g2: SecondComponentBound::Lipschitz(0.0),
                r2_smooth: None,
            },
            full_prox: Some(Arc::new(|t, x| dcla::prox::prox_l1(x, t))),
        }),
        scale,
    )
    .unwrap()
}

/// Uniform draw in `[lo, hi]` from squashed normals; deterministic per
/// stream state and good enough for probe sampling.
pub fn uniform(rng: &mut RandomStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) / (1.0 + (-rng.normal()).exp())
}

pub fn random_point(rng: &mut RandomStream, d: usize, scale: f64) -> Point {
    Point::new((0..d).map(|_| scale * rng.normal()).collect()).unwrap()
}

/// Standard normal CDF via the library error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + statrs::function::erf::erf(x / std::f64::consts::SQRT_2))
}

/// Max-norm distance between two points.
pub fn max_dev(a: &Point, b: &Point) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

/// Subgradient selection of a convex component, reusable in probes.
pub fn component_subgrad(g: &dyn ConvexFunction, x: &Point) -> Point {
    g.subgradient(x)
}
