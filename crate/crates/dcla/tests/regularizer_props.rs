//! Catalog-wide regularizer properties: Lipschitz certificates, subgradient
//! bounds and inequalities, convexity probes, and the DC identity.

mod common;

use common::{random_point, uniform};
use dcla::regularizers::{Component, DcRegularizer, RegKind, SecondComponentBound};
use dcla::rng::RandomStream;
use proptest::prelude::*;

fn catalog(d: usize) -> Vec<DcRegularizer> {
    let mut kinds = vec![
        DcRegularizer::new(RegKind::L1MinusL2, 10.0).unwrap(),
        DcRegularizer::new(RegKind::CappedL1 { theta: 2.0 }, 1.5).unwrap(),
        DcRegularizer::new(RegKind::PiL { theta: 2.0, a: 3.0 }, 1.5).unwrap(),
        DcRegularizer::new(RegKind::L1MinusL2PowP { p: 1.5, holder_m: None }, 2.0).unwrap(),
    ];
    if d >= 2 {
        kinds.push(DcRegularizer::new(RegKind::L1MinusSigmaQ { q: d - 1 }, 1.0).unwrap());
    }
    kinds
}

#[test]
fn lipschitz_certificates_hold() {
    let mut rng = RandomStream::new(21, 0);
    for reg in catalog(3) {
        let info = reg.lipschitz_info(3);
        for _ in 0..1000 {
            let x = random_point(&mut rng, 3, 3.0);
            let y = random_point(&mut rng, 3, 3.0);
            let (r1x, r2x, _) = reg.dc_eval(&x).unwrap();
            let (r1y, r2y, _) = reg.dc_eval(&y).unwrap();
            let dist = x.distance(&y);
            assert!(
                (r1x - r1y).abs() <= info.g1 * dist + 1e-9,
                "r1 certificate failed for {:?}",
                reg.kind()
            );
            if let SecondComponentBound::Lipschitz(g2) = info.g2 {
                assert!(
                    (r2x - r2y).abs() <= g2 * dist + 1e-9,
                    "r2 certificate failed for {:?}",
                    reg.kind()
                );
            }
        }
    }
}

#[test]
fn subgradient_norms_bounded_by_g1() {
    let mut rng = RandomStream::new(22, 0);
    for reg in catalog(3) {
        let info = reg.lipschitz_info(3);
        for _ in 0..500 {
            let x = random_point(&mut rng, 3, 3.0);
            let (g1, _) = reg.dc_subgradient(&x).unwrap();
            assert!(
                g1.norm() <= info.g1 + 1e-9,
                "subgradient bound failed for {:?}: {} > {}",
                reg.kind(),
                g1.norm(),
                info.g1
            );
        }
    }
}

#[test]
fn subgradient_inequality_holds() {
    // g in the subdifferential means r(y) >= r(x) + <g, y - x> everywhere.
    let mut rng = RandomStream::new(23, 0);
    for reg in catalog(3) {
        for _ in 0..40 {
            let x = random_point(&mut rng, 3, 2.5);
            let (g1, g2) = reg.dc_subgradient(&x).unwrap();
            let (r1x, r2x, _) = reg.dc_eval(&x).unwrap();
            for _ in 0..100 {
                let y = random_point(&mut rng, 3, 2.5);
                let (r1y, r2y, _) = reg.dc_eval(&y).unwrap();
                let step = y.sub(&x);
                assert!(
                    r1y >= r1x + g1.dot(&step) - 1e-9,
                    "r1 subgradient inequality failed for {:?}",
                    reg.kind()
                );
                assert!(
                    r2y >= r2x + g2.dot(&step) - 1e-9,
                    "r2 subgradient inequality failed for {:?}",
                    reg.kind()
                );
            }
        }
    }
}

#[test]
fn components_are_midpoint_convex() {
    let mut rng = RandomStream::new(24, 0);
    for reg in catalog(2) {
        for _ in 0..1000 {
            let x = random_point(&mut rng, 2, 3.0);
            let y = random_point(&mut rng, 2, 3.0);
            let mid = x.add(&y).scale(0.5);
            for which in [Component::R1, Component::R2] {
                let g = reg.component(which);
                let lhs = g.value(&mid);
                let rhs = 0.5 * (g.value(&x) + g.value(&y));
                assert!(lhs <= rhs + 1e-9, "midpoint convexity failed for {:?}", reg.kind());
            }
        }
    }
}

#[test]
fn component_prox_certifies_optimality() {
    // The prox output must beat nearby perturbations on the prox objective.
    let mut rng = RandomStream::new(25, 0);
    for reg in catalog(2) {
        for which in [Component::R1, Component::R2] {
            let g = reg.component(which).clone();
            for _ in 0..50 {
                let x = random_point(&mut rng, 2, 2.0);
                let t = uniform(&mut rng, 0.1, 1.5);
                let Ok(p) = reg.component_prox(which, t, &x) else {
                    continue; // sigma_q r2 with q < d has no rule
                };
                let obj = |y: &dcla::Point| g.value(y) + y.distance(&x).powi(2) / (2.0 * t);
                let base = obj(&p);
                for _ in 0..20 {
                    let perturbed = p.axpy(0.01, &random_point(&mut rng, 2, 1.0));
                    assert!(
                        obj(&perturbed) >= base - 1e-9,
                        "prox not locally optimal for {:?}",
                        reg.kind()
                    );
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // dc_eval returns r = r1 - r2 exactly.
    #[test]
    fn dc_identity_exact(x0 in -5.0f64..5.0, x1 in -5.0f64..5.0, tau in 0.1f64..20.0) {
        let x = common::pt(&[x0, x1]);
        for kind in [
            RegKind::L1MinusL2,
            RegKind::CappedL1 { theta: 2.0 },
            RegKind::PiL { theta: 2.0, a: 3.0 },
            RegKind::Zero,
        ] {
            let reg = DcRegularizer::new(kind, tau).unwrap();
            let (r1, r2, r) = reg.dc_eval(&x).unwrap();
            prop_assert_eq!(r, r1 - r2);
        }
    }

    // PiL's printed difference decomposition reproduces the ramp value.
    #[test]
    fn pil_decomposition_matches_ramp(x0 in -5.0f64..5.0, x1 in -5.0f64..5.0) {
        let theta = 2.0;
        let a = 3.0;
        let reg = DcRegularizer::new(RegKind::PiL { theta, a }, 1.0).unwrap();
        let x = common::pt(&[x0, x1]);
        let (_, _, r) = reg.dc_eval(&x).unwrap();
        let ramp: f64 = x
            .as_slice()
            .iter()
            .map(|&u| ((theta * u.abs() - 1.0) / (a - 1.0)).clamp(0.0, 1.0))
            .sum();
        prop_assert!((r - ramp).abs() < 1e-12);
    }

    // Capped-l1 decomposition reproduces sum_i min(1, theta |x_i|).
    #[test]
    fn capped_l1_decomposition_matches(x0 in -5.0f64..5.0, x1 in -5.0f64..5.0, theta in 0.2f64..4.0) {
        let reg = DcRegularizer::new(RegKind::CappedL1 { theta }, 1.0).unwrap();
        let x = common::pt(&[x0, x1]);
        let (_, _, r) = reg.dc_eval(&x).unwrap();
        let direct: f64 = x.as_slice().iter().map(|&u| (theta * u.abs()).min(1.0)).sum();
        prop_assert!((r - direct).abs() < 1e-12);
    }
}
