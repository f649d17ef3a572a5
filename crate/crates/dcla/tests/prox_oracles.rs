//! Grid brute-force verification of every proximal operator: frozen values
//! first computed by the stated oracle, then the oracle re-run in place.

mod common;

use common::pt;
use dcla::moreau::{prox_of_moreau, L1Norm, L2Norm};
use dcla::oracle::{grid_argmin_1d_fixed, grid_prox_2d, huber};
use dcla::prox::{prox_1d_convex, prox_l1, prox_l1_minus_eps_l2, prox_l2, ScalarConvexFn};
use proptest::prelude::*;

#[test]
fn soft_threshold_matches_fixed_grid() {
    // argmin of 0.4|y| + (y - 0.9)^2 / 2 on a step-1e-5 grid.
    let grid = grid_argmin_1d_fixed(&|y| 0.4 * y.abs() + (y - 0.9) * (y - 0.9) / 2.0, -2.0, 2.0, 1e-5);
    let closed = prox_l1(&pt(&[0.9]), 0.4)[0];
    assert!((closed - grid).abs() < 1e-4);
    assert!((closed - 0.5).abs() < 1e-12);
}

#[test]
fn block_soft_threshold_matches_grid() {
    let oracle = grid_prox_2d(&|a, b| 0.5 * (a * a + b * b).sqrt(), 1.0, &pt(&[1.0, 1.0]));
    let closed = prox_l2(&pt(&[1.0, 1.0]), 0.5);
    assert!(common::max_dev(&closed, &oracle) < 1e-3);
}

#[test]
fn l1_minus_l2_prox_matches_grid() {
    // Global minimizers of |y1|+|y2| - ||y|| + ||y - x||^2/2.
    let obj = |a: f64, b: f64| a.abs() + b.abs() - (a * a + b * b).sqrt();
    for (x, expected) in [
        (pt(&[0.5, 0.3]), pt(&[0.5, 0.0])),
        (pt(&[2.0, 0.0]), pt(&[2.0, 0.0])),
    ] {
        let closed = prox_l1_minus_eps_l2(&x, 1.0, 1.0);
        let oracle = grid_prox_2d(&obj, 1.0, &x);
        assert!(common::max_dev(&closed, &expected) < 1e-12);
        assert!(common::max_dev(&closed, &oracle) < 1e-3, "x = {x}");
    }
}

#[test]
fn bisection_prox_matches_fixed_grid() {
    // phi(y) = max(2|y| - 1, 0), t = 0.5, x = 2; grid step 1e-7 near the
    // refined location.
    let phi = ScalarConvexFn::new(
        |y| (2.0 * y.abs() - 1.0).max(0.0),
        |y| if y.abs() > 0.5 { 2.0 * y.signum() } else { 0.0 },
    );
    let got = prox_1d_convex(&phi, 0.5, 2.0).unwrap();
    let obj = |y: f64| (2.0 * y.abs() - 1.0).max(0.0) + (y - 2.0) * (y - 2.0);
    let coarse = grid_argmin_1d_fixed(&obj, -1.0, 3.0, 1e-4);
    let fine = grid_argmin_1d_fixed(&obj, coarse - 1e-3, coarse + 1e-3, 1e-7);
    assert!((got - fine).abs() < 1e-6, "got {got}, grid {fine}");
}

#[test]
fn envelope_prox_matches_direct_minimization() {
    // prox of the l1 envelope at lam = gam = 1, x = 3: direct minimization
    // of Huber(y) + (y-3)^2/2 gives 2.
    let grid = grid_argmin_1d_fixed(&|y| huber(y, 1.0) + (y - 3.0) * (y - 3.0) / 2.0, -1.0, 4.0, 1e-5);
    let closed = prox_of_moreau(&L1Norm, 1.0, 1.0, &pt(&[3.0])).unwrap()[0];
    assert!((closed - grid).abs() < 1e-4);
    assert!((closed - 2.0).abs() < 1e-12);

    // l2 case at x = (3, 4): the envelope objective has its minimum at
    // (2.4, 3.2).
    let env = |a: f64, b: f64| dcla::oracle::l2_envelope((a * a + b * b).sqrt(), 1.0);
    let oracle = grid_prox_2d(&env, 1.0, &pt(&[3.0, 4.0]));
    let closed = prox_of_moreau(&L2Norm, 1.0, 1.0, &pt(&[3.0, 4.0])).unwrap();
    assert!(common::max_dev(&closed, &oracle) < 1e-3);
    assert!(common::max_dev(&closed, &pt(&[2.4, 3.2])) < 1e-12);
}

#[test]
fn neg_abs_prox_matches_grid() {
    // Concave objective (y - v)^2/2 - gam |y|: closed form v + gam for
    // v > 0, v - gam for v < 0.
    for (v, expected) in [(0.5, 1.5), (-0.5, -1.5)] {
        let obj = |y: f64| (y - v) * (y - v) / 2.0 - y.abs();
        let grid = grid_argmin_1d_fixed(&obj, -3.0, 3.0, 1e-5);
        let closed = dcla::prox::prox_neg_abs(v, 1.0);
        assert!((closed - expected).abs() < 1e-12);
        assert!((closed - grid).abs() < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    // Nonexpansiveness of the closed-form proxes of convex functions.
    #[test]
    fn proxes_are_nonexpansive(
        x0 in -5.0f64..5.0, x1 in -5.0f64..5.0,
        y0 in -5.0f64..5.0, y1 in -5.0f64..5.0,
        t in 0.05f64..3.0,
    ) {
        let x = pt(&[x0, x1]);
        let y = pt(&[y0, y1]);
        let d = x.distance(&y);
        prop_assert!(prox_l1(&x, t).distance(&prox_l1(&y, t)) <= d + 1e-12);
        prop_assert!(prox_l2(&x, t).distance(&prox_l2(&y, t)) <= d + 1e-12);
    }

    // The three-branch closed form never loses to simple candidate points
    // (0, the spike on the max coordinate, the rescaled soft threshold).
    #[test]
    fn l1_minus_eps_l2_beats_candidates(
        x0 in -4.0f64..4.0, x1 in -4.0f64..4.0,
        t in 0.1f64..2.0, eps in 0.1f64..=1.0,
    ) {
        let x = pt(&[x0, x1]);
        let obj = |p: &dcla::Point| {
            p.norm_l1() - eps * p.norm() + p.distance(&x).powi(2) / (2.0 * t)
        };
        let chosen = prox_l1_minus_eps_l2(&x, t, eps);
        let value = obj(&chosen);
        prop_assert!(value <= obj(&pt(&[0.0, 0.0])) + 1e-9);
        let shrunk = prox_l1(&x, t);
        if shrunk.norm() > 0.0 {
            prop_assert!(value <= obj(&shrunk.scale(1.0 + eps * t / shrunk.norm())) + 1e-9);
        }
    }
}
