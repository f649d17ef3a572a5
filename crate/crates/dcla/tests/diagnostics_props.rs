//! Evaluation-layer checks against error-function and Monte Carlo oracles.

mod common;

use common::{gaussian_potential, normal_cdf, pt};
use dcla::diagnostics::{
    binned_kl, grid_edges, histogram2d, normalize_density, sample_moments, target_hist, Box2,
    Histogram2D,
};
use dcla::point::Point;
use dcla::regularizers::DcRegularizer;
use dcla::rng::{draw_normal, RandomStream};
use proptest::prelude::*;

#[test]
fn gaussian_z_matches_analytic_values() {
    let v = gaussian_potential([0.0, 0.0], DcRegularizer::zero());
    let z = normalize_density(&v, Box2 { x: (-8.0, 8.0), y: (-8.0, 8.0) }, 1e-6).unwrap();
    assert!((z - 2.0 * std::f64::consts::PI).abs() < 1e-4, "z = {z}");

    // Truncated box: the error-function oracle gives the exact value.
    let z1 = normalize_density(&v, Box2 { x: (-1.0, 1.0), y: (-1.0, 1.0) }, 1e-8).unwrap();
    let phi_band = normal_cdf(1.0) - normal_cdf(-1.0);
    let expected = (2.0 * std::f64::consts::PI).sqrt() * phi_band;
    assert!((z1 - expected * expected).abs() < 1e-3, "z1 = {z1}");
}

#[test]
fn target_bins_match_error_function_products() {
    let v = gaussian_potential([0.0, 0.0], DcRegularizer::zero());
    let z = normalize_density(&v, Box2 { x: (-8.0, 8.0), y: (-8.0, 8.0) }, 1e-9).unwrap();
    let e = grid_edges(-8.0, 8.0, 16);
    let h = target_hist(&v, z, &e, &e, 8).unwrap();

    let band = |lo: f64, hi: f64| normal_cdf(hi) - normal_cdf(lo);
    let total_band = band(-8.0, 8.0);
    for i in 0..h.nx() {
        for j in 0..h.ny() {
            let expected =
                band(e[i], e[i + 1]) * band(e[j], e[j + 1]) / (total_band * total_band);
            assert!(
                (h.mass_at(i, j) - expected).abs() < 1e-6,
                "bin ({i},{j}): {} vs {expected}",
                h.mass_at(i, j)
            );
        }
    }
}

#[test]
fn monte_carlo_histogram_is_close_to_target_grid() {
    // 1e5 standard normal samples on [-4,4]^2 with 40x40 bins: the binned
    // KL against the analytic grid is small (tolerance from repeated-seed
    // spread, ~0.008 expected).
    let v = gaussian_potential([0.0, 0.0], DcRegularizer::zero());
    let z = normalize_density(&v, Box2 { x: (-8.0, 8.0), y: (-8.0, 8.0) }, 1e-8).unwrap();
    let e = grid_edges(-4.0, 4.0, 40);
    let target = target_hist(&v, z, &e, &e, 8).unwrap();

    let mut rng = RandomStream::new(51, 0);
    let samples: Vec<Point> = (0..100_000).map(|_| draw_normal(&mut rng, 2)).collect();
    let (hist, outside) = histogram2d(&samples, &e, &e).unwrap();
    assert!(outside < 50, "unexpectedly many samples outside: {outside}");
    let kl = binned_kl(&hist, &target).unwrap();
    assert!(kl < 0.02, "kl = {kl}");
}

#[test]
fn target_hist_respects_nonuniform_zero_splitting() {
    // A shifted box still produces edges containing 0 and masses that sum
    // to one.
    let v = gaussian_potential([1.0, 1.0], DcRegularizer::zero());
    let z = normalize_density(&v, Box2 { x: (-3.0, 5.0), y: (-3.0, 5.0) }, 1e-8).unwrap();
    let ex = grid_edges(-3.0, 5.0, 20);
    assert!(ex.contains(&0.0));
    let h = target_hist(&v, z, &ex, &ex, 8).unwrap();
    assert!((h.total - 1.0).abs() < 1e-12);
}

#[test]
fn moments_of_standard_normal_sample() {
    let mut rng = RandomStream::new(52, 0);
    let samples: Vec<Point> = (0..100_000).map(|_| draw_normal(&mut rng, 2)).collect();
    let (mean, cov) = sample_moments(&samples).unwrap();
    assert!(mean.norm() < 0.02);
    let fro: f64 = ((cov[(0, 0)] - 1.0).powi(2)
        + (cov[(1, 1)] - 1.0).powi(2)
        + 2.0 * cov[(0, 1)].powi(2))
    .sqrt();
    let identity_fro = 2f64.sqrt();
    assert!(fro / identity_fro < 0.05, "relative Frobenius error {}", fro / identity_fro);
}

fn hist_1d(mass: Vec<f64>) -> Histogram2D {
    let nx = mass.len();
    Histogram2D {
        x_edges: (0..=nx).map(|i| i as f64).collect(),
        y_edges: vec![0.0, 1.0],
        total: mass.iter().sum(),
        mass,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    // Gibbs inequality: KL >= 0 for any pair of normalized histograms on
    // the same grid, and KL(p, p) = 0.
    #[test]
    fn kl_is_nonnegative(raw_p in prop::collection::vec(1e-6f64..1.0, 8),
                         raw_q in prop::collection::vec(1e-6f64..1.0, 8)) {
        let sp: f64 = raw_p.iter().sum();
        let sq: f64 = raw_q.iter().sum();
        let p = hist_1d(raw_p.iter().map(|v| v / sp).collect());
        let q = hist_1d(raw_q.iter().map(|v| v / sq).collect());
        prop_assert!(binned_kl(&p, &q).unwrap() >= 0.0);
        prop_assert_eq!(binned_kl(&p, &p).unwrap(), 0.0);
    }

    // Histogram mass is invariant under sample permutation and sums to 1.
    #[test]
    fn histogram_mass_sums_to_one(seed in 0u64..1000) {
        let mut rng = RandomStream::new(seed, 0);
        let e = grid_edges(-4.0, 4.0, 10);
        let samples: Vec<Point> = (0..500).map(|_| draw_normal(&mut rng, 2)).collect();
        let (h, outside) = histogram2d(&samples, &e, &e).unwrap();
        prop_assert!((h.total - 1.0).abs() < 1e-9);
        let mut reversed = samples.clone();
        reversed.reverse();
        let (h2, outside2) = histogram2d(&reversed, &e, &e).unwrap();
        prop_assert_eq!(h.mass, h2.mass);
        prop_assert_eq!(outside, outside2);
    }
}

#[test]
fn degenerate_two_point_moments() {
    let samples = vec![pt(&[1.0, 0.0]), pt(&[-1.0, 0.0])];
    let (mean, cov) = sample_moments(&samples).unwrap();
    assert_eq!(mean.as_slice(), &[0.0, 0.0]);
    assert_eq!(cov[(0, 0)], 2.0);
}
