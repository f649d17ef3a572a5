//! Sampler-level properties: exact reductions, the unrolled identity,
//! stationary-law oracles, symmetry, determinism, and divergence handling.

mod common;

use std::sync::Arc;

use common::{l1_only_reg, paper_potential, pt, random_point, uniform};
use dcla::diagnostics::sample_moments;
use dcla::point::Point;
use dcla::potentials::{DcPotential, QuadraticF, SmoothTerm};
use dcla::regularizers::DcRegularizer;
use dcla::rng::RandomStream;
use dcla::samplers::{
    dcla_step, dcla_step_unrolled, psgla_step, run_chains, run_chains_collect, ChainState,
    SamplerKind, StepKernel,
};

fn zero_reg_potential() -> Arc<DcPotential> {
    let f = QuadraticF::new(pt(&[0.0, 0.0]), vec![vec![1.0, 0.8], vec![0.8, 1.0]]).unwrap();
    Arc::new(DcPotential::new(SmoothTerm::Quadratic(f), DcRegularizer::zero(), 2).unwrap())
}

#[test]
fn zero_regularizer_collapses_all_kernels() {
    // With r = 0 every prox is the identity and all five kernels must
    // produce bit-identical trajectories from the same stream.
    let potential = zero_reg_potential();
    let kinds = [
        SamplerKind::Ula,
        SamplerKind::MoreauUla,
        SamplerKind::Psgla,
        SamplerKind::DcLa,
        SamplerKind::DcLaS,
    ];
    let mut finals = Vec::new();
    for kind in kinds {
        let kernel = StepKernel::new(potential.clone(), kind, 0.05, 0.01).unwrap();
        let mut rng = RandomStream::new(99, 0);
        let mut state = ChainState::new(pt(&[1.5, -2.0]));
        for _ in 0..200 {
            state = kernel.step(&state, &mut rng).unwrap();
        }
        finals.push(state.x);
    }
    for other in &finals[1..] {
        assert_eq!(&finals[0], other, "kernels disagree under the zero regularizer");
    }
}

#[test]
fn unrolled_form_matches_composition() {
    let potential = Arc::new(paper_potential([0.0, 0.0], 10.0));
    let mut rng = RandomStream::new(41, 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = random_point(&mut rng, 2, 2.0);
        let gamma = 10f64.powf(uniform(&mut rng, -4.0, -1.0));
        let lambda = 10f64.powf(uniform(&mut rng, -4.0, -1.0));
        let state = ChainState::new(x);
        let mut rng_a = RandomStream::new(500, 7);
        let mut rng_b = rng_a.clone();
        let a = dcla_step(&potential, lambda, gamma, &state, &mut rng_a).unwrap();
        let b = dcla_step_unrolled(&potential, lambda, gamma, &state, &mut rng_b).unwrap();
        worst = worst.max(common::max_dev(&a.x, &b.x));
    }
    assert!(worst <= 1e-10, "max deviation {worst}");
}

#[test]
fn single_chain_reaches_ar1_variance() {
    // ULA on V = x^2/2 is the AR(1) recursion x' = (1-g) x + sqrt(2g) Z
    // with stationary variance 2/(2-g).
    let f = QuadraticF::standard(pt(&[0.0]));
    let potential =
        Arc::new(DcPotential::new(SmoothTerm::Quadratic(f), DcRegularizer::zero(), 1).unwrap());
    let kernel = StepKernel::new(potential, SamplerKind::Ula, 0.1, 1.0).unwrap();
    let mut rng = RandomStream::new(42, 0);
    let mut state = ChainState::new(pt(&[0.0]));
    let n = 100_000;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for step in 0..n + 1000 {
        state = kernel.step(&state, &mut rng).unwrap();
        if step >= 1000 {
            sum += state.x[0];
            sum_sq += state.x[0] * state.x[0];
        }
    }
    let mean = sum / n as f64;
    let var = sum_sq / n as f64 - mean * mean;
    let expected = 2.0 / (2.0 - 0.1);
    assert!(
        (var - expected).abs() / expected < 0.05,
        "variance {var}, expected {expected}"
    );
}

#[test]
fn multi_chain_reaches_ar1_variance() {
    let f = QuadraticF::standard(pt(&[0.0, 0.0]));
    let potential =
        Arc::new(DcPotential::new(SmoothTerm::Quadratic(f), DcRegularizer::zero(), 2).unwrap());
    let kernel = StepKernel::new(potential, SamplerKind::Ula, 0.1, 1.0).unwrap();
    let finals = run_chains(&kernel, 5000, 2000, 4242, &Point::zeros(2)).unwrap();
    let (_, cov) = sample_moments(&finals).unwrap();
    let expected = 2.0 / (2.0 - 0.1);
    for i in 0..2 {
        assert!(
            (cov[(i, i)] - expected).abs() / expected < 0.05,
            "coordinate {i} variance {}",
            cov[(i, i)]
        );
    }
}

#[test]
fn symmetric_target_has_centered_mean() {
    // Mean-zero target: the empirical mean must sit inside the 4-sigma
    // Monte Carlo band 4 sqrt(trace(cov)/n).
    let potential = Arc::new(paper_potential([0.0, 0.0], 10.0));
    let kernel = StepKernel::new(potential, SamplerKind::DcLa, 0.005, 0.01).unwrap();
    let n_chains = 2000;
    let finals = run_chains(&kernel, n_chains, 500, 77, &Point::zeros(2)).unwrap();
    let (mean, cov) = sample_moments(&finals).unwrap();
    let band = 4.0 * ((cov[(0, 0)] + cov[(1, 1)]) / n_chains as f64).sqrt();
    assert!(mean.norm() <= band, "mean {} outside band {band}", mean.norm());
}

#[test]
fn dcla_approaches_psgla_for_vanishing_smoothing() {
    // With r2 = 0 and lambda -> 0, the composed step approaches the
    // forward-backward step on r1.
    let potential = Arc::new(common::flat_potential(2, l1_only_reg(1.0)));
    let mut rng = RandomStream::new(43, 0);
    for _ in 0..100 {
        let x = random_point(&mut rng, 2, 2.0);
        let state = ChainState::new(x);
        let mut rng_a = RandomStream::new(4500, 3);
        let mut rng_b = rng_a.clone();
        let a = dcla_step(&potential, 1e-6, 0.01, &state, &mut rng_a).unwrap();
        let b = psgla_step(&potential, 0.01, &state, &mut rng_b).unwrap();
        assert!(common::max_dev(&a.x, &b.x) < 1e-4);
    }
}

#[test]
fn chains_stay_finite_at_moderate_step_size() {
    // 100 chains x 10_000 steps = 1e6 transitions without overflow.
    let potential = Arc::new(paper_potential([0.0, 0.0], 10.0));
    let kernel = StepKernel::new(potential, SamplerKind::DcLa, 0.1, 0.01).unwrap();
    let finals = run_chains(&kernel, 100, 10_000, 7, &Point::zeros(2)).unwrap();
    assert!(finals.iter().all(|p| p.is_finite()));
}

#[test]
fn runs_are_bit_reproducible_and_schedule_independent() {
    let potential = Arc::new(paper_potential([1.0, 1.0], 10.0));
    let kernel = StepKernel::new(potential, SamplerKind::DcLa, 0.005, 0.01).unwrap();
    let init = pt(&[0.0, 0.0]);
    let a = run_chains(&kernel, 64, 100, 9, &init).unwrap();
    let b = run_chains(&kernel, 64, 100, 9, &init).unwrap();
    assert_eq!(a, b);

    // Chain 17 recomputed sequentially matches the parallel run exactly.
    let mut rng = RandomStream::new(9, 17);
    let mut state = ChainState::new(init);
    for _ in 0..100 {
        state = kernel.step(&state, &mut rng).unwrap();
    }
    assert_eq!(state.x, a[17]);
}

#[test]
fn divergence_is_reported_with_chain_index() {
    // An absurd step size blows the quadratic drift up within a few steps.
    let potential = zero_reg_potential();
    let kernel = StepKernel::new(potential, SamplerKind::Ula, 1e6, 1.0).unwrap();
    let err = run_chains(&kernel, 4, 1000, 1, &pt(&[1.0, 1.0])).unwrap_err();
    assert_eq!(err.chain, 0);

    let outcome = run_chains_collect(&kernel, 4, 1000, 1, &pt(&[1.0, 1.0]));
    assert_eq!(outcome.n_nonfinite, 4);
    assert!(outcome.finals.iter().all(|f| f.is_none()));
}

#[test]
fn stepsize_advisory_reflects_theory() {
    let potential = Arc::new(paper_potential([0.0, 0.0], 10.0));
    let loud = StepKernel::new(potential.clone(), SamplerKind::DcLa, 0.005, 0.01).unwrap();
    assert!(loud.stepsize_advisory().is_some());
    // Far below the bound: no advisory.
    let quiet = StepKernel::new(potential.clone(), SamplerKind::DcLa, 1e-9, 0.01).unwrap();
    assert!(quiet.stepsize_advisory().is_none());
    // Baselines have no bound to check.
    let ula = StepKernel::new(potential, SamplerKind::Ula, 0.005, 0.01).unwrap();
    assert!(ula.stepsize_advisory().is_none());
}
