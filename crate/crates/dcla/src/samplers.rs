//! One-step transition kernels and the multi-chain runner.
//!
//! Five kernels share the Euler–Maruyama template
//! `x' = x - gamma * drift(x) + sqrt(2 gamma) Z`:
//!
//! * [`ula_step`] — plain update with a caller-supplied drift;
//! * [`moreau_ula_step`] — drift of the smoothed surrogate,
//!   `grad f + grad r1^lam - grad r2^lam`;
//! * [`psgla_step`] — forward step on `f`, backward prox of the whole `r`;
//! * [`dcla_step`] — forward step on `f - r2^lam`, backward prox of
//!   `r1^lam`, decomposed into elementary prox calls;
//! * [`dclas_step`] — the simplified variant when `r2` is already smooth.
//!
//! With the zero regularizer every prox collapses to the identity and all
//! kernels take the *same* code path, so their trajectories agree bit for
//! bit given the same random stream. This exact reduction is part of the
//! contract and is what the tests pin down.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{ModelError, SamplerError, StepError};
use crate::moreau::{moreau_grad, prox_of_moreau};
use crate::point::Point;
use crate::potentials::{max_stepsize, DcPotential, StepSizeVariant};
use crate::regularizers::Component;
use crate::rng::{draw_normal, RandomStream};

/// The sampler schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Ula,
    MoreauUla,
    Psgla,
    #[serde(rename = "dcla")]
    DcLa,
    #[serde(rename = "dclas")]
    DcLaS,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Ula => "ula",
            SamplerKind::MoreauUla => "moreau_ula",
            SamplerKind::Psgla => "psgla",
            SamplerKind::DcLa => "dcla",
            SamplerKind::DcLaS => "dclas",
        }
    }
}

/// Run parameters shared by all kernels. `lambda` is ignored by the plain
/// and forward-backward baselines but must still be positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    pub gamma: f64,
    pub lambda: f64,
    pub n_chains: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub kind: SamplerKind,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(ModelError::NonPositive { name: "gamma", value: self.gamma });
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(ModelError::NonPositive { name: "lambda", value: self.lambda });
        }
        if self.n_chains == 0 {
            return Err(ModelError::NonPositive { name: "n_chains", value: 0.0 });
        }
        Ok(())
    }
}

/// Current chain position and age.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub x: Point,
    pub step_count: u64,
}

impl ChainState {
    pub fn new(x: Point) -> Self {
        Self { x, step_count: 0 }
    }
}

/// `x - gamma * drift + sqrt(2 gamma) z`, the shared update expression.
fn langevin_update(x: &Point, drift: &Point, gamma: f64, z: &Point) -> Point {
    x.axpy(-gamma, drift).axpy((2.0 * gamma).sqrt(), z)
}

fn finish(x: Point, step_count: u64) -> Result<ChainState, StepError> {
    let step = step_count + 1;
    if !x.is_finite() {
        return Err(StepError::NonFiniteState { step });
    }
    Ok(ChainState { x, step_count: step })
}

/// One Euler–Maruyama step with an arbitrary drift.
pub fn ula_step<F>(
    drift: F,
    gamma: f64,
    state: &ChainState,
    rng: &mut RandomStream,
) -> Result<ChainState, StepError>
where
    F: Fn(&Point) -> Point,
{
    assert!(gamma > 0.0, "step size must be positive");
    let z = draw_normal(rng, state.x.dim());
    let d = drift(&state.x);
    if !d.is_finite() {
        return Err(StepError::NonFiniteDrift { step: state.step_count + 1 });
    }
    finish(langevin_update(&state.x, &d, gamma, &z), state.step_count)
}

/// One step on the smoothed surrogate: the drift is
/// `grad f + (x - prox_{lam r1}(x))/lam - (x - prox_{lam r2}(x))/lam`.
pub fn moreau_ula_step(
    potential: &DcPotential,
    lam: f64,
    gamma: f64,
    state: &ChainState,
    rng: &mut RandomStream,
) -> Result<ChainState, StepError> {
    assert!(gamma > 0.0 && lam > 0.0, "parameters must be positive");
    let z = draw_normal(rng, state.x.dim());
    let (_, grad_f) = potential.f.eval_grad(&state.x);
    let drift = if potential.reg.is_zero() {
        grad_f
    } else {
        let g1 = moreau_grad(potential.reg.component(Component::R1).as_ref(), lam, &state.x)?;
        let g2 = moreau_grad(potential.reg.component(Component::R2).as_ref(), lam, &state.x)?;
        grad_f.add(&g1).sub(&g2)
    };
    if !drift.is_finite() {
        return Err(StepError::NonFiniteDrift { step: state.step_count + 1 });
    }
    finish(langevin_update(&state.x, &drift, gamma, &z), state.step_count)
}

/// One forward-backward step: gradient descent on `f`, noise, then the prox
/// of the whole regularizer.
pub fn psgla_step(
    potential: &DcPotential,
    gamma: f64,
    state: &ChainState,
    rng: &mut RandomStream,
) -> Result<ChainState, StepError> {
    assert!(gamma > 0.0, "step size must be positive");
    let z = draw_normal(rng, state.x.dim());
    let (_, grad_f) = potential.f.eval_grad(&state.x);
    if !grad_f.is_finite() {
        return Err(StepError::NonFiniteDrift { step: state.step_count + 1 });
    }
    let y = langevin_update(&state.x, &grad_f, gamma, &z);
    let x = potential.reg.full_prox(gamma, &y)?;
    finish(x, state.step_count)
}

/// One step of the DC splitting scheme, composed from elementary operators:
///
/// ```text
/// Y  = ((lam + gamma)/lam) X - gamma grad f(X)
///      - (gamma/lam) prox_{lam r2}(X) + sqrt(2 gamma) Z
/// X' = (gamma prox_{(gamma+lam) r1}(Y) + lam Y) / (gamma + lam)
/// ```
///
/// The first line is the forward step on `f - r2^lam` written through the
/// envelope-gradient identity; the second is `prox_{gamma r1^lam}(Y)`
/// written through the prox-of-envelope identity.
pub fn dcla_step(
    potential: &DcPotential,
    lam: f64,
    gamma: f64,
    state: &ChainState,
    rng: &mut RandomStream,
) -> Result<ChainState, StepError> {
    assert!(gamma > 0.0 && lam > 0.0, "parameters must be positive");
    let z = draw_normal(rng, state.x.dim());
    let (_, grad_f) = potential.f.eval_grad(&state.x);
    if !grad_f.is_finite() {
        return Err(StepError::NonFiniteDrift { step: state.step_count + 1 });
    }
    if potential.reg.is_zero() {
        // Both proxes are the identity; take the plain path so that the
        // reduction is exact rather than merely up to rounding.
        return finish(langevin_update(&state.x, &grad_f, gamma, &z), state.step_count);
    }
    let p2 = potential.reg.component_prox(Component::R2, lam, &state.x)?;
    let y = state
        .x
        .scale((lam + gamma) / lam)
        .axpy(-gamma, &grad_f)
        .axpy(-(gamma / lam), &p2)
        .axpy((2.0 * gamma).sqrt(), &z);
    if !y.is_finite() {
        return Err(StepError::NonFiniteState { step: state.step_count + 1 });
    }
    let x = prox_of_moreau(potential.reg.component(Component::R1).as_ref(), lam, gamma, &y)?;
    finish(x, state.step_count)
}

/// The same transition as [`dcla_step`] evaluated through the single
/// unrolled expression:
///
/// ```text
/// X' = X - (gamma lam / (gamma+lam)) grad f(X)
///        - (gamma / (gamma+lam)) prox_{lam r2}(X)
///        + (lam sqrt(2 gamma) / (gamma+lam)) Z
///        + (gamma / (gamma+lam)) prox_{(lam+gamma) r1}(Y)
/// ```
///
/// with the same inner `Y` as the composed form. Kept as an independent
/// route so the algebraic identity between the two can be checked.
pub fn dcla_step_unrolled(
    potential: &DcPotential,
    lam: f64,
    gamma: f64,
    state: &ChainState,
    rng: &mut RandomStream,
) -> Result<ChainState, StepError> {
    assert!(gamma > 0.0 && lam > 0.0, "parameters must be positive");
    let z = draw_normal(rng, state.x.dim());
    let (_, grad_f) = potential.f.eval_grad(&state.x);
    if !grad_f.is_finite() {
        return Err(StepError::NonFiniteDrift { step: state.step_count + 1 });
    }
    if potential.reg.is_zero() {
        return finish(langevin_update(&state.x, &grad_f, gamma, &z), state.step_count);
    }
    let p2 = potential.reg.component_prox(Component::R2, lam, &state.x)?;
    let w = gamma + lam;
    let inner = state
        .x
        .scale((lam + gamma) / lam)
        .axpy(-gamma, &grad_f)
        .axpy(-(gamma / lam), &p2)
        .axpy((2.0 * gamma).sqrt(), &z);
    if !inner.is_finite() {
        return Err(StepError::NonFiniteState { step: state.step_count + 1 });
    }
    let p1 = potential.reg.component_prox(Component::R1, w, &inner)?;
    let x = state
        .x
        .axpy(-(gamma * lam / w), &grad_f)
        .axpy(-(gamma / w), &p2)
        .axpy(lam * (2.0 * gamma).sqrt() / w, &z)
        .axpy(gamma / w, &p1);
    finish(x, state.step_count)
}

/// One step of the simplified variant for smooth `r2`:
/// `Y = X - gamma grad f(X) + gamma grad r2(X) + sqrt(2 gamma) Z`, then
/// `X' = prox_{gamma r1^lam}(Y)`.
pub fn dclas_step(
    potential: &DcPotential,
    lam: f64,
    gamma: f64,
    state: &ChainState,
    rng: &mut RandomStream,
) -> Result<ChainState, StepError> {
    assert!(gamma > 0.0 && lam > 0.0, "parameters must be positive");
    let z = draw_normal(rng, state.x.dim());
    let (_, grad_f) = potential.f.eval_grad(&state.x);
    if !grad_f.is_finite() {
        return Err(StepError::NonFiniteDrift { step: state.step_count + 1 });
    }
    let drift = match &potential.smooth_r2 {
        Some(r2) => grad_f.sub(&(r2.grad)(&state.x)),
        None if potential.reg.is_zero() => grad_f,
        None => return Err(StepError::MissingSmoothR2),
    };
    if !drift.is_finite() {
        return Err(StepError::NonFiniteDrift { step: state.step_count + 1 });
    }
    let y = langevin_update(&state.x, &drift, gamma, &z);
    if potential.reg.is_zero() {
        return finish(y, state.step_count);
    }
    if !y.is_finite() {
        return Err(StepError::NonFiniteState { step: state.step_count + 1 });
    }
    let x = prox_of_moreau(potential.reg.component(Component::R1).as_ref(), lam, gamma, &y)?;
    finish(x, state.step_count)
}

/// A bound transition kernel: scheme, potential, and step parameters.
#[derive(Clone, Debug)]
pub struct StepKernel {
    pub kind: SamplerKind,
    pub potential: Arc<DcPotential>,
    pub gamma: f64,
    pub lambda: f64,
}

impl StepKernel {
    pub fn new(
        potential: Arc<DcPotential>,
        kind: SamplerKind,
        gamma: f64,
        lambda: f64,
    ) -> Result<Self, ModelError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(ModelError::NonPositive { name: "gamma", value: gamma });
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ModelError::NonPositive { name: "lambda", value: lambda });
        }
        Ok(Self { kind, potential, gamma, lambda })
    }

    pub fn from_config(potential: Arc<DcPotential>, cfg: &SamplerConfig) -> Result<Self, ModelError> {
        cfg.validate()?;
        Self::new(potential, cfg.kind, cfg.gamma, cfg.lambda)
    }

    pub fn step(&self, state: &ChainState, rng: &mut RandomStream) -> Result<ChainState, StepError> {
        match self.kind {
            SamplerKind::Ula => {
                let p = &self.potential;
                ula_step(|x| p.subgradient_drift(x), self.gamma, state, rng)
            }
            SamplerKind::MoreauUla => {
                moreau_ula_step(&self.potential, self.lambda, self.gamma, state, rng)
            }
            SamplerKind::Psgla => psgla_step(&self.potential, self.gamma, state, rng),
            SamplerKind::DcLa => dcla_step(&self.potential, self.lambda, self.gamma, state, rng),
            SamplerKind::DcLaS => dclas_step(&self.potential, self.lambda, self.gamma, state, rng),
        }
    }

    /// Step-size advisory: when the theoretical bound is computable and the
    /// configured step exceeds it, describe by how much. The schemes are
    /// routinely run above the bound, so this is a warning, never an error.
    pub fn stepsize_advisory(&self) -> Option<String> {
        let variant = match self.kind {
            SamplerKind::DcLa => StepSizeVariant::DcLa,
            SamplerKind::DcLaS => {
                let l_r2 = self.potential.smooth_r2.as_ref()?.l_r2;
                StepSizeVariant::DcLaS { l_r2 }
            }
            _ => return None,
        };
        let constants = self.potential.dissipativity_constants().ok()?;
        let bound = max_stepsize(1, constants.mu, self.lambda, self.potential.f.l_f(), variant);
        if self.gamma > bound {
            Some(format!(
                "gamma = {} exceeds the q=1 theoretical bound {:.3e}",
                self.gamma, bound
            ))
        } else {
            None
        }
    }
}

/// Final states of a lenient multi-chain run: diverged chains are `None`.
#[derive(Debug)]
pub struct ChainsOutcome {
    pub finals: Vec<Option<Point>>,
    pub n_nonfinite: usize,
}

fn run_one_chain(
    kernel: &StepKernel,
    n_steps: usize,
    seed: u64,
    chain: usize,
    init: &Point,
) -> Result<Point, StepError> {
    let mut rng = RandomStream::new(seed, chain as u64);
    let mut state = ChainState::new(init.clone());
    for _ in 0..n_steps {
        state = kernel.step(&state, &mut rng)?;
    }
    Ok(state.x)
}

/// Runs `n_chains` independent chains of `n_steps` steps from a common
/// deterministic start and returns the final state of each.
///
/// Chain `i` draws from `RandomStream::new(seed, i)`, so the output is
/// independent of scheduling order and worker count. The first diverging
/// chain aborts the run with its index attached.
pub fn run_chains(
    kernel: &StepKernel,
    n_chains: usize,
    n_steps: usize,
    seed: u64,
    init: &Point,
) -> Result<Vec<Point>, SamplerError> {
    if let Some(msg) = kernel.stepsize_advisory() {
        log::warn!("{msg}");
    }
    let results: Vec<Result<Point, StepError>> = (0..n_chains)
        .into_par_iter()
        .map(|chain| run_one_chain(kernel, n_steps, seed, chain, init))
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(chain, r)| r.map_err(|source| SamplerError { chain, source }))
        .collect()
}

/// Lenient variant: diverged chains are dropped and counted instead of
/// failing the run. Used by parameter sweeps whose extreme corners are
/// expected to blow up.
pub fn run_chains_collect(
    kernel: &StepKernel,
    n_chains: usize,
    n_steps: usize,
    seed: u64,
    init: &Point,
) -> ChainsOutcome {
    let finals: Vec<Option<Point>> = (0..n_chains)
        .into_par_iter()
        .map(|chain| run_one_chain(kernel, n_steps, seed, chain, init).ok())
        .collect();
    let n_nonfinite = finals.iter().filter(|f| f.is_none()).count();
    ChainsOutcome { finals, n_nonfinite }
}

/// Runs one chain and keeps every state after the burn-in period.
pub fn run_single_chain(
    kernel: &StepKernel,
    n_steps: usize,
    burn_in: usize,
    seed: u64,
    init: &Point,
) -> Result<Vec<Point>, SamplerError> {
    if let Some(msg) = kernel.stepsize_advisory() {
        log::warn!("{msg}");
    }
    let mut rng = RandomStream::new(seed, 0);
    let mut state = ChainState::new(init.clone());
    let mut kept = Vec::with_capacity(n_steps.saturating_sub(burn_in));
    for step in 0..n_steps {
        state = kernel
            .step(&state, &mut rng)
            .map_err(|source| SamplerError { chain: 0, source })?;
        if step >= burn_in {
            kept.push(state.x.clone());
        }
    }
    Ok(kept)
}
