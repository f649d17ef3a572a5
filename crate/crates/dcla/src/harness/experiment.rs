//! Experiment orchestration: single runs, baseline comparisons, and
//! `(lambda, gamma)` ablation grids, with CSV/JSON emission.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::diagnostics::{binned_kl, grid_edges, histogram2d, normalize_density, target_hist, Histogram2D};
use crate::error::{DiagnosticsError, SamplerError};
use crate::harness::config::{ConfigError, ExperimentConfig, ModeSpec, ResolvedExperiment};
use crate::point::Point;
use crate::samplers::{run_chains, run_chains_collect, run_single_chain, SamplerKind, StepKernel};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("ablation grids must be non-empty")]
    EmptyGrid,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

/// Per-sampler results recorded in `metrics.json`.
#[derive(Debug, Serialize)]
pub struct SamplerMetrics {
    /// Binned KL against the quadrature target, per bin resolution.
    pub kl: BTreeMap<usize, f64>,
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    pub n_samples: usize,
    pub n_outside: usize,
    pub wall_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct Metrics {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub z: f64,
    pub warnings: Vec<String>,
    pub samplers: BTreeMap<String, SamplerMetrics>,
    pub wall_ms_total: u128,
}

/// Outcome of [`run_experiment`]: the metrics plus the emitted files.
#[derive(Debug)]
pub struct RunReport {
    pub metrics: Metrics,
    pub files: Vec<PathBuf>,
}

fn write_samples_csv(path: &Path, samples: &[Point]) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for s in samples {
        let row = s
            .as_slice()
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{row}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn write_hist_csv(path: &Path, hist: &Histogram2D) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    hist.write_csv(&mut w).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))?;
    Ok(())
}

struct TargetGrids {
    /// Resolution -> (x edges, y edges, binned target).
    by_resolution: BTreeMap<usize, (Vec<f64>, Vec<f64>, Histogram2D)>,
}

fn build_targets(resolved: &ResolvedExperiment, z: f64) -> Result<TargetGrids, HarnessError> {
    let hist = &resolved.config.histogram;
    let mut resolutions: Vec<usize> = hist.bin_sweep.clone();
    if !resolutions.contains(&hist.bins) {
        resolutions.push(hist.bins);
    }
    let mut by_resolution = BTreeMap::new();
    for res in resolutions {
        let ex = grid_edges(resolved.bounds.x.0, resolved.bounds.x.1, res);
        let ey = grid_edges(resolved.bounds.y.0, resolved.bounds.y.1, res);
        let target = target_hist(&resolved.potential, z, &ex, &ey, hist.quad_order)?;
        by_resolution.insert(res, (ex, ey, target));
    }
    Ok(TargetGrids { by_resolution })
}

/// Runs every configured sampler against the target, writes
/// `samples_<kind>.csv`, `hist_<kind>.csv`, `target_hist.csv`, and
/// `metrics.json` into `out_dir`, and returns the metrics.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport, HarnessError> {
    let t_total = Instant::now();
    let resolved = cfg.resolve()?;
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut files = Vec::new();
    let mut warnings = Vec::new();

    let z = normalize_density(&resolved.potential, resolved.bounds, resolved.config.histogram.quad_tol)?;
    let targets = build_targets(&resolved, z)?;

    let primary = resolved.config.histogram.bins;
    let target_path = out_dir.join("target_hist.csv");
    write_hist_csv(&target_path, &targets.by_resolution[&primary].2)?;
    files.push(target_path);

    let potential = Arc::new(resolved.potential);
    let mut samplers = BTreeMap::new();
    for &kind in &resolved.config.samplers {
        let t_sampler = Instant::now();
        let kernel = StepKernel::new(
            potential.clone(),
            kind,
            resolved.config.gamma,
            resolved.config.lambda,
        )
        .map_err(ConfigError::from)?;
        if let Some(msg) = kernel.stepsize_advisory() {
            warnings.push(format!("{}: {msg}", kind.name()));
        }
        let samples = match resolved.config.mode {
            ModeSpec::MultiChainLast => run_chains(
                &kernel,
                resolved.config.n_chains,
                resolved.config.n_steps,
                resolved.config.seed,
                &resolved.init,
            )?,
            ModeSpec::SingleChainBurnIn { burn_in } => run_single_chain(
                &kernel,
                resolved.config.n_steps,
                burn_in,
                resolved.config.seed,
                &resolved.init,
            )?,
        };
        let wall_ms = t_sampler.elapsed().as_millis();

        let samples_path = out_dir.join(format!("samples_{}.csv", kind.name()));
        write_samples_csv(&samples_path, &samples)?;
        files.push(samples_path);

        let mut kl = BTreeMap::new();
        let mut n_outside = 0;
        for (&res, (ex, ey, target)) in &targets.by_resolution {
            let (hist, outside) = histogram2d(&samples, ex, ey)?;
            kl.insert(res, binned_kl(&hist, target)?);
            if res == primary {
                n_outside = outside;
                let hist_path = out_dir.join(format!("hist_{}.csv", kind.name()));
                write_hist_csv(&hist_path, &hist)?;
                files.push(hist_path);
            }
        }
        let (mean, cov) = crate::diagnostics::sample_moments(&samples)?;
        let d = mean.dim();
        samplers.insert(
            kind.name().to_string(),
            SamplerMetrics {
                kl,
                mean: mean.as_slice().to_vec(),
                cov: (0..d).map(|i| (0..d).map(|j| cov[(i, j)]).collect()).collect(),
                n_samples: samples.len(),
                n_outside,
                wall_ms,
            },
        );
    }

    let metrics = Metrics {
        schema_version: crate::harness::config::SCHEMA_VERSION,
        config: resolved.config,
        z,
        warnings,
        samplers,
        wall_ms_total: t_total.elapsed().as_millis(),
    };
    let metrics_path = out_dir.join("metrics.json");
    let file = File::create(&metrics_path).map_err(io_err(&metrics_path))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &metrics)
        .map_err(|e| HarnessError::Io { path: metrics_path.display().to_string(), source: e.into() })?;
    files.push(metrics_path);

    Ok(RunReport { metrics, files })
}

/// One row of the ablation sweep.
#[derive(Clone, Debug, Serialize)]
pub struct AblationRow {
    pub lambda: f64,
    pub gamma: f64,
    pub binned_kl: f64,
    pub n_nonfinite_chains: usize,
}

#[derive(Debug)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
    pub files: Vec<PathBuf>,
}

/// Sweeps `(lambda, gamma)` for the first configured sampler, dropping and
/// counting diverged chains, and writes `ablation.csv` plus a metadata JSON
/// with the resolved configuration.
pub fn run_ablation(
    cfg: &ExperimentConfig,
    lambda_grid: &[f64],
    gamma_grid: &[f64],
    out_dir: &Path,
) -> Result<AblationReport, HarnessError> {
    if lambda_grid.is_empty() || gamma_grid.is_empty() {
        return Err(HarnessError::EmptyGrid);
    }
    let resolved = cfg.resolve()?;
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let kind: SamplerKind = resolved.config.samplers[0];

    let z = normalize_density(&resolved.potential, resolved.bounds, resolved.config.histogram.quad_tol)?;
    let res = resolved.config.histogram.bins;
    let ex = grid_edges(resolved.bounds.x.0, resolved.bounds.x.1, res);
    let ey = grid_edges(resolved.bounds.y.0, resolved.bounds.y.1, res);
    let target = target_hist(&resolved.potential, z, &ex, &ey, resolved.config.histogram.quad_order)?;

    let potential = Arc::new(resolved.potential);
    let mut rows = Vec::with_capacity(lambda_grid.len() * gamma_grid.len());
    for &lambda in lambda_grid {
        for &gamma in gamma_grid {
            let kernel = StepKernel::new(potential.clone(), kind, gamma, lambda)
                .map_err(ConfigError::from)?;
            let outcome = run_chains_collect(
                &kernel,
                resolved.config.n_chains,
                resolved.config.n_steps,
                resolved.config.seed,
                &resolved.init,
            );
            let survivors: Vec<Point> = outcome.finals.into_iter().flatten().collect();
            let kl = if survivors.is_empty() {
                f64::NAN
            } else {
                let (hist, _) = histogram2d(&survivors, &ex, &ey)?;
                binned_kl(&hist, &target)?
            };
            rows.push(AblationRow {
                lambda,
                gamma,
                binned_kl: kl,
                n_nonfinite_chains: outcome.n_nonfinite,
            });
        }
    }

    let csv_path = out_dir.join("ablation.csv");
    {
        let file = File::create(&csv_path).map_err(io_err(&csv_path))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "lambda,gamma,binned_kl,n_nonfinite_chains").map_err(io_err(&csv_path))?;
        for r in &rows {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{}",
                r.lambda, r.gamma, r.binned_kl, r.n_nonfinite_chains
            )
            .map_err(io_err(&csv_path))?;
        }
        w.flush().map_err(io_err(&csv_path))?;
    }

    #[derive(Serialize)]
    struct AblationMeta<'a> {
        schema_version: u32,
        config: &'a ExperimentConfig,
        sampler: &'a str,
        bins: usize,
        z: f64,
        lambda_grid: &'a [f64],
        gamma_grid: &'a [f64],
    }
    let meta_path = out_dir.join("ablation_meta.json");
    let file = File::create(&meta_path).map_err(io_err(&meta_path))?;
    serde_json::to_writer_pretty(
        BufWriter::new(file),
        &AblationMeta {
            schema_version: crate::harness::config::SCHEMA_VERSION,
            config: &resolved.config,
            sampler: kind.name(),
            bins: res,
            z,
            lambda_grid,
            gamma_grid,
        },
    )
    .map_err(|e| HarnessError::Io { path: meta_path.display().to_string(), source: e.into() })?;

    Ok(AblationReport { rows, files: vec![csv_path, meta_path] })
}
