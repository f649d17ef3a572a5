//! Command-line entry point: experiment runs, ablation sweeps, the
//! brute-force prox check, and the step-size calculator.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dcla::harness::{run_ablation, run_experiment, ExperimentConfig};
use dcla::oracle::prox_check_report;
use dcla::potentials::{max_stepsize, StepSizeVariant};

#[derive(Parser)]
#[command(name = "dcla", about = "Langevin sampling for difference-of-convex potentials", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured samplers and emit samples, histograms, and metrics.
    Run(RunArgs),
    /// Sweep (lambda, gamma) for the first configured sampler.
    Ablate(AblateArgs),
    /// Cross-check every proximal operator against grid brute force.
    ProxCheck,
    /// Print the theoretical step-size bound for a Wasserstein order.
    Stepsize(StepsizeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated smoothing parameters.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct StepsizeArgs {
    /// Wasserstein order.
    #[arg(long)]
    q: u32,
    /// Dissipativity modulus.
    #[arg(long)]
    mu: f64,
    /// Smoothing parameter.
    #[arg(long)]
    lambda: f64,
    /// Smoothness constant of f.
    #[arg(long)]
    lf: f64,
    /// Smoothness constant of r2; selects the simplified-scheme bound.
    #[arg(long)]
    lr2: Option<f64>,
}

fn init_thread_pool() -> Result<()> {
    if let Ok(v) = std::env::var("DCLA_THREADS") {
        let n: usize = v.parse().context("DCLA_THREADS must be an integer")?;
        if n == 0 {
            bail!("DCLA_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool init")?;
    }
    Ok(())
}

fn load_config(path: &PathBuf, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_path(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_thread_pool()?;
    match Cli::parse().command {
        Command::Run(args) => {
            let cfg = load_config(&args.config, args.seed)?;
            let report = run_experiment(&cfg, &args.out)?;
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            for w in &report.metrics.warnings {
                eprintln!("warning: {w}");
            }
            for (name, m) in &report.metrics.samplers {
                let kl: Vec<String> = m.kl.iter().map(|(r, v)| format!("{r}x{r}: {v:.5}")).collect();
                println!("{name}: kl {{{}}} ({} ms)", kl.join(", "), m.wall_ms);
            }
        }
        Command::Ablate(args) => {
            let cfg = load_config(&args.config, args.seed)?;
            let report = run_ablation(&cfg, &args.lambda, &args.gamma, &args.out)?;
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            println!("{} grid cells", report.rows.len());
        }
        Command::ProxCheck => {
            println!("max |operator - grid argmin| over 200 random cases each:");
            let mut worst = 0.0f64;
            for line in prox_check_report(200, 20_240_601) {
                println!("  {:<34} {:.3e}", line.name, line.max_deviation);
                worst = worst.max(line.max_deviation);
            }
            println!("worst: {worst:.3e} (tolerance 1e-4)");
            if worst > 1e-4 {
                bail!("prox check failed");
            }
        }
        Command::Stepsize(args) => {
            let variant = match args.lr2 {
                Some(l_r2) => StepSizeVariant::DcLaS { l_r2 },
                None => StepSizeVariant::DcLa,
            };
            let bound = max_stepsize(args.q, args.mu, args.lambda, args.lf, variant);
            let name = match variant {
                StepSizeVariant::DcLa => "dcla",
                StepSizeVariant::DcLaS { .. } => "dclas",
            };
            println!(
                "{name} q={} mu={} lambda={} L_f={}{} -> gamma_max = {bound:.6e}",
                args.q,
                args.mu,
                args.lambda,
                args.lf,
                args.lr2.map(|l| format!(" L_r2={l}")).unwrap_or_default(),
            );
        }
    }
    Ok(())
}
