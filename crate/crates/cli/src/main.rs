use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use nlqn::experiments::{
    self, bound_check, consistency_check, exp1_angles, exp2_benchmark, exp3_siam,
    success_fraction, ConsistencyConfig, Exp1Config, Exp2Config, Exp3Config,
};
use nlqn::objectives::{by_name, check_gradient, ObjectiveError, RastriginModel, REGISTRY};
use nlqn::optimizer::{nlqn_run, write_trace_csv, NlqnConfig};
use nlqn::output::{derive_seed, fmt_float, write_csv};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Non-local quasi-Newton optimization: experiments and verification suites.
#[derive(Debug, Parser)]
#[command(name = "nlqn", version)]
struct Cli {
    /// Output directory for CSV artifacts.
    #[arg(long, global = true, env = "NLQN_OUT", default_value = "results")]
    out: PathBuf,
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// σ₀ = 10, k = 3n, γ = 1/2, starts in [−10, 10]ⁿ.
    Benchmark,
    /// σ₀ = 1, k = 3, γ = 10/11, 30000 evaluations, starts in [−100, 100]ⁿ.
    Siam,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one optimization and write its trace.
    Optimize {
        /// Objective: levy, salomon, rcigar, rcigar-noff or siam.
        #[arg(long)]
        func: String,
        /// Dimension; defaults to 50, or 2 for `siam`.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, value_enum, default_value_t = Preset::Benchmark)]
        preset: Preset,
        /// Initial scaling; overrides the preset.
        #[arg(long)]
        sigma0: Option<f64>,
        /// Gradient samples per iteration; overrides the preset.
        #[arg(long)]
        k: Option<usize>,
        /// Evaluation budget [default: 100000, or 30000 for the siam preset].
        #[arg(long)]
        budget: Option<u64>,
        /// Half-width of the box the initial point is drawn from.
        #[arg(long)]
        init_half_width: Option<f64>,
        /// Always move to the best linesearch candidate, even when it is
        /// worse than the current iterate.
        #[arg(long)]
        literal_linesearch: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Angles of estimated descent directions (writes exp1.csv).
    Exp1 {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        dim: usize,
        #[arg(long, default_value_t = 30)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// NLQN against restarted BFGS on levy, salomon and rcigar (writes exp2.csv).
    Exp2 {
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 50)]
        dim: usize,
        #[arg(long, value_delimiter = ',', default_value = "levy,salomon,rcigar")]
        funcs: Vec<String>,
        #[arg(long)]
        literal_linesearch: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Repeated runs on the two-dimensional challenge function (writes exp3.csv).
    Exp3 {
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 30_000)]
        budget: u64,
        #[arg(long)]
        literal_linesearch: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the residual bound on random Rastrigin-type models.
    CheckBound {
        #[arg(long, default_value_t = 20)]
        models: usize,
        #[arg(long, default_value_t = 1_000_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check that fitted curvature approaches the quadratic part as σ grows.
    CheckConsistency {
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare every objective's gradient with central finite differences.
    CheckGradients {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Dimension for the scalable objectives.
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failure kinds that map to distinct exit codes.
enum Failure {
    /// Bad user input: exit 2.
    Usage(String),
    /// A verification suite found a violation: exit 1.
    Check(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<ObjectiveError>() {
            Some(oe @ ObjectiveError::Unknown { .. }) => Failure::Usage(oe.to_string()),
            Some(oe @ ObjectiveError::Dimension { .. }) => Failure::Usage(oe.to_string()),
            _ => Failure::Other(e),
        }
    }
}

impl From<ObjectiveError> for Failure {
    fn from(e: ObjectiveError) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

impl From<experiments::ExperimentError> for Failure {
    fn from(e: experiments::ExperimentError) -> Self {
        match e {
            experiments::ExperimentError::Objective(oe) => oe.into(),
            experiments::ExperimentError::Config(m) => Failure::Usage(m),
            other => Failure::Other(other.into()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must be positive, got {v}")))
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Optimize {
            func,
            dim,
            preset,
            sigma0,
            k,
            budget,
            init_half_width,
            literal_linesearch,
            seed,
        } => {
            let n = dim.unwrap_or(if func == "siam" { 2 } else { 50 });
            let objective = by_name(func, n)?;
            let (base, half_width) = match preset {
                Preset::Benchmark => (NlqnConfig::benchmark(n), 10.0),
                Preset::Siam => (NlqnConfig::siam(), 100.0),
            };
            let half_width = init_half_width.unwrap_or(half_width);
            positive("init-half-width", half_width)?;
            let cfg = NlqnConfig {
                sigma0: sigma0.unwrap_or(base.sigma0),
                k: k.unwrap_or(base.k),
                budget: Some(budget.or(base.budget).unwrap_or(100_000)),
                keep_incumbent: !literal_linesearch,
                seed: derive_seed(*seed, 1),
                ..base
            };
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let x0 = experiments::uniform_box(&mut rng, n, half_width);
            let res = nlqn_run(objective.as_ref(), &x0, &cfg).context("optimization failed")?;
            let path = out.join(format!("optimize_{func}.csv"));
            write_trace_csv(&path, &res)?;
            println!(
                "{func} n={n}: best f {} after {} evaluations ({} iterations, stop: {:?})",
                fmt_float(res.best_f),
                res.evals.total(),
                res.trace.len(),
                res.stop
            );
            println!("trace written to {}", path.display());
        }
        Command::Exp1 { trials, dim, k, seed } => {
            let recs = exp1_angles(&Exp1Config {
                trials: *trials,
                dim: *dim,
                k: *k,
                seed: *seed,
                ..Default::default()
            })?;
            let path = out.join("exp1.csv");
            experiments::write_angles_csv(&path, &recs)?;
            println!("{} angle records written to {}", recs.len(), path.display());
        }
        Command::Exp2 {
            runs,
            budget,
            dim,
            funcs,
            literal_linesearch,
            seed,
        } => {
            let results = exp2_benchmark(&Exp2Config {
                runs: *runs,
                budget: *budget,
                dim: *dim,
                functions: funcs.clone(),
                keep_incumbent: !literal_linesearch,
                seed: *seed,
                ..Default::default()
            })?;
            experiments::write_benchmark_csv(&out.join("exp2.csv"), &results)?;
            experiments::write_benchmark_summary(&out.join("exp2_summary.csv"), &results)?;
            for func in funcs {
                for algo in experiments::Algorithm::ALL {
                    let v = experiments::final_values(&results, algo, func);
                    println!(
                        "{func:8} {:6} median best f {}",
                        algo.as_str(),
                        fmt_float(experiments::stats::median(&v))
                    );
                }
            }
            println!("traces written to {}", out.join("exp2.csv").display());
        }
        Command::Exp3 {
            runs,
            budget,
            literal_linesearch,
            seed,
        } => {
            let results = exp3_siam(&Exp3Config {
                runs: *runs,
                budget: *budget,
                keep_incumbent: !literal_linesearch,
                seed: *seed,
                ..Default::default()
            })?;
            experiments::write_siam_csv(&out.join("exp3.csv"), &results)?;
            experiments::write_siam_summary(&out.join("exp3_summary.csv"), &results)?;
            let successes = results.iter().filter(|r| r.success).count();
            println!(
                "{successes}/{} runs reached {} (success fraction {:.2})",
                results.len(),
                fmt_float(experiments::SIAM_TARGET),
                success_fraction(&results)
            );
        }
        Command::CheckBound {
            models,
            mc_samples,
            seed,
        } => check_bound(out, *models, *mc_samples, *seed)?,
        Command::CheckConsistency { seeds, seed } => check_consistency(out, *seeds, *seed)?,
        Command::CheckGradients { trials, dim, seed } => check_gradients(out, *trials, *dim, *seed)?,
    }
    Ok(())
}

const BOUND_SIGMAS: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

fn check_bound(out: &Path, models: usize, mc_samples: usize, seed: u64) -> Result<(), Failure> {
    if mc_samples < 2 {
        return Err(Failure::Usage("--mc-samples must be at least 2".into()));
    }
    let mut violations = Vec::new();
    for i in 0..models {
        let model_seed = derive_seed(seed, i as u64);
        // Sizes cycle through n ≤ 5 and m ≤ 8.
        let n = 1 + i % 5;
        let m = 1 + (i * 3) % 8;
        let model = RastriginModel::random(n, m, model_seed)?;
        let records = bound_check(&model, &BOUND_SIGMAS, mc_samples, derive_seed(model_seed, 1));
        experiments::write_bound_csv(&out.join(format!("bound_model{i:02}.csv")), &records)?;
        for r in &records {
            let status = if r.within_bound() && r.mc_agrees() { "ok" } else { "VIOLATION" };
            println!(
                "model {i:2} (n={n}, m={m}) σ={:<4} exact {:.6e} bound {:.6e} mc {:.6e} ± {:.1e} {status}",
                r.sigma, r.exact, r.bound, r.mc_estimate, r.mc_std_error
            );
            if !r.within_bound() {
                violations.push(format!("model {i} σ={}: exact above bound", r.sigma));
            }
            if !r.mc_agrees() {
                violations.push(format!("model {i} σ={}: Monte-Carlo off by > 5 s.e.", r.sigma));
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(violations.join("; ")))
    }
}

fn check_consistency(out: &Path, seeds: usize, seed: u64) -> Result<(), Failure> {
    let report = consistency_check(&ConsistencyConfig {
        seeds,
        seed,
        ..Default::default()
    })?;
    experiments::write_consistency_csv(&out.join("consistency.csv"), &report)?;
    for (s, m) in &report.medians {
        println!("σ = {s:e}: median relative curvature error {m:.4e}");
    }
    let exact = consistency_check(&ConsistencyConfig {
        seeds,
        seed,
        amplitude: 0.0,
        ..Default::default()
    })?;
    let worst = exact.records.iter().map(|r| r.error).fold(0.0, f64::max);
    println!("undisturbed quadratic: max relative curvature error {worst:.2e}");
    let mut problems = Vec::new();
    if !report.ordering_holds() {
        problems.push("median error at the largest σ is not below the smallest σ".to_string());
    }
    if worst > 1e-6 {
        problems.push(format!("undisturbed quadratic error {worst:e} exceeds 1e-6"));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(problems.join("; ")))
    }
}

fn check_gradients(out: &Path, trials: usize, dim: usize, seed: u64) -> Result<(), Failure> {
    if trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for name in REGISTRY {
        let n = if *name == "siam" { 2 } else { dim };
        let f = by_name(name, n)?;
        let err = match check_gradient(f.as_ref(), trials, seed) {
            Ok(report) => report.max_rel_error,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                f64::NAN
            }
        };
        let ok = err <= 1e-5;
        println!("{name:12} n={n:3} max relative error {err:.3e} {}", if ok { "ok" } else { "FAIL" });
        if !ok && !err.is_nan() {
            failures.push(format!("{name}: {err:e} > 1e-5"));
        }
        rows.push(vec![name.to_string(), n.to_string(), fmt_float(err)]);
    }
    write_csv(out.join("gradients.csv"), &["func", "dim", "max_rel_error"], rows)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}
