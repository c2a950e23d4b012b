use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use atcg_core::algorithms::{Algorithm, GradientMode};
use atcg_core::comm::{eta_stats_from_traces, expected_comm_bound};
use atcg_core::curvature::total_curvature;
use atcg_core::io::{
    build_instance, gen_synthetic, load_stats, run_experiment, run_trace, write_embeddings, write_stats,
    ExperimentConfig, SyntheticSpec,
};
use clap::{Args, Parser, Subcommand};

const CONFIG_FIELDS: &str = "\
CONFIG FILE
  A single flat JSON object. Unknown fields are rejected.

  objective               facility_rbf | facility_rating | modular | coverage (required)
  data_path               embeddings CSV `id,f0,..` (ratings CSV `user,item,rating`
                          for facility_rating)
  clusters                synthetic data: number of Gaussian blobs
  points_per_cluster      synthetic data: points per blob
  dim                     synthetic data: embedding dimension
  cluster_spread          synthetic data: per-coordinate standard deviation
  inter_cluster_distance  synthetic data: minimum distance between blob centres
  data_seed               synthetic data seed (default: seed)
  weights                 modular objective: one weight per element
  partition_sizes         block sizes of the ground set (default: one per cluster)
  budgets                 per-partition budgets kappa_i (default: all 1)
  algorithm               sg | cg | atcg | atcg_general (default: atcg)
  T                       number of iterations (default: 100)
  tau                     expansion threshold in (0, 1] (default: 0.5)
  K                       Monte Carlo samples per gradient (default: 100)
  seed                    master seed (default: 0)
  gradient_mode           exact | monte_carlo (default: monte_carlo)
  sigma                   RBF bandwidth for facility_rbf (default: 1.0)
  coverage_radius         coverage objective: covering radius
  output_dir              directory for run outputs (default: out)

  Exactly one data source is allowed: data_path, the synthetic fields, or weights.

OUTPUTS (run)
  trajectory.csv     t,F_value
  communication.csv  t,cum_embeddings
  active.csv         t,total_active,eta_min
  summary.json       final_F, rounded_set, rounded_value, C_T, tau, T, K, seed,
                     c_total, c_partition";

/// Submodular maximization over partition matroids with continuous greedy
/// and adaptive thresholded continuous greedy.
#[derive(Parser)]
#[command(name = "atcg", version, after_long_help = CONFIG_FIELDS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic embeddings CSV of Gaussian blobs.
    Gen(GenArgs),
    /// Run one experiment and write its CSV and JSON outputs.
    #[command(after_long_help = CONFIG_FIELDS)]
    Run(RunArgs),
    /// Run the experiment for several thresholds, one output directory each.
    #[command(after_long_help = CONFIG_FIELDS)]
    Sweep(SweepArgs),
    /// Print the curvature report of the configured objective as JSON.
    Curvature(CurvatureArgs),
    /// Evaluate the expected-communication bound.
    Bound(BoundArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 6)]
    clusters: usize,
    #[arg(long, default_value_t = 30)]
    points_per_cluster: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    cluster_spread: f64,
    #[arg(long, default_value_t = 4.0)]
    inter_cluster_distance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Overrides {
    /// Experiment config (flat JSON; see `atcg run --help`).
    #[arg(long)]
    config: PathBuf,
    #[arg(long = "T")]
    horizon: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "K")]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// sg | cg | atcg | atcg_general
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// exact | monte_carlo
    #[arg(long)]
    gradient_mode: Option<GradientMode>,
    /// RBF bandwidth.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl Overrides {
    fn load(&self) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(&self.config)
            .with_context(|| format!("reading config {}", self.config.display()))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", self.config.display()))?;
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.tau {
            cfg.tau = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.algorithm {
            cfg.algorithm = v;
        }
        if let Some(v) = self.gradient_mode {
            cfg.gradient_mode = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = &self.output_dir {
            cfg.output_dir = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Comma-separated thresholds.
    #[arg(long, value_delimiter = ',', required = true)]
    taus: Vec<f64>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct BoundArgs {
    /// Statistics CSV `partition,t,eta_bar,sigma`.
    #[arg(long, conflicts_with_all = ["config", "runs", "emit_stats"])]
    stats: Option<PathBuf>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "T")]
    horizon: Option<usize>,
    /// Number of partitions.
    #[arg(long = "N")]
    agents: Option<usize>,
    /// Estimate the statistics from repeated runs of this config instead.
    #[arg(long, requires = "runs")]
    config: Option<PathBuf>,
    /// Number of seeded runs (seeds `seed .. seed + runs`).
    #[arg(long)]
    runs: Option<usize>,
    /// Write the estimated statistics to this CSV.
    #[arg(long)]
    emit_stats: Option<PathBuf>,
}

fn gen(args: GenArgs) -> Result<()> {
    let spec = SyntheticSpec {
        clusters: args.clusters,
        points_per_cluster: args.points_per_cluster,
        dim: args.dim,
        cluster_spread: args.cluster_spread,
        inter_cluster_distance: args.inter_cluster_distance,
        seed: args.seed,
    };
    let emb = gen_synthetic(&spec)?;
    match args.out {
        Some(path) => {
            let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_embeddings(&emb, std::io::BufWriter::new(file))?;
        }
        None => write_embeddings(&emb, std::io::stdout().lock())?,
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = args.overrides.load()?;
    let out = run_experiment(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&out.summary)?);
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let base = args.overrides.load()?;
    let configs: Vec<ExperimentConfig> = args
        .taus
        .iter()
        .map(|&tau| {
            let mut cfg = base.clone();
            cfg.tau = tau;
            cfg.output_dir = base.output_dir.join(format!("tau_{tau}"));
            cfg.validate().map(|_| cfg)
        })
        .collect::<Result<_, _>>()?;
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|cfg| s.spawn(move || run_experiment(cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    println!("tau,C_T,rounded_value,final_F,output_dir");
    for (cfg, res) in configs.iter().zip(results) {
        let out = res.with_context(|| format!("tau = {}", cfg.tau))?;
        println!(
            "{},{},{},{},{}",
            cfg.tau,
            out.summary.c_t,
            out.summary.rounded_value,
            out.summary.final_f,
            cfg.output_dir.display()
        );
    }
    Ok(())
}

fn curvature(args: CurvatureArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let inst = build_instance(&cfg)?;
    let report = total_curvature(inst.objective.as_ref(), inst.matroid.ground())?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn bound(args: BoundArgs) -> Result<()> {
    if let Some(path) = &args.stats {
        let (Some(tau), Some(horizon), Some(agents)) = (args.tau, args.horizon, args.agents) else {
            bail!("--stats needs --tau, --T and --N");
        };
        let stats = load_stats(path)?;
        println!("{}", expected_comm_bound(&stats, tau, horizon, agents)?);
        return Ok(());
    }
    let (Some(path), Some(runs)) = (&args.config, args.runs) else {
        bail!("give either --stats or --config with --runs");
    };
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(tau) = args.tau {
        cfg.tau = tau;
    }
    if let Some(horizon) = args.horizon {
        cfg.horizon = horizon;
    }
    cfg.validate()?;
    if !cfg.algorithm.is_thresholded() {
        bail!("the bound applies to thresholded algorithms (atcg, atcg_general)");
    }
    let inst = build_instance(&cfg)?;
    let agents = inst.matroid.ground().num_partitions();
    if args.agents.is_some_and(|n| n != agents) {
        bail!("--N disagrees with the config's {agents} partitions");
    }
    let traces = (0..runs as u64)
        .map(|r| {
            let mut c = cfg.clone();
            c.seed = cfg.seed.wrapping_add(r);
            run_trace(&c, &inst)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let stats = eta_stats_from_traces(&traces)?;
    if let Some(out) = &args.emit_stats {
        let file = std::fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
        write_stats(&stats, std::io::BufWriter::new(file))?;
    }
    let value = expected_comm_bound(&stats, cfg.tau, cfg.horizon, agents)?;
    let observed = traces.iter().map(|t| t.final_embeddings() as f64).sum::<f64>() / runs as f64;
    let report = serde_json::json!({
        "bound": value,
        "observed_mean_C_T": observed,
        "runs": runs,
        "tau": cfg.tau,
        "T": cfg.horizon,
        "N": agents,
        "floored_partitions": stats.floored,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Curvature(a) => curvature(a),
        Command::Bound(a) => bound(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
