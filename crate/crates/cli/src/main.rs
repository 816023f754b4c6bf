use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use tiesim_core::experiment::{self, ExperimentConfig, Scenario};
use tiesim_core::{io, Error, IdentitySpace};

const EXIT_VIOLATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tiesim",
    version,
    about = "Friendship formation under tie outreach and capacity limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every (case, scenario, trial) of a configuration and write CSV tables.
    Sweep(SweepArgs),
    /// Run one simulation and print its trial record.
    Single(SingleArgs),
    /// Audit an agent list and edge list against every network invariant.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON configuration; missing fields take the preset's values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Built-in configuration used when no file is given.
    #[arg(long, default_value = "paper", conflicts_with = "config")]
    preset: String,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        match &self.config {
            Some(path) => ExperimentConfig::load(path),
            None => ExperimentConfig::preset(&self.preset),
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Base seed; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the configuration (default: results).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; overrides the configuration.
    #[arg(long)]
    workers: Option<usize>,
    /// Also write agents_<id>.csv and edges_<id>.csv for every trial.
    #[arg(long)]
    export_edges: bool,
}

#[derive(Debug, Args)]
struct SingleArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long = "case", value_name = "ID")]
    case_id: u32,
    #[arg(long)]
    scenario: Scenario,
    #[arg(long)]
    seed: u64,
    /// Write agents_<id>.csv and edges_<id>.csv.
    #[arg(long)]
    export_edges: bool,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, value_name = "FILE")]
    edges: PathBuf,
    #[arg(long, value_name = "FILE")]
    agents: PathBuf,
    /// Comma-separated identity weights.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    weights: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Single(args) => single(args),
        Command::Validate(args) => validate(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let mut config = args.config.load()?;
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    if let Some(workers) = args.workers {
        config.workers = Some(workers);
    }
    config.export_edges |= args.export_edges;
    let out = args
        .out
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("results"));

    let started = Instant::now();
    let output = experiment::run_sweep(&config, &out)?;
    eprintln!(
        "{} simulations in {:.2?}, tables written to {}",
        output.trials.len(),
        started.elapsed(),
        out.display()
    );
    println!("case scenario   trials  similarity (sd)     hetero%  dyads     satisfied%");
    for s in &output.summaries {
        println!(
            "{:<4} {:<10} {:<7} {:>8} ({:>6})  {:>7}  {:>8.1}  {:>7.2}",
            s.case_id,
            s.scenario,
            s.n_trials,
            fmt_opt(s.similarity_mean),
            fmt_opt(s.similarity_sd),
            fmt_opt(s.hetero_pct_pooled),
            s.total_dyads_mean,
            s.pct_satisfied_mean,
        );
    }
    for r in &output.ratios {
        println!(
            "case {} ratio {:.3} (reference {:.3}, delta {:+.3})",
            r.case_id, r.ratio, r.reference_ratio, r.delta
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

fn single(args: SingleArgs) -> Result<ExitCode, Error> {
    let config = args.config.load()?;
    let outcome = experiment::run_single(&config, args.case_id, args.scenario, args.seed)?;
    if args.export_edges {
        std::fs::create_dir_all(&args.out)?;
        let stem = format!("c{}_{}_s{}", args.case_id, args.scenario, args.seed);
        let agents = args.out.join(format!("agents_{stem}.csv"));
        let edges = args.out.join(format!("edges_{stem}.csv"));
        io::write_agents(&agents, &outcome.state)?;
        io::write_edges(&edges, &outcome.state)?;
        eprintln!("wrote {} and {}", agents.display(), edges.display());
    }
    io::write_rows_to(std::io::stdout().lock(), &[outcome.record])?;
    Ok(ExitCode::SUCCESS)
}

fn validate(args: ValidateArgs) -> Result<ExitCode, Error> {
    let space = IdentitySpace::new(args.weights)?;
    let state = io::load_network(&args.agents, &args.edges, space)?;
    let violations = state.violations();
    if violations.is_empty() {
        println!(
            "ok: {} agents, {} edges, equilibrium reached",
            state.len(),
            state.edge_count()
        );
        return Ok(ExitCode::SUCCESS);
    }
    for v in &violations {
        println!("{v}");
    }
    eprintln!(
        "{} violation(s) in {}",
        violations.len(),
        display(&args.edges)
    );
    Ok(ExitCode::from(EXIT_VIOLATION))
}

fn display(path: &Path) -> String {
    path.display().to_string()
}
