use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fedkt::accountant::{read_votes_csv, run_accountant, AccountantLevel};
use fedkt::experiment::{run_experiment, ExperimentConfig, SweepConfig, SweepParameter};
use fedkt::formats::write_csv;
use fedkt::report::write_report_atomic;
use fedkt::synth::{gen_blobs, gen_xor};
use fedkt_core::rng::RngHandle;

#[derive(Parser)]
#[command(name = "fedkt", version, about = "One-shot federated learning via knowledge transfer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config (optionally sweeping one parameter)
    Run(RunArgs),
    /// Generate a synthetic CSV task
    Gen(GenArgs),
    /// Run the moments accountant over a CSV of vote histograms
    Accountant(AccountantArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Override the config's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the sweep, e.g. query_fraction=0.001,0.005,0.01
    #[arg(long)]
    sweep: Option<String>,
    /// Directory for the report (written as <dir>/report.json)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    task: Task,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2000)]
    examples: usize,
    #[arg(long, default_value_t = 14)]
    features: usize,
    /// blobs only
    #[arg(long, default_value_t = 2)]
    classes: usize,
    /// blobs: center offset on informative dimensions
    #[arg(long, default_value_t = 1.0)]
    sep: f64,
    /// blobs: number of informative dimensions
    #[arg(long, default_value_t = 2)]
    informative: usize,
    /// xor: label flip probability
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Task {
    Blobs,
    Xor,
}

#[derive(Args)]
struct AccountantArgs {
    /// CSV of pre-noise vote histograms, one row per query
    #[arg(long)]
    votes: PathBuf,
    #[arg(long)]
    gamma: f64,
    #[arg(long, value_enum)]
    level: Level,
    /// Partitions per party (L1 sensitivity scale)
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Subsets per partition (L2 party-level sensitivity scale)
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 1e-5)]
    delta: f64,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    L1,
    L2,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Accountant(args) => cmd_accountant(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let raw = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&raw)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(sweep) = &args.sweep {
        cfg.sweep = Some(parse_sweep(sweep)?);
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        cfg.output = Some(dir.join("report.json"));
    }

    let report = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => {
            // run_experiment already wrote it; repeat the location for the user
            println!("report written to {}", path.display());
        }
        None => {
            let path = PathBuf::from("fedkt_report.json");
            write_report_atomic(&report, &path)?;
            println!("report written to {}", path.display());
        }
    }
    println!(
        "fedkt accuracy: {:.4} (over {} trial(s))",
        report.methods.fedkt.accuracy_mean, cfg.trials
    );
    if let Some(solo) = &report.methods.solo {
        println!("solo accuracy:  {:.4}", solo.accuracy_mean);
    }
    if let Some(pate) = &report.methods.pate {
        println!("pate accuracy:  {:.4}", pate.accuracy_mean);
    }
    if let Some(privacy) = report.privacy.first() {
        if let Some(eps) = privacy.epsilon {
            println!(
                "epsilon: {:.3} at lambda* {} (delta {:.0e}) [{}]",
                eps,
                privacy.lambda_star.unwrap_or(0),
                privacy.delta,
                privacy.note.as_deref().unwrap_or("")
            );
        }
    }
    Ok(())
}

fn parse_sweep(text: &str) -> Result<SweepConfig> {
    let (name, values) = text
        .split_once('=')
        .context("sweep must look like parameter=v1,v2,...")?;
    let parameter = SweepParameter::parse(name.trim())
        .with_context(|| format!("unknown sweep parameter {name:?}"))?;
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(Into::into))
        .collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    Ok(SweepConfig { parameter, values })
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let mut rng = RngHandle::new(args.seed);
    let data = match args.task {
        Task::Blobs => gen_blobs(
            args.examples,
            args.features,
            args.classes,
            args.sep,
            args.informative,
            &mut rng,
        )?,
        Task::Xor => gen_xor(args.examples, args.features, args.noise, &mut rng)?,
    };
    write_csv(&data, &args.out)?;
    println!(
        "wrote {} examples x {} features ({} classes) to {}",
        data.len(),
        data.dim(),
        data.num_classes(),
        args.out.display()
    );
    Ok(())
}

fn cmd_accountant(args: AccountantArgs) -> Result<()> {
    let votes = read_votes_csv(&args.votes)?;
    let level = match args.level {
        Level::L1 => AccountantLevel::L1,
        Level::L2 => AccountantLevel::L2,
    };
    let report = run_accountant(&votes, level, args.gamma, args.s, args.t, args.delta)?;
    let json = serde_json::to_string_pretty(&report)?;
    match args.out {
        Some(path) => {
            fs::write(&path, &json).with_context(|| format!("writing {}", path.display()))?;
            println!("accountant report written to {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}
