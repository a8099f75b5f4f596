//! Command-line front end: capacity analysis, leakage measurement, and
//! simulation campaigns.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use noisyauth::channel::{Distribution, Dmc, WiretapPair};
use noisyauth::error::Error;
use noisyauth::infotheory::{is_less_noisy, secrecy_capacity};
use noisyauth::seed::derive_rng;
use noisyauth::simulator::{run_campaign, ExperimentConfig};
use noisyauth::wiretap_code::{
    build_codebook, key_leakage_bits, leakage_dav_exact, leakage_dav_sampled, DEFAULT_ENUM_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "noisyauth",
    version,
    about = "Authentication over noisy channels: \
capacity analysis, codebook leakage, and attack simulation campaigns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Secrecy-capacity grid search and less-noisy test for a channel pair
    Capacity(CapacityArgs),
    /// Run a simulation campaign from a JSON config
    Simulate(SimulateArgs),
    /// Leakage metrics (d_av, I(K;Z)) of seeded codebooks across block lengths
    Leakage(LeakageArgs),
}

#[derive(Args)]
struct CapacityArgs {
    /// Main channel: `bsc:p` or a path to a channel JSON document
    #[arg(long)]
    main: String,
    /// Wiretapper channel: `bsc:p` or a path to a channel JSON document
    #[arg(long)]
    wire: String,
    /// Grid step for the input/auxiliary search
    #[arg(long, default_value_t = 0.01)]
    resolution: f64,
    /// Auxiliary alphabet size (1 = optimize over P_X only)
    #[arg(long, default_value_t = 1)]
    aux: usize,
    /// Write the full result as JSON to this path
    #[arg(long)]
    json: Option<PathBuf>,
    /// Master seed (unused by the deterministic search; accepted for
    /// uniform scripting)
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Campaign config JSON
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for manifest and reports
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; never affects results
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct LeakageArgs {
    /// Main channel: `bsc:p` or a path to a channel JSON document
    #[arg(long)]
    main: String,
    /// Wiretapper channel: `bsc:p` or a path to a channel JSON document
    #[arg(long)]
    wire: String,
    /// Block lengths, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Number of key bins
    #[arg(long, default_value_t = 4)]
    bins: usize,
    /// Codewords per bin
    #[arg(long, default_value_t = 2)]
    bin_size: usize,
    /// Estimate d_av by sampling instead of exact enumeration
    #[arg(long)]
    sampled: bool,
    /// Trials for the sampled estimator
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Enumeration budget for exact mode
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u64,
    /// Master seed for codebook construction and sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    config_path: String,
    config: &'a ExperimentConfig,
    master_seed: u64,
    tool_version: &'static str,
    report_json: String,
    report_csv: String,
}

fn parse_channel(spec: &str) -> Result<Dmc, Error> {
    if let Some(p) = spec.strip_prefix("bsc:") {
        let p: f64 = p
            .parse()
            .map_err(|_| Error::Parse(format!("invalid BSC probability in `{spec}`")))?;
        return noisyauth::channel::make_bsc(p);
    }
    let doc = fs::read_to_string(spec)
        .map_err(|e| Error::Parse(format!("cannot read channel file `{spec}`: {e}")))?;
    Dmc::from_json(&doc)
}

fn cmd_capacity(args: &CapacityArgs) -> Result<(), Error> {
    let pair = WiretapPair::new(parse_channel(&args.main)?, parse_channel(&args.wire)?)?;
    let result = secrecy_capacity(&pair, args.resolution, args.aux)?;
    let less_noisy = is_less_noisy(&pair, args.resolution.max(0.02), args.aux.max(2))?;
    println!("secrecy capacity (bits/use): {:.5}", result.capacity_bits);
    println!(
        "best input distribution:    {:?}",
        result.best_input.probs()
    );
    println!("wiretapper less noisy:      {less_noisy}");
    if let Some(path) = &args.json {
        #[derive(Serialize)]
        struct Doc<'a> {
            capacity_bits: f64,
            best_input: &'a [f64],
            less_noisy: bool,
        }
        let doc = Doc {
            capacity_bits: result.capacity_bits,
            best_input: result.best_input.probs(),
            less_noisy,
        };
        fs::write(path, serde_json::to_string_pretty(&doc).unwrap())?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let doc = fs::read_to_string(&args.config)?;
    let mut config: ExperimentConfig =
        serde_json::from_str(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    config.validate()?;

    fs::create_dir_all(&args.out)?;
    let report_json = args.out.join("report.json");
    let report_csv = args.out.join("report.csv");
    let manifest = RunManifest {
        config_path: args.config.display().to_string(),
        config: &config,
        master_seed: config.master_seed,
        tool_version: env!("CARGO_PKG_VERSION"),
        report_json: report_json.display().to_string(),
        report_csv: report_csv.display().to_string(),
    };
    // manifest lands before any trial runs
    fs::write(
        args.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap(),
    )?;

    let report = match args.workers {
        Some(w) if w > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Parameter(e.to_string()))?;
            pool.install(|| run_campaign(&config))?
        }
        _ => run_campaign(&config)?,
    };
    fs::write(&report_json, serde_json::to_string_pretty(&report).unwrap())?;
    fs::write(&report_csv, report.to_csv())?;

    let cells = report.rows.len();
    println!(
        "campaign complete: {cells} cells -> {}",
        report_csv.display()
    );
    for flag in &report.flags {
        println!("flag: {flag}");
    }
    Ok(())
}

fn cmd_leakage(args: &LeakageArgs) -> Result<(), Error> {
    let pair = WiretapPair::new(parse_channel(&args.main)?, parse_channel(&args.wire)?)?;
    let input = Distribution::uniform(pair.input_size());
    let prior = Distribution::uniform(args.bins);
    println!("n,d_av,leak_bits,slack_code,slack_bin,mode");
    for &n in &args.n {
        let mut rng = derive_rng(args.seed, "leakage/codebook", n as u64);
        let (cb, report) = build_codebook(&pair, n, args.bins, args.bin_size, &input, &mut rng)?;
        let (d_av, mode) = if args.sampled {
            let mut srng = derive_rng(args.seed, "leakage/sample", n as u64);
            let (mean, _se) =
                leakage_dav_sampled(&cb, pair.wiretap(), &prior, args.trials, &mut srng)?;
            (mean, "sampled")
        } else {
            (
                leakage_dav_exact(&cb, pair.wiretap(), &prior, args.budget)?,
                "exact",
            )
        };
        let leak = if args.sampled {
            f64::NAN
        } else {
            key_leakage_bits(&cb, pair.wiretap(), &prior, args.budget)?
        };
        println!(
            "{n},{d_av},{leak},{},{},{mode}",
            report.delta_slack, report.secrecy_slack
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Capacity(args) => cmd_capacity(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Leakage(args) => cmd_leakage(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parameter(_) | Error::Parse(_) => ExitCode::from(2),
                Error::Resource(_) => ExitCode::from(3),
                Error::Io(_) => ExitCode::FAILURE,
            }
        }
    }
}
