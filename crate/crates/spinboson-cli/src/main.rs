//! `spinboson` — batch front-end for the expansion engines.
//!
//! ```text
//! spinboson validate --config run.toml
//! spinboson energy   --preset scalar-exp --out results/
//! spinboson gsnorm   --config run.toml --order 2
//! spinboson oracle   --config run.toml --workers 4
//! spinboson pairings 4 --partitions
//! ```
//!
//! Exit codes: `0` success, `2` invalid configuration or model, `3` numerical
//! failure.  Every run writes `manifest.json` (config hash, stage wall times,
//! consistency checks, and a SHA-256 inventory of every emitted file) into
//! the output directory, even when it fails partway.  Data files are
//! byte-identical across repeated runs and worker counts; the manifest alone
//! carries timings.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::Ctx;
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "spinboson",
    version,
    about = "Ground-state energy and norm expansions of generalized spin-boson models"
)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory (overrides the config file and SPINBOSON_OUT).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the reproducible self-check problems.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a TOML run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset instead of a config file (two-level-exp, scalar-exp).
    #[arg(long)]
    preset: Option<String>,
    /// Expansion order override.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args)]
struct PairingsArgs {
    /// Number of interaction vertices.
    n: usize,
    /// Dump every pair partition instead of the linked endpoint-covering
    /// pairings.
    #[arg(long)]
    partitions: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Measure the admissibility of a configured model.
    Validate(RunArgs),
    /// Ground-state energy coefficients (direct route; η-route on request).
    Energy(RunArgs),
    /// Ground-state norm coefficients.
    Gsnorm(RunArgs),
    /// Exact-diagonalization cross-check on a discretized model.
    Oracle(RunArgs),
    /// Dump pairing combinatorics as JSON lines.
    Pairings(PairingsArgs),
}

fn load_config(args: &RunArgs) -> Result<RunConfig, String> {
    match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            RunConfig::from_toml(&text).map_err(|e| e.to_string())
        }
        (None, Some(name)) => RunConfig::from_preset(name).map_err(|e| e.to_string()),
        (None, None) => Err("either --config or --preset is required".into()),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    }
}

fn resolve_out_dir(flag: &Option<PathBuf>, config: &RunConfig) -> PathBuf {
    if let Some(dir) = flag {
        return dir.clone();
    }
    if let Some(dir) = &config.output.directory {
        return PathBuf::from(dir);
    }
    if let Ok(dir) = std::env::var("SPINBOSON_OUT") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from("spinboson-out")
}

fn make_ctx(cli: &Cli, args: &RunArgs) -> Result<Ctx, String> {
    let config = load_config(args)?;
    // Hash the *resolved* configuration (independent of formatting in the
    // source file) plus the relevant overrides.
    let canonical = toml::to_string(&config).map_err(|e| e.to_string())?;
    let stamp = format!("{canonical}\norder-override = {:?}\n", args.order);
    let config_hash = manifest::sha256_hex(stamp.as_bytes());
    Ok(Ctx {
        out_dir: resolve_out_dir(&cli.out, &config),
        config,
        config_hash,
        seed: cli.seed,
        workers: cli.workers,
        order: args.order,
    })
}

fn main() {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    let code = match &cli.command {
        Command::Validate(args) | Command::Energy(args) | Command::Gsnorm(args)
        | Command::Oracle(args) => match make_ctx(&cli, args) {
            Ok(ctx) => match &cli.command {
                Command::Validate(_) => commands::cmd_validate(&ctx),
                Command::Energy(_) => commands::cmd_energy(&ctx),
                Command::Gsnorm(_) => commands::cmd_gsnorm(&ctx),
                Command::Oracle(_) => commands::cmd_oracle(&ctx),
                Command::Pairings(_) => unreachable!(),
            },
            Err(msg) => {
                eprintln!("error: {msg}");
                2
            }
        },
        Command::Pairings(args) => {
            let config = RunConfig::default();
            let stamp = format!("pairings n = {} partitions = {}\n", args.n, args.partitions);
            let ctx = Ctx {
                out_dir: resolve_out_dir(&cli.out, &config),
                config,
                config_hash: manifest::sha256_hex(stamp.as_bytes()),
                seed: cli.seed,
                workers: cli.workers,
                order: None,
            };
            commands::cmd_pairings(&ctx, args.n, args.partitions)
        }
    };
    std::process::exit(code);
}
