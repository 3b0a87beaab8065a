use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use lipkin3::scan::{parse_partition, run_scan, Method, ScanConfig};
use lipkin3::{OptimizerConfig, Partition, Subsystem};

/// Sweep the coupling of the three-level Lipkin model and write ground-state
/// energies and orbital correlations (mutual information, classical
/// correlation, discord) to CSV.
#[derive(Debug, Parser)]
#[command(name = "lipkin3", version)]
struct Args {
    /// Particle number; repeat or comma-separate for several [default: 4,8,20]
    #[arg(long = "n", value_delimiter = ',')]
    n: Vec<usize>,

    #[arg(long, default_value_t = 0.0)]
    chi_min: f64,

    #[arg(long, default_value_t = 6.0)]
    chi_max: f64,

    #[arg(long, default_value_t = 121)]
    chi_steps: usize,

    /// Comma-separated subset of exact, hf, phf, gcm
    #[arg(long, value_delimiter = ',', default_value = "exact,hf,phf,gcm", value_parser = parse_method)]
    methods: Vec<Method>,

    /// Comma-separated subset of n0n1, n0n2, n1n2
    #[arg(long, value_delimiter = ',', default_value = "n0n1,n0n2,n1n2", value_parser = parse_subsystem)]
    subsystems: Vec<Subsystem>,

    /// Partition `A:B` over modes 0-3, e.g. 1,3:0,2; repeatable [default: 1,3:0,2 2,3:0,1 1:0]
    #[arg(long = "partition", value_parser = parse_partition_arg)]
    partitions: Vec<Partition>,

    /// Single-particle level spacing
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,

    /// Seed for the optimizer restart points
    #[arg(long, default_value_t = OptimizerConfig::default().seed)]
    seed: u64,

    /// Nelder-Mead restarts per point
    #[arg(long, default_value_t = OptimizerConfig::default().restarts)]
    restarts: usize,

    /// Simplex diameter at which a restart stops
    #[arg(long, default_value_t = OptimizerConfig::default().tol)]
    tol: f64,

    #[arg(long, default_value = "scan.csv")]
    out: PathBuf,

    /// Worker threads [default: all cores]
    #[arg(long)]
    threads: Option<usize>,

    /// Record per-row wall time in milliseconds (otherwise the column is 0)
    #[arg(long)]
    timing: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: lipkin3::Error| e.to_string())
}

fn parse_subsystem(s: &str) -> Result<Subsystem, String> {
    s.parse().map_err(|e: lipkin3::Error| e.to_string())
}

fn parse_partition_arg(s: &str) -> Result<Partition, String> {
    parse_partition(s).map_err(|e| e.to_string())
}

fn config(args: Args) -> ScanConfig {
    let defaults = ScanConfig::default();
    ScanConfig {
        n_list: if args.n.is_empty() { defaults.n_list } else { args.n },
        chi_min: args.chi_min,
        chi_max: args.chi_max,
        chi_steps: args.chi_steps,
        methods: args.methods,
        subsystems: args.subsystems,
        partitions: if args.partitions.is_empty() { defaults.partitions } else { args.partitions },
        epsilon: args.epsilon,
        optimizer: OptimizerConfig {
            seed: args.seed,
            restarts: args.restarts,
            tol: args.tol,
            ..OptimizerConfig::default()
        },
        out: args.out,
        threads: args.threads,
        record_timing: args.timing,
    }
}

fn run() -> Result<()> {
    let cfg = config(Args::parse());
    let summary = run_scan(&cfg).context("scan failed")?;
    println!("{summary}");
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
