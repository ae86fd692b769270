use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dapsp::graph::{load_graph, parse_updates, write_graph, write_updates, Dist};
use dapsp::harness::{self, Algorithm, RunConfig};
use dapsp::oracle::{Density, CAP_ENV};
use dapsp::workload::{generate, WorkloadSpec};
use dapsp::{Error, Result};

#[derive(Parser)]
#[command(name = "dapsp", version, about = "Decremental approximate APSP: generate, run, verify, bench")]
#[command(after_help = "The exact oracle refuses graphs above 512 nodes unless DAPSP_ORACLE_CAP is raised.")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a random graph and a shuffled deletion stream.
    Generate {
        #[command(flatten)]
        work: Work,
        /// Output directory; receives graph.txt and updates.txt.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Replay a stream and report answers, counters and wall time as JSON.
    Run {
        #[command(flatten)]
        io: Files,
        #[command(flatten)]
        algo: AlgoFlags,
    },
    /// Check every pair against the exact oracle; exits nonzero on a violation.
    Verify {
        #[command(flatten)]
        io: Files,
        #[command(flatten)]
        algo: AlgoFlags,
        /// Check after every update instead of at `q` lines.
        #[arg(long)]
        dense: bool,
    },
    /// Size ladder with counter assertions, as CSV.
    Bench {
        #[command(flatten)]
        work: Work,
        #[command(flatten)]
        algo: AlgoFlags,
        #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
        sizes: Vec<usize>,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Work {
    #[arg(long, default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 0.25)]
    density: f64,
    /// Weights are uniform in [1, W].
    #[arg(long = "max-weight", short = 'W', default_value_t = 1)]
    max_weight: Dist,
    #[arg(long, default_value_t = 1.0)]
    delete_fraction: f64,
    /// A query line after every this many deletions; 0 for none.
    #[arg(long, default_value_t = 1)]
    query_every: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Files {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    updates: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct AlgoFlags {
    /// mult | mixed | unweighted-mult | additive | static-2
    #[arg(long, short)]
    algorithm: Algorithm,
    #[arg(long)]
    p: Option<f64>,
    /// Heavy threshold; required for mixed.
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long, default_value_t = 0.9)]
    eps: f64,
    /// Hierarchy depth; required for additive.
    #[arg(long)]
    k: Option<usize>,
    /// Distance horizon; required for additive.
    #[arg(long)]
    d: Option<Dist>,
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    /// Seed for the structure's own sampling.
    #[arg(long = "algo-seed", default_value_t = 0)]
    algo_seed: u64,
}

impl AlgoFlags {
    fn config(&self, density: Density) -> RunConfig {
        RunConfig {
            algorithm: self.algorithm,
            p: self.p,
            tau: self.tau,
            eps: self.eps,
            k: self.k,
            d: self.d,
            c: self.c,
            seed: self.algo_seed,
            density,
        }
    }
}

impl Work {
    fn spec(&self) -> WorkloadSpec {
        WorkloadSpec {
            n: self.n,
            density: self.density,
            max_weight: self.max_weight,
            delete_fraction: self.delete_fraction,
            query_every: self.query_every,
            seed: self.seed,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            // A closed pipe downstream is not an error.
            let _ = writeln!(std::io::stdout(), "{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))
}

fn load(io: &Files) -> Result<(dapsp::DynamicGraph, Vec<dapsp::StreamItem>)> {
    Ok((load_graph(&read(&io.graph)?)?, parse_updates(&read(&io.updates)?)?))
}

fn main() -> ExitCode {
    env_logger::init();
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Generate { work, out } => {
            let (g, items) = generate(&work.spec())?;
            fs::create_dir_all(&out)?;
            fs::write(out.join("graph.txt"), write_graph(&g))?;
            fs::write(out.join("updates.txt"), write_updates(&items))?;
            log::info!("wrote n={} m={} and {} stream lines to {}", g.n(), g.m(), items.len(), out.display());
        }
        Cmd::Run { io, algo } => {
            let (g, items) = load(&io)?;
            let report = harness::run(&algo.config(Density::Queries), &g, &items)?;
            emit(io.report.as_deref(), &pretty(&report)?)?;
        }
        Cmd::Verify { io, algo, dense } => {
            let density = if dense { Density::EveryUpdate } else { Density::Queries };
            let (g, items) = load(&io)?;
            log::debug!("oracle cap from {CAP_ENV}: {}", dapsp::oracle::oracle_cap());
            let (report, json) = harness::verify(&algo.config(density), &g, &items)?;
            emit(io.report.as_deref(), &pretty(&json)?)?;
            if !report.pass {
                eprintln!("{} violation(s)", report.violations);
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Bench { work, algo, sizes, out } => {
            let rows = harness::bench(&algo.config(Density::Queries), &work.spec(), &sizes)?;
            emit(out.as_deref(), harness::bench_csv(&rows)?.trim_end())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
