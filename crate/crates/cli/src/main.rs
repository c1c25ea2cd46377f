//! `subiso`: find and count pattern graphs of bounded treewidth.
//!
//! Exit status is 0 on success (FOUND for `find`), 1 for NOT-FOUND or a
//! bench cross-check mismatch, and 2 on any input or usage error.

mod bench;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use subiso::circuit::{build_circuit_with, BuildMode, BuildOptions};
use subiso::count::{count, Algorithm, CountOptions, Quantity};
use subiso::decomp::{
    make_nice, nice_decomposition_with_limit, path_decomposition_with_limit, path_split_with_limit,
    tree_decomposition_with_limit, NiceTreeDecomposition, TreeDecomposition, DEFAULT_PATTERN_LIMIT,
};
use subiso::detect::{find_subgraph_with, DetectionConfig};
use subiso::graph::Graph;
use subiso::par;

use report::{digest, print_line, CountReport, FindReport, Inputs};

const LIMIT_VAR: &str = "SUBISO_PATTERN_LIMIT";

#[derive(Debug, Parser)]
#[command(
    name = "subiso",
    version,
    about = "Find and count bounded-treewidth patterns"
)]
struct Cli {
    /// Worker threads for the parallel loops (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether the host contains the pattern as a subgraph.
    Find {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        host: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        trials: u32,
        #[arg(long)]
        field_exp: Option<u32>,
        /// Tree decomposition of the pattern to use instead of computing one.
        #[arg(long)]
        decomposition: Option<PathBuf>,
        /// Add the elapsed wall time to the report.
        #[arg(long)]
        timing: bool,
    },
    /// Exact hom / inj / sub / aut counts.
    Count {
        #[arg(long)]
        pattern: PathBuf,
        /// Not needed for `--what aut`.
        #[arg(long)]
        host: Option<PathBuf>,
        #[arg(long, value_parser = parse_quantity)]
        what: Quantity,
        #[arg(long, value_parser = parse_algorithm)]
        algorithm: Algorithm,
        /// Accepted for symmetry with `find`; counts do not depend on it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        decomposition: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
    },
    /// Print a decomposition of the pattern.
    Decompose {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Tree)]
        kind: Kind,
    },
    /// Print the homomorphism-polynomial circuit.
    Circuit {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        formula: bool,
        #[arg(long)]
        decomposition: Option<PathBuf>,
    },
    /// Run a benchmark configuration and write CSV.
    Bench { config: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Tree,
    Nice,
    PathSplit,
}

fn parse_quantity(s: &str) -> Result<Quantity, String> {
    s.parse()
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_graph(path: &Path) -> Result<(Graph, Vec<u8>)> {
    let bytes = read(path)?;
    let text =
        std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let graph =
        Graph::parse(text).with_context(|| format!("cannot parse graph {}", path.display()))?;
    Ok((graph, bytes))
}

fn pattern_limit() -> Result<usize> {
    match std::env::var(LIMIT_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{LIMIT_VAR}=`{v}` is not a number")),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_PATTERN_LIMIT),
        Err(e) => Err(e).context(LIMIT_VAR),
    }
}

/// Reads a user decomposition, or computes an exact one.
fn nice_for(
    pattern: &Graph,
    file: Option<&Path>,
    limit: usize,
) -> Result<(NiceTreeDecomposition, Option<String>)> {
    match file {
        Some(path) => {
            let bytes = read(path)?;
            let text = std::str::from_utf8(&bytes)?;
            let td = TreeDecomposition::parse(text, pattern.order())
                .with_context(|| format!("cannot parse decomposition {}", path.display()))?;
            td.validate(pattern).with_context(|| {
                format!("{} is not a decomposition of the pattern", path.display())
            })?;
            Ok((make_nice(&td, pattern)?, Some(digest(&bytes))))
        }
        None => Ok((nice_decomposition_with_limit(pattern, limit)?, None)),
    }
}

fn elapsed(timing: bool, start: Instant) -> Option<u128> {
    timing.then(|| start.elapsed().as_millis())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let start = Instant::now();
    let limit = pattern_limit()?;
    match cli.command {
        Command::Find {
            pattern,
            host,
            seed,
            trials,
            field_exp,
            decomposition,
            timing,
        } => {
            let (f, fb) = load_graph(&pattern)?;
            let (g, gb) = load_graph(&host)?;
            let (ntd, td_digest) = nice_for(&f, decomposition.as_deref(), limit)?;
            let cfg = DetectionConfig {
                trials,
                field_exp,
                seed,
                ..DetectionConfig::default()
            };
            let d = find_subgraph_with(&f, &g, &ntd, &cfg)?;
            print_line(&FindReport {
                command: "find",
                inputs: Inputs {
                    pattern_sha256: digest(&fb),
                    host_sha256: Some(digest(&gb)),
                    decomposition_sha256: td_digest,
                },
                algorithm: "multilinear-detect",
                result: if d.found { "FOUND" } else { "NOT-FOUND" },
                seed,
                trials: d.trials,
                successes: d.successes,
                field_exp: d.field_exp,
                group_dims: d.group_dims,
                circuit_gates: d.circuit_gates,
                elapsed_ms: elapsed(timing, start),
            })?;
            Ok(if d.found {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Count {
            pattern,
            host,
            what,
            algorithm,
            seed,
            decomposition,
            timing,
        } => {
            let (f, fb) = load_graph(&pattern)?;
            let (g, gb) = match (&host, what) {
                (Some(h), _) => {
                    let (g, b) = load_graph(h)?;
                    (g, Some(digest(&b)))
                }
                (None, Quantity::Aut) => (f.clone(), None),
                (None, _) => bail!("--host is required for --what {what}"),
            };
            if !algorithm.supports(what) {
                bail!("algorithm `{algorithm}` cannot count `{what}`");
            }
            let uses_td = matches!(algorithm, Algorithm::Dp | Algorithm::Stream);
            let (ntd, td_digest) = match decomposition.as_deref() {
                Some(p) if uses_td => {
                    let (n, d) = nice_for(&f, Some(p), limit)?;
                    (Some(n), d)
                }
                Some(_) => bail!("--decomposition only applies to the dp and stream algorithms"),
                None => (None, None),
            };
            let opts = CountOptions {
                pattern_limit: limit,
                ..CountOptions::default()
            };
            let r = count(what, algorithm, &f, &g, ntd.as_ref(), &opts)?;
            print_line(&CountReport {
                command: "count",
                inputs: Inputs {
                    pattern_sha256: digest(&fb),
                    host_sha256: gb,
                    decomposition_sha256: td_digest,
                },
                quantity: what.to_string(),
                algorithm: algorithm.to_string(),
                value: r.value.to_string(),
                seed,
                stats: r.stats.into(),
                elapsed_ms: elapsed(timing, start),
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose { pattern, kind } => {
            let (f, _) = load_graph(&pattern)?;
            let text = match kind {
                Kind::Tree => {
                    let td = tree_decomposition_with_limit(&f, limit)?;
                    format!("c width {}\n{}", td.width(), td.to_text())
                }
                Kind::Nice => {
                    let ntd = nice_decomposition_with_limit(&f, limit)?;
                    format!("c width {}\n{}", ntd.width(), ntd.to_text())
                }
                Kind::PathSplit => {
                    let split = path_split_with_limit(&f, limit)?;
                    split.validate(&f)?;
                    let pd = path_decomposition_with_limit(&f, limit)?;
                    format!(
                        "c width {}\n{}{}",
                        pd.width(),
                        split.to_text(),
                        pd.to_text()
                    )
                }
            };
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Circuit {
            pattern,
            host,
            formula,
            decomposition,
        } => {
            let (f, _) = load_graph(&pattern)?;
            let (g, _) = load_graph(&host)?;
            let (ntd, _) = nice_for(&f, decomposition.as_deref(), limit)?;
            let opts = BuildOptions {
                mode: if formula {
                    BuildMode::Formula
                } else {
                    BuildMode::Shared
                },
                ..BuildOptions::default()
            };
            let c = build_circuit_with(&f, &g, &ntd, None, opts)?;
            print!("{}", c.dump());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { config } => {
            let text = std::str::from_utf8(&read(&config)?)?.to_owned();
            let cfg = bench::Config::parse(&text)?;
            let opts = CountOptions {
                pattern_limit: limit,
                ..CountOptions::default()
            };
            let agree = bench::run(&cfg, &opts, std::io::stdout().lock())?;
            if agree {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("error: algorithms disagree on at least one instance");
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    match par::with_jobs(jobs, || run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
