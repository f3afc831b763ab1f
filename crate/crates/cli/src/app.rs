//! Command-line definitions and the command implementations.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use repath_core::oracle::BuildError;
use repath_core::verify::{check_oracle, scaling_experiment, GridPoint};
use repath_core::{build_oracle, gen, Graph, Oracle, OracleParams, Vertex};

use crate::graph_io::{parse_graph, parse_queries, write_graph};
use crate::report::{oracle_stats, verify_stats, verify_summary, BenchStats};
use crate::store;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

/// A problem with how the tool was invoked (exit code 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

#[derive(Debug, Parser)]
#[command(
    name = "repath",
    version,
    about = "Exact s-t distances after one edge failure"
)]
pub struct Cli {
    /// Worker threads for building and verification (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated graph in the graph-file format.
    Gen(GenArgs),
    /// Build an oracle and save it.
    Build(BuildArgs),
    /// Answer "s t u v" query lines against a saved oracle.
    Query(QueryArgs),
    /// Check every query of a fresh oracle against BFS.
    Verify(VerifyArgs),
    /// Space and probe-count scaling runs on random graphs.
    Bench(BenchArgs),
    /// Print the stats record of a saved oracle.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Model {
    ErdosRenyi,
    Cycle,
    Path,
    Grid,
    RandomTree,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub model: Model,
    /// Vertex count (rows for `grid`).
    pub n: usize,
    /// Edge probability for `erdos-renyi`, column count for `grid`.
    pub param: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep only the largest connected component.
    #[arg(long)]
    pub lcc: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Comma-separated source vertices.
    #[arg(long, conflicts_with = "sigma")]
    pub sources: Option<String>,
    /// Number of random distinct sources.
    #[arg(long)]
    pub sigma: Option<usize>,
    /// Seed for drawing random sources.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 0)]
    pub perturb_seed: u64,
    #[arg(long, default_value_t = 0)]
    pub terminal_seed: u64,
    /// Constant in the terminal spacing bound and intersection radius.
    #[arg(long = "c", default_value_t = 3.0)]
    pub c: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<OracleParams> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return usage(format!("--c must be positive, got {}", self.c));
        }
        Ok(OracleParams {
            c: self.c,
            perturb_seed: self.perturb_seed,
            terminal_seed: self.terminal_seed,
            ..OracleParams::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    pub graph: PathBuf,
    #[command(flatten)]
    pub sources: SourceArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Oracle output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Stats file; printed to stdout when omitted.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    pub oracle: PathBuf,
    /// Query file; standard input when omitted.
    pub queries: Option<PathBuf>,
    /// Append the answering case to each line.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub graph: PathBuf,
    #[command(flatten)]
    pub sources: SourceArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Full stats file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Corrupt one table entry before checking.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// `n=128,256;sigma=4;seeds=5;degree=8;queries=2000`; keys may be omitted.
    #[arg(long, default_value = DEFAULT_GRID)]
    pub grid: String,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub oracle: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_GRID: &str = "n=128,256,512,1024;sigma=4;seeds=5;degree=8;queries=2000";

/// Largest stored-entry estimate a bench grid may reach.
const BENCH_ENTRY_LIMIT: f64 = 2e9;

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    if let Some(k) = cli.threads {
        // a second initialisation (tests calling run twice) is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
    match cli.command {
        Command::Gen(a) => cmd_gen(&a, stdout),
        Command::Build(a) => cmd_build(&a, stdout),
        Command::Query(a) => cmd_query(&a, stdout),
        Command::Verify(a) => cmd_verify(&a, stdout),
        Command::Bench(a) => cmd_bench(&a, stdout),
        Command::Stats(a) => cmd_stats(&a, stdout),
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => stdout
            .write_all(text.as_bytes())
            .context("writing to stdout"),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("stats serialise");
    s.push('\n');
    s
}

pub fn cmd_gen(a: &GenArgs, stdout: &mut dyn Write) -> Result<i32> {
    let g = match a.model {
        Model::ErdosRenyi => {
            let Some(p) = a.param.filter(|p| (0.0..=1.0).contains(p)) else {
                return usage("erdos-renyi needs an edge probability in [0, 1]");
            };
            let g = gen::erdos_renyi(a.n, p, a.seed);
            if a.lcc {
                gen::largest_component(&g).0
            } else {
                g
            }
        }
        Model::Cycle if a.n < 3 => return usage("a cycle needs at least 3 vertices"),
        Model::Cycle => gen::cycle(a.n),
        Model::Path => gen::path(a.n),
        Model::Grid => {
            let cols = a.param.unwrap_or(a.n as f64);
            if cols < 1.0 || cols.fract() != 0.0 {
                return usage("grid columns must be a positive integer");
            }
            gen::grid(a.n, cols as usize)
        }
        Model::RandomTree => gen::random_tree(a.n, a.seed),
    };
    emit(a.out.as_deref(), &write_graph(&g), stdout)?;
    Ok(EXIT_OK)
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

/// The source list and, for random sources, the seed used.
fn resolve_sources(g: &Graph, a: &SourceArgs) -> Result<(Vec<Vertex>, Option<u64>)> {
    if let Some(list) = &a.sources {
        let mut out = Vec::new();
        for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let Ok(v) = part.parse::<Vertex>() else {
                return usage(format!("bad source {part:?}"));
            };
            if v as usize >= g.n() {
                return usage(format!("source {v} is not a vertex (n = {})", g.n()));
            }
            out.push(v);
        }
        if out.is_empty() {
            return usage("--sources is empty");
        }
        return Ok((out, None));
    }
    match a.sigma {
        Some(k) if k >= 1 && k <= g.n() => {
            Ok((gen::random_sources(g.n(), k, a.seed), Some(a.seed)))
        }
        Some(k) => usage(format!("--sigma must lie in 1..={}, got {k}", g.n())),
        None => usage("give --sources or --sigma"),
    }
}

fn build(g: &Graph, sources: &[Vertex], params: &OracleParams) -> Result<Oracle> {
    build_oracle(g, sources, params).map_err(|e| match e {
        BuildError::NoSources | BuildError::SourceOutOfRange { .. } => {
            UsageError(e.to_string()).into()
        }
        e => anyhow::Error::new(e).context("building the oracle"),
    })
}

pub fn cmd_build(a: &BuildArgs, stdout: &mut dyn Write) -> Result<i32> {
    let g = read_graph(&a.graph)?;
    let (sources, seed) = resolve_sources(&g, &a.sources)?;
    let o = build(&g, &sources, &a.params.params()?)?;
    store::save(&o, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    emit(a.stats.as_deref(), &json(&oracle_stats(&o, seed)), stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_query(a: &QueryArgs, stdout: &mut dyn Write) -> Result<i32> {
    let o = store::load(&a.oracle).with_context(|| format!("loading {}", a.oracle.display()))?;
    let text = match &a.queries {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .context("reading stdin")?;
            s
        }
    };
    let mut out = String::new();
    let mut bad = 0;
    for q in parse_queries(o.graph(), &text) {
        let q = match q {
            Ok(q) => q,
            Err(e) => {
                eprintln!("{e}");
                bad += 1;
                continue;
            }
        };
        match o.query(q.s, q.t, q.e) {
            Ok(ans) => {
                out += &ans.distance.to_string();
                if a.trace {
                    out += &format!(" {} probes={}", ans.provenance, ans.probes);
                }
                out.push('\n');
            }
            Err(e) => {
                eprintln!("line {}: {e}", q.line);
                bad += 1;
            }
        }
    }
    emit(a.out.as_deref(), &out, stdout)?;
    Ok(if bad > 0 { EXIT_USAGE } else { EXIT_OK })
}

pub fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let g = read_graph(&a.graph)?;
    let (sources, seed) = resolve_sources(&g, &a.sources)?;
    let mut o = build(&g, &sources, &a.params.params()?)?;
    if a.inject_fault {
        if let Some((x, y)) = o.inject_fault_for_testing() {
            log::warn!("corrupted the stored distance from {x} to {y}");
        }
    }
    let r = check_oracle(&o);
    stdout.write_all(verify_summary(&r).as_bytes())?;
    let st = verify_stats(&o, &r, seed);
    if let Some(p) = &a.out {
        fs::write(p, json(&st)).with_context(|| format!("writing {}", p.display()))?;
    }
    let clean = st.passed;
    writeln!(stdout, "{}", if clean { "PASS" } else { "FAIL" })?;
    Ok(if clean { EXIT_OK } else { EXIT_MISMATCH })
}

/// Parses a grid spec into points, one per `(n, sigma, seed)`.
pub fn parse_grid(spec: &str) -> Result<Vec<GridPoint>> {
    let mut ns = Vec::new();
    let mut sigmas = vec![4usize];
    let mut seeds = 5u64;
    let mut degree = 8.0;
    let mut queries = 2000;
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((k, v)) = part.split_once('=') else {
            return usage(format!("bad grid item {part:?}"));
        };
        let list = |v: &str| -> Result<Vec<usize>> {
            v.split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| UsageError(format!("bad number list {v:?}")).into())
        };
        match k.trim() {
            "n" => ns = list(v)?,
            "sigma" => sigmas = list(v)?,
            "seeds" => {
                seeds = v
                    .trim()
                    .parse()
                    .map_err(|_| UsageError(format!("bad seeds {v:?}")))?
            }
            "degree" => {
                degree = v
                    .trim()
                    .parse()
                    .map_err(|_| UsageError(format!("bad degree {v:?}")))?
            }
            "queries" => {
                queries = v
                    .trim()
                    .parse()
                    .map_err(|_| UsageError(format!("bad queries {v:?}")))?
            }
            other => return usage(format!("unknown grid key {other:?}")),
        }
    }
    if ns.is_empty() || sigmas.is_empty() || seeds == 0 {
        return usage("empty grid");
    }
    let mut out = Vec::new();
    for &n in &ns {
        for &sigma in &sigmas {
            if n < 2 || sigma == 0 || sigma > n {
                return usage(format!("invalid grid point n={n} sigma={sigma}"));
            }
            for seed in 0..seeds {
                out.push(GridPoint {
                    n,
                    sigma,
                    avg_degree: degree,
                    seed,
                    queries,
                });
            }
        }
    }
    Ok(out)
}

/// Rough stored-entry count for a point, `sqrt(σ) n^{3/2} log₂² n`.
pub fn estimate_entries(p: &GridPoint) -> f64 {
    let n = p.n as f64;
    let l = n.log2();
    (p.sigma as f64).sqrt() * n.powf(1.5) * l * l
}

pub fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write) -> Result<i32> {
    let grid = parse_grid(&a.grid)?;
    let worst = grid.iter().map(estimate_entries).fold(0.0, f64::max);
    if worst > BENCH_ENTRY_LIMIT {
        return usage(format!(
            "grid too large: about {worst:.2e} stored entries for one point (limit {BENCH_ENTRY_LIMIT:.0e})"
        ));
    }
    let params = a.params.params()?;
    let report = scaling_experiment(&grid, &params).context("bench build failed")?;
    let mut text = String::new();
    for p in &report.points {
        text += &format!(
            "n={} m={} sigma={} seed={} entries={} max_probes={} median_probes={} r2_max={} r2_const={:.3} mismatches={}\n",
            p.n, p.m, p.sigma, p.seed, p.entries, p.max_probes, p.median_probes, p.max_r2_per_target, p.r2_constant, p.mismatches
        );
    }
    let fmt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.3}"));
    text += &format!(
        "n_slope={} sigma_slope={} probe_ratio={} max_r2_const={:.3}\n",
        fmt(report.n_slope),
        fmt(report.sigma_slope),
        fmt(report.probe_ratio),
        report.max_r2_constant
    );
    stdout.write_all(text.as_bytes())?;
    if let Some(p) = &a.out {
        let st = BenchStats {
            grid: &a.grid,
            c: params.c,
            perturb_seed: params.perturb_seed,
            terminal_seed: params.terminal_seed,
            report: &report,
        };
        fs::write(p, json(&st)).with_context(|| format!("writing {}", p.display()))?;
    }
    let clean = report.points.iter().all(|p| p.mismatches == 0);
    Ok(if clean { EXIT_OK } else { EXIT_MISMATCH })
}

pub fn cmd_stats(a: &StatsArgs, stdout: &mut dyn Write) -> Result<i32> {
    let o = store::load(&a.oracle).with_context(|| format!("loading {}", a.oracle.display()))?;
    emit(a.out.as_deref(), &json(&oracle_stats(&o, None)), stdout)?;
    Ok(EXIT_OK)
}

/// Exit code for an error returned by [`run`].
pub fn exit_code(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<UsageError>().is_some() {
        EXIT_USAGE
    } else {
        EXIT_FAILURE
    }
}
