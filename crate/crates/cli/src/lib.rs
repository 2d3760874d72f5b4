//! Command-line front end. [`run`] holds the whole program so tests can
//! drive it without spawning a process.
//!
//! Exit codes: 0 success, 1 verification failed or I/O error, 2 parse or
//! usage error, 3 input above an oracle cap, 4 nothing found.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use antler_core::format::{parse_coloring, parse_graph, serialize_graph, to_dot};
use antler_core::generate::{gen_antler_chain, gen_planted, GroundTruth};
use antler_core::structures::{find_certificate, verify_certificate};
use antler_core::{
    reduce_all, solve_by_antler_complexity, verify_antler, verify_fvc, Error, FvcFamily,
    MultiGraph, SearchConfig, UniversalBackend, VertexSet,
};

#[derive(Parser, Debug)]
#[command(
    name = "antler",
    about = "Antler-based preprocessing for Feedback Vertex Set"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Universal {
    Neighborhood,
    Exhaustive,
    Random,
    RandomVerified,
}

impl From<Universal> for FvcFamily {
    fn from(u: Universal) -> Self {
        match u {
            Universal::Neighborhood => FvcFamily::Neighborhood,
            Universal::Exhaustive => FvcFamily::Universal(UniversalBackend::Exhaustive),
            Universal::Random => FvcFamily::Universal(UniversalBackend::Random),
            Universal::RandomVerified => FvcFamily::Universal(UniversalBackend::RandomVerified),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum What {
    Fvc,
    Antler,
    Certificate,
}

#[derive(clap::Args, Debug)]
struct SearchArgs {
    /// Coloring family for the reducible-FVC stage.
    #[arg(long, value_enum, default_value = "neighborhood")]
    universal: Universal,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random colorings tried per step after the deterministic ones.
    #[arg(long, default_value_t = 16)]
    trials: usize,
    /// Oracle coloring file (`v <id> C|F|R`, `g <edge-id> C|F|R`).
    #[arg(long)]
    coloring: Option<PathBuf>,
}

impl SearchArgs {
    fn config(&self) -> Result<SearchConfig> {
        let oracle = match &self.coloring {
            Some(p) => Some(parse_coloring(&read(p)?)?),
            None => None,
        };
        Ok(SearchConfig {
            family: self.universal.into(),
            seed: self.seed,
            oracle,
            random_trials: self.trials,
            ..SearchConfig::default()
        })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Remove antlers of bounded width and order; print S and the residual graph.
    Reduce {
        /// Largest antler width (cut size) to remove.
        #[arg(long)]
        k: usize,
        /// Certificate order; must not exceed k.
        #[arg(long)]
        z: usize,
        #[command(flatten)]
        search: SearchArgs,
        /// Also write the reduction trace as JSON to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        input: PathBuf,
    },
    /// Find an optimal solution by reducing with growing width and order.
    Solve {
        /// Largest width and order tried before giving up.
        #[arg(long, default_value_t = 2)]
        cap: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        json: bool,
        input: PathBuf,
    },
    /// Check a pair of sets from a sidecar JSON file against a graph.
    Verify {
        #[arg(long, value_enum)]
        what: What,
        input: PathBuf,
        sets: PathBuf,
    },
    /// Write a planted instance to PREFIX.graph and its sidecar to PREFIX.json.
    Gen {
        #[arg(long, default_value_t = 1)]
        width: usize,
        #[arg(long, default_value_t = 1)]
        z: usize,
        #[arg(long, default_value_t = 1)]
        trees: usize,
        #[arg(long, default_value_t = 4)]
        rest: usize,
        /// Comma-separated widths of a chain of antlers; overrides the single antler.
        #[arg(long, value_delimiter = ',')]
        chain: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the graph in Graphviz format.
    ExportDot {
        /// Sidecar JSON whose cut and forest get highlighted.
        #[arg(long)]
        highlight: Option<PathBuf>,
        input: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_graph(path: &Path) -> Result<MultiGraph> {
    Ok(parse_graph(&read(path)?)?)
}

fn read_truth(path: &Path) -> Result<GroundTruth> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn ids(set: &VertexSet) -> String {
    set.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn exit_code(err: &anyhow::Error) -> i32 {
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e {
            Error::Parse { .. } => 2,
            Error::Refusal { .. } => 3,
            Error::NotFound(_) => 4,
            Error::Domain(_) => 1,
        };
    }
    if err.downcast_ref::<serde_json::Error>().is_some() {
        return 2;
    }
    1
}

/// Parse `args` (program name first), execute, write all output to `out`
/// and return the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(out, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e:#}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Reduce {
            k,
            z,
            search,
            trace,
            json,
            input,
        } => {
            let g = read_graph(&input)?;
            let config = search.config()?;
            let start = Instant::now();
            let r = reduce_all(&g, k, z, &config)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            if let Some(path) = trace {
                std::fs::write(&path, serde_json::to_string_pretty(&r.trace)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if json {
                let doc = json!({
                    "solution": r.solution,
                    "residual": serialize_graph(&r.graph),
                    "trace": r.trace,
                    "stats": r.stats,
                    "millis": millis,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            } else {
                writeln!(out, "c {} steps, {millis:.1} ms", r.trace.len())?;
                writeln!(out, "s {}", ids(&r.solution))?;
                write!(out, "{}", serialize_graph(&r.graph))?;
            }
            Ok(0)
        }
        Command::Solve {
            cap,
            search,
            json,
            input,
        } => {
            let g = read_graph(&input)?;
            let start = Instant::now();
            let s = solve_by_antler_complexity(&g, cap, &search.config()?)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            if json {
                let doc = json!({
                    "solution": s.solution,
                    "width": s.width,
                    "order": s.order,
                    "trace": s.trace,
                    "millis": millis,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            } else {
                writeln!(
                    out,
                    "c solved at width {} order {}, {millis:.1} ms",
                    s.width, s.order
                )?;
                writeln!(out, "s {}", ids(&s.solution))?;
            }
            Ok(0)
        }
        Command::Verify { what, input, sets } => {
            let g = read_graph(&input)?;
            let truth = read_truth(&sets)?;
            let antler = truth.antler();
            let ok = match what {
                What::Fvc => verify_fvc(&g, &antler),
                What::Antler => verify_antler(&g, &antler)?,
                What::Certificate => match &truth.certificate {
                    Some(c) => {
                        verify_fvc(&g, &antler)
                            && verify_certificate(&g, &antler.cut, c, truth.order)?
                    }
                    None => {
                        verify_antler(&g, &antler)?
                            && find_certificate(&g, &antler, truth.order)?.is_some()
                    }
                },
            };
            writeln!(out, "{}", if ok { "OK" } else { "FAIL" })?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Gen {
            width,
            z,
            trees,
            rest,
            chain,
            seed,
            out: prefix,
        } => {
            let planted = match chain {
                Some(widths) => gen_antler_chain(&widths, trees, seed)?,
                None => gen_planted(width, z, trees, rest, seed)?,
            };
            let graph_path = prefix.with_extension("graph");
            let truth_path = prefix.with_extension("json");
            std::fs::write(&graph_path, serialize_graph(&planted.graph))?;
            std::fs::write(&truth_path, serde_json::to_string_pretty(&planted.truth)?)?;
            writeln!(
                out,
                "wrote {} and {}",
                graph_path.display(),
                truth_path.display()
            )?;
            Ok(0)
        }
        Command::ExportDot { highlight, input } => {
            let g = read_graph(&input)?;
            let fvc = highlight
                .as_deref()
                .map(read_truth)
                .transpose()?
                .map(|t| t.antler());
            write!(out, "{}", to_dot(&g, fvc.as_ref()))?;
            Ok(0)
        }
    }
}
