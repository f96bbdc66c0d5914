//! `nswlab`: build gadget instances from cubic graphs, solve them exactly, and
//! measure the completeness/soundness gap.
//!
//! Exit codes: 0 success, 2 bad input, 3 resource limit hit.

mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use nswlab::constants::{DEFAULT_C_MAX, DEFAULT_C_MIN};
use nswlab::graph::{graph_to_text, named_graph, read_graph, Graph};
use nswlab::io::{allocation_to_json, read_allocation, read_instance, to_json_string, write_allocation, write_instance};
use nswlab::normalize::normalize_with_stats;
use nswlab::par::default_workers;
use nswlab::rational::{self, approx12, Rational};
use nswlab::reduction::ReductionParams;
use nswlab::solver::solve;
use nswlab::structure::product_formula;
use nswlab::vertex_cover::{min_vertex_cover_bounded, DEFAULT_COVER_BOUND};
use nswlab::{analyze_structure, build_instance, nsw_product, verify_identities, ReducedInstance, SearchConfig};
use serde_json::{json, Value};

use report::{gap_report, parse_list, parse_seeds, sweep_rows, GraphSpec, SWEEP_HEADER};

#[derive(Parser)]
#[command(name = "nswlab", version, about = "Nash social welfare gadgets from cubic graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a graph file (named or random cubic).
    Graph {
        #[command(flatten)]
        graph: GraphArgs,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the instance for a graph; writes PREFIX.instance.json and PREFIX.tags.json.
    Reduce {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximize the product of utilities exactly.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Also write the allocation to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Minimum vertex cover (lexicographically smallest among the minimum ones).
    Vc {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = DEFAULT_COVER_BOUND)]
        bound: usize,
        #[arg(long)]
        json: bool,
    },
    /// Bring an allocation of a reduced instance into normal form.
    Normalize {
        instance: PathBuf,
        tags: PathBuf,
        allocation: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vertex/edge partition and counting identities of a normal-form allocation.
    Analyze {
        instance: PathBuf,
        tags: PathBuf,
        allocation: PathBuf,
    },
    /// Compare the exact optimum with the completeness value and the soundness bound.
    Gap {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        consts: ConstArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = DEFAULT_COVER_BOUND)]
        bound: usize,
        #[arg(long)]
        json: bool,
    },
    /// Gap experiments over a grid of alphas and graphs, as CSV.
    Sweep {
        /// Comma-separated alphas, e.g. "2/5,5/12,11/24".
        #[arg(long)]
        alpha_grid: String,
        /// Comma-separated graphs: named graphs or random:N.
        #[arg(long, default_value = "K4,K33")]
        graphs: String,
        /// Seeds for random graphs: "A..B" (inclusive) or a comma list.
        #[arg(long, default_value = "1")]
        seeds: String,
        /// Item budgets relative to the cover number, e.g. "-1,0".
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        k_offsets: String,
        #[arg(long)]
        allow_boundary: bool,
        #[arg(long, env = "NSWLAB_WORKERS")]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Graph file ("N M" header, then "u v" lines).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// K4, K33, Prism or Petersen.
    #[arg(long)]
    named: Option<String>,
    /// Random cubic graph on this many vertices.
    #[arg(long)]
    random: Option<usize>,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Seed for --random.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl GraphArgs {
    fn load(&self) -> nswlab::Result<(String, Graph)> {
        let s = &self.source;
        if let Some(p) = &s.graph {
            Ok((p.display().to_string(), read_graph(p)?))
        } else if let Some(name) = &s.named {
            Ok((name.clone(), named_graph(name)?))
        } else {
            let n = s.random.expect("clap enforces one source");
            GraphSpec::Random(n).build(Some(self.seed)).map(|g| (format!("random:{n}#{}", self.seed), g))
        }
    }
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value = "2/5", value_parser = parse_rational)]
    alpha: Rational,
    /// Number of vertex items; defaults to the cover number.
    #[arg(long)]
    k: Option<usize>,
    /// Accept alpha at the endpoints 1/3 and 1/2.
    #[arg(long)]
    allow_boundary: bool,
}

#[derive(Args)]
struct ConstArgs {
    #[arg(long, default_value_t = DEFAULT_C_MIN)]
    cmin: f64,
    #[arg(long, default_value_t = DEFAULT_C_MAX)]
    cmax: f64,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, env = "NSWLAB_WORKERS")]
    workers: Option<usize>,
    /// Maximum undetermined item placements.
    #[arg(long, default_value_t = 64)]
    limit: usize,
    /// Maximum dynamic-programming states.
    #[arg(long, default_value_t = 20_000_000)]
    state_limit: usize,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

impl SearchArgs {
    fn config(&self) -> Result<SearchConfig, Failure> {
        let time_limit = match self.time_limit {
            Some(s) if !(s > 0.0 && s.is_finite()) => return Err(Failure::input("--time-limit must be positive")),
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(SearchConfig {
            item_limit: self.limit,
            worker_count: self.workers.unwrap_or_else(default_workers),
            time_limit,
            state_limit: self.state_limit,
        })
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse_nonneg(s).map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<nswlab::Error> for Failure {
    fn from(e: nswlab::Error) -> Self {
        Failure { code: if e.is_resource() { 3 } else { 2 }, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| Failure::input(e.to_string()))
        }
    }
}

fn reduction_params(g: &Graph, p: &ParamArgs, bound: usize) -> Result<ReductionParams, Failure> {
    ReductionParams::check_alpha(&p.alpha, p.allow_boundary)?;
    let k = match p.k {
        Some(k) => k,
        None => min_vertex_cover_bounded(g, bound)?.len(),
    };
    Ok(ReductionParams { alpha: p.alpha.clone(), k, allow_boundary: p.allow_boundary })
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Graph { graph, out } => {
            let (_, g) = graph.load()?;
            emit(out.as_deref(), &graph_to_text(&g))
        }
        Cmd::Reduce { graph, params, out } => {
            let (_, g) = graph.load()?;
            let p = reduction_params(&g, &params, DEFAULT_COVER_BOUND)?;
            let r = build_instance(&g, &p)?;
            let prefix = out.display().to_string();
            write_instance(&r.instance, format!("{prefix}.instance.json"))?;
            r.write_tags(format!("{prefix}.tags.json"))?;
            println!("n={} m={}", r.instance.n_agents(), r.instance.n_items());
            Ok(())
        }
        Cmd::Solve { instance, search, out, json } => {
            let inst = read_instance(&instance)?;
            let sol = solve(&inst, &search.config()?)?;
            if let Some(p) = &out {
                write_allocation(&inst, &sol.allocation, p)?;
            }
            let v = &sol.value;
            if json {
                let alloc: Value = serde_json::from_str(&allocation_to_json(&inst, &sol.allocation)).unwrap();
                let doc = json!({
                    "agents": inst.n_agents(),
                    "items": inst.n_items(),
                    "product": rational::to_string(&v.product),
                    "geomean_approx": approx12(v.geomean()),
                    "zero_agents": v.zero_count,
                    "nonzero_product": rational::to_string(&v.nonzero_product),
                    "allocation": alloc,
                });
                emit(None, &to_json_string(&doc))
            } else {
                let mut s = format!("agents={} items={}\n", inst.n_agents(), inst.n_items());
                s += &format!("product={}\n", rational::to_string(&v.product));
                s += &format!("geomean_approx={}\n", approx12(v.geomean()));
                if v.zero_count > 0 {
                    s += &format!("zero_agents={} nonzero_product={}\n", v.zero_count, v.nonzero_product);
                }
                for a in 0..inst.n_agents() {
                    let bundle: Vec<&str> = sol.allocation.bundle(a).map(|i| inst.items()[i].as_str()).collect();
                    s += &format!("{}: {}\n", inst.agents()[a], bundle.join(" "));
                }
                emit(None, &s)
            }
        }
        Cmd::Vc { graph, bound, json } => {
            let (_, g) = graph.load()?;
            let c = min_vertex_cover_bounded(&g, bound)?;
            let text = if json {
                to_json_string(&json!({ "tau": c.len(), "cover": c.to_vec() }))
            } else {
                let vs: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                format!("tau={}\ncover={}\n", c.len(), vs.join(" "))
            };
            emit(None, &text)
        }
        Cmd::Normalize { instance, tags, allocation, out } => {
            let r = ReducedInstance::read(&instance, &tags)?;
            let a = read_allocation(&r.instance, &allocation)?;
            let (b, stats) = normalize_with_stats(&r, &a)?;
            let (before, after) = (nsw_product(&r.instance, &a)?, nsw_product(&r.instance, &b)?);
            eprintln!(
                "product {} -> {}; reassigned={} rebalanced={} exchanged={} sweeps={}",
                before.product, after.product, stats.reassigned, stats.rebalanced, stats.exchanged, stats.sweeps
            );
            emit(out.as_deref(), &allocation_to_json(&r.instance, &b))
        }
        Cmd::Analyze { instance, tags, allocation } => {
            let r = ReducedInstance::read(&instance, &tags)?;
            let a = read_allocation(&r.instance, &allocation)?;
            let profile = analyze_structure(&r, &a)?;
            let identities = verify_identities(&r, &profile);
            let formula = product_formula(&profile, &r.params.alpha);
            let actual = nsw_product(&r.instance, &a)?;
            let doc = json!({
                "profile": profile,
                "identities": identities,
                "product": rational::to_string(&actual.product),
                "product_formula": rational::to_string(&formula.product),
                "formula_matches": formula.product == actual.product,
            });
            emit(None, &to_json_string(&doc))
        }
        Cmd::Gap { graph, params, consts, search, bound, json } => {
            let (label, g) = graph.load()?;
            let p = reduction_params(&g, &params, bound)?;
            let rep = gap_report(&label, &g, &p, consts.cmin, consts.cmax, &search.config()?, bound)?;
            let text = if json { to_json_string(&rep) } else { rep.to_text() };
            emit(None, &text)
        }
        Cmd::Sweep { alpha_grid, graphs, seeds, k_offsets, allow_boundary, workers, out } => {
            let alphas = parse_list(&alpha_grid, |s| rational::parse_nonneg(s).map_err(|e| e.to_string()))
                .map_err(Failure::input)?;
            if alphas.is_empty() {
                return Err(Failure::input("empty alpha grid"));
            }
            for a in &alphas {
                ReductionParams::check_alpha(a, allow_boundary)?;
            }
            let specs = parse_list(&graphs, GraphSpec::parse).map_err(Failure::input)?;
            if specs.is_empty() {
                return Err(Failure::input("no graphs given"));
            }
            let seeds = parse_seeds(&seeds).map_err(Failure::input)?;
            let offsets = parse_list(&k_offsets, |s| s.parse::<i64>().map_err(|e| format!("{s:?}: {e}")))
                .map_err(Failure::input)?;
            let rows = sweep_rows(&alphas, &specs, &seeds, &offsets, allow_boundary, workers.unwrap_or_else(default_workers))?;
            let mut csv = SWEEP_HEADER.to_string();
            csv.push('\n');
            for row in rows {
                csv += &row;
                csv.push('\n');
            }
            emit(out.as_deref(), &csv)
        }
    }
}
