//! Gap reports and the sweep harness.

use nswlab::constants::{DEFAULT_C_MAX, DEFAULT_C_MIN};
use nswlab::graph::{gen_random_cubic, named_graph, Graph};
use nswlab::par::Executor;
use nswlab::rational::{self, approx12, Rational};
use nswlab::reduction::{closed_form_value, lemma2_inequalities, ReductionParams};
use nswlab::structure::soundness_bound_with_tau;
use nswlab::vertex_cover::{cover_number, DEFAULT_COVER_BOUND};
use nswlab::{build_instance, exact_max_nsw, hardness_constants, Result, SearchConfig, WelfareValue};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub tau: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Params {
    pub alpha: String,
    pub k: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Valued {
    pub value: String,
    pub geomean_approx: f64,
}

impl Valued {
    fn of(w: &WelfareValue) -> Self {
        Valued { value: rational::to_string(&w.product), geomean_approx: approx12(w.geomean()) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Completeness {
    #[serde(flatten)]
    pub closed_form: Valued,
    /// Whether a vertex cover of size k exists, i.e. whether some allocation attains the closed form.
    pub cover_exists: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Constants {
    pub c_min: f64,
    pub c_max: f64,
    pub beta_approx: f64,
    pub gamma_approx: f64,
    pub mu_approx: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub graph: GraphSummary,
    pub params: Params,
    pub completeness: Completeness,
    pub soundness_bound: Valued,
    pub optimum: Valued,
    /// "cover-achievable" when the optimum equals the completeness value, else "gap-realized".
    pub verdict: &'static str,
    pub bound_holds: bool,
    pub constants: Constants,
}

impl GapReport {
    pub fn to_text(&self) -> String {
        let g = &self.graph;
        let c = &self.constants;
        let mut s = format!("graph {}: N={} M={} tau={}\n", g.label, g.n, g.m, g.tau);
        s += &format!("alpha={} k={}\n", self.params.alpha, self.params.k);
        let line = |name: &str, v: &Valued| format!("{name:<16}{:<24}geomean~{}\n", v.value, v.geomean_approx);
        s += &line("completeness", &self.completeness.closed_form);
        s += &line("soundness bound", &self.soundness_bound);
        s += &line("optimum", &self.optimum);
        s += &format!("cover of size k: {}\n", if self.completeness.cover_exists { "yes" } else { "no" });
        s += &format!("verdict: {}\n", self.verdict);
        s += &format!(
            "constants: c_min={} c_max={} beta~{} gamma~{} mu~{}\n",
            c.c_min, c.c_max, c.beta_approx, c.gamma_approx, c.mu_approx
        );
        s
    }
}

pub fn gap_report(
    label: &str,
    g: &Graph,
    p: &ReductionParams,
    c_min: f64,
    c_max: f64,
    cfg: &SearchConfig,
    cover_bound: usize,
) -> Result<GapReport> {
    let consts = hardness_constants(&p.alpha, c_min, c_max)?;
    let tau = cover_number(g, cover_bound)?;
    let r = build_instance(g, p)?;
    let (_, opt) = exact_max_nsw(&r.instance, cfg)?;
    let closed = closed_form_value(g, p.k, &p.alpha);
    let bound = soundness_bound_with_tau(g, p.k, &p.alpha, tau);
    Ok(GapReport {
        graph: GraphSummary { label: label.to_string(), n: g.n(), m: g.m(), tau },
        params: Params { alpha: rational::to_string(&p.alpha), k: p.k },
        completeness: Completeness { closed_form: Valued::of(&closed), cover_exists: tau <= p.k },
        soundness_bound: Valued::of(&bound),
        verdict: if opt.product == closed.product { "cover-achievable" } else { "gap-realized" },
        bound_holds: opt.product <= bound.product,
        optimum: Valued::of(&opt),
        constants: Constants {
            c_min,
            c_max,
            beta_approx: approx12(consts.beta),
            gamma_approx: approx12(consts.gamma),
            mu_approx: approx12(consts.mu),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphSpec {
    Named(String),
    Random(usize),
}

impl GraphSpec {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        match s.split_once(':') {
            Some(("random", n)) => n.parse().map(GraphSpec::Random).map_err(|_| format!("bad vertex count in {s:?}")),
            Some(_) => Err(format!("unknown graph spec {s:?}")),
            None => named_graph(s).map(|_| GraphSpec::Named(s.to_string())).map_err(|e| e.to_string()),
        }
    }

    pub fn build(&self, seed: Option<u64>) -> Result<Graph> {
        match self {
            GraphSpec::Named(name) => named_graph(name),
            GraphSpec::Random(n) => gen_random_cubic(*n, seed.unwrap_or(1)),
        }
    }

    fn label(&self, seed: Option<u64>) -> String {
        match (self, seed) {
            (GraphSpec::Named(name), _) => name.clone(),
            (GraphSpec::Random(n), Some(s)) => format!("random:{n}#{s}"),
            (GraphSpec::Random(n), None) => format!("random:{n}"),
        }
    }
}

/// Splits a comma list, dropping empty entries.
pub fn parse_list<T>(s: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(f).collect()
}

/// `"A..B"` (inclusive) or a comma list.
pub fn parse_seeds(s: &str) -> std::result::Result<Vec<u64>, String> {
    let bad = |t: &str| format!("bad seed {t:?}");
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad(a))?, b.trim().parse().map_err(|_| bad(b))?);
        if a > b {
            return Err(format!("empty seed range {s:?}"));
        }
        return Ok((a..=b).collect());
    }
    let seeds = parse_list(s, |t| t.parse().map_err(|_| bad(t)))?;
    if seeds.is_empty() {
        return Err("no seeds given".into());
    }
    Ok(seeds)
}

pub const SWEEP_HEADER: &str = "alpha,graph,n,m,tau,k,optimum,completeness,soundness_bound,verdict,bound_holds,\
ineq1,ineq2,ineq3,ineq4,optimum_geomean_approx";

struct Job {
    alpha: Rational,
    label: String,
    graph: Graph,
    offset: i64,
}

/// One CSV row per (alpha, graph, k offset), in that nesting order. Offsets that
/// put k outside `0..=N` are skipped.
pub fn sweep_rows(
    alphas: &[Rational],
    specs: &[GraphSpec],
    seeds: &[u64],
    offsets: &[i64],
    allow_boundary: bool,
    workers: usize,
) -> Result<Vec<String>> {
    let mut graphs = Vec::new();
    for spec in specs {
        match spec {
            GraphSpec::Named(_) => graphs.push((spec.label(None), spec.build(None)?)),
            GraphSpec::Random(_) => {
                for &s in seeds {
                    graphs.push((spec.label(Some(s)), spec.build(Some(s))?));
                }
            }
        }
    }
    let mut jobs = Vec::new();
    for alpha in alphas {
        for (label, g) in &graphs {
            for &offset in offsets {
                jobs.push(Job { alpha: alpha.clone(), label: label.clone(), graph: g.clone(), offset });
            }
        }
    }
    let exec = Executor::new(workers);
    let cfg = SearchConfig::default();
    let rows = exec.map(&jobs, |job| -> Result<Option<String>> {
        let g = &job.graph;
        let tau = cover_number(g, DEFAULT_COVER_BOUND)? as i64;
        let k = tau + job.offset;
        if k < 0 || k > g.n() as i64 {
            return Ok(None);
        }
        let p = ReductionParams { alpha: job.alpha.clone(), k: k as usize, allow_boundary };
        let rep = gap_report(&job.label, g, &p, DEFAULT_C_MIN, DEFAULT_C_MAX, &cfg, DEFAULT_COVER_BOUND)?;
        let ineq = lemma2_inequalities(&job.alpha);
        let mut cols = vec![
            rep.params.alpha.clone(),
            rep.graph.label.clone(),
            g.n().to_string(),
            g.m().to_string(),
            tau.to_string(),
            k.to_string(),
            rep.optimum.value.clone(),
            rep.completeness.closed_form.value.clone(),
            rep.soundness_bound.value.clone(),
            rep.verdict.to_string(),
            rep.bound_holds.to_string(),
        ];
        cols.extend(ineq.checks.iter().map(|c| c.holds.to_string()));
        cols.push(rep.optimum.geomean_approx.to_string());
        Ok(Some(cols.join(",")))
    });
    rows.into_iter().filter_map(Result::transpose).collect()
}
