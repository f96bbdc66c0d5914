//! Compiles a cubic graph into an allocation instance.
//!
//! For a graph with `N` vertices and `M` edges and parameters `(alpha, k)`:
//!
//! * one agent `v:<i>` per vertex and one agent `e:<u>-<v>` per edge;
//! * `k` identical vertex items `vi:<j>`, worth 1 to every vertex agent;
//! * one edge item `ei:<u>-<v>` per edge, worth `1 - alpha` to its edge agent;
//! * one shared item `si:<v>@<u>-<w>` per incidence, worth `1/3` to the vertex
//!   agent and `alpha` to the edge agent.
//!
//! Agents are ordered vertex agents then edge agents; items are vertex items,
//! edge items, then shared items by incidence `(v, e)`.

use std::path::Path;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::graph::{is_cubic, is_vertex_cover, Edge, Graph, VertexSet};
use crate::instance::{Allocation, Instance, WelfareValue};
use crate::io::{read_text, to_json_string, write_text};
use crate::rational::{self, frac, int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionParams {
    pub alpha: Rational,
    /// Number of identical vertex items.
    pub k: usize,
    /// Admit `alpha` at the closed endpoints `1/3` and `1/2`.
    pub allow_boundary: bool,
}

impl ReductionParams {
    pub fn new(alpha: Rational, k: usize) -> Self {
        ReductionParams { alpha, k, allow_boundary: false }
    }

    pub fn default_alpha() -> Rational {
        frac(2, 5)
    }

    pub fn check_alpha(alpha: &Rational, allow_boundary: bool) -> Result<()> {
        let (lo, hi) = (frac(1, 3), frac(1, 2));
        let inside = *alpha > lo && *alpha < hi;
        let on_edge = *alpha == lo || *alpha == hi;
        if inside || (allow_boundary && on_edge) {
            Ok(())
        } else if on_edge {
            Err(Error::Invalid(format!(
                "alpha = {alpha} lies on the boundary of (1/3, 1/2); pass --allow-boundary to use it"
            )))
        } else {
            Err(Error::Invalid(format!("alpha = {alpha} must lie strictly between 1/3 and 1/2")))
        }
    }

    pub fn check(&self, g: &Graph) -> Result<()> {
        Self::check_alpha(&self.alpha, self.allow_boundary)?;
        if self.k > g.n() {
            return Err(Error::Invalid(format!("k = {} exceeds the vertex count {}", self.k, g.n())));
        }
        Ok(())
    }
}

/// Role of an agent or item in a reduced instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "kebab-case")]
pub enum Role {
    VertexAgent { vertex: usize },
    EdgeAgent { edge: Edge },
    VertexItem { index: usize },
    EdgeItem { edge: Edge },
    SharedItem { vertex: usize, edge: Edge },
}

/// Where the reduction put the agent or item belonging to each graph element.
#[derive(Clone, Debug)]
pub struct Tags {
    n_vertices: usize,
    n_edges: usize,
    k: usize,
    incidences: Vec<(usize, usize)>,
    shared_of: Vec<[usize; 2]>,
}

impl Tags {
    fn new(g: &Graph, k: usize) -> Self {
        let mut incidences = Vec::with_capacity(2 * g.m());
        for (v, inc) in g.incident_edges().iter().enumerate() {
            for &e in inc {
                incidences.push((v, e));
            }
        }
        let mut shared_of = vec![[usize::MAX; 2]; g.m()];
        for (s, &(v, e)) in incidences.iter().enumerate() {
            let side = usize::from(g.edges()[e].0 != v);
            shared_of[e][side] = s;
        }
        Tags { n_vertices: g.n(), n_edges: g.m(), k, incidences, shared_of }
    }

    pub fn vertex_agent(&self, v: usize) -> usize {
        v
    }

    pub fn edge_agent(&self, e: usize) -> usize {
        self.n_vertices + e
    }

    pub fn vertex_item(&self, j: usize) -> usize {
        j
    }

    pub fn edge_item(&self, e: usize) -> usize {
        self.k + e
    }

    /// Item index of `i(v, e)`, by incidence position.
    pub fn shared_item_at(&self, incidence: usize) -> usize {
        self.k + self.n_edges + incidence
    }

    /// `(v, e)` pairs in shared-item order.
    pub fn incidences(&self) -> &[(usize, usize)] {
        &self.incidences
    }

    /// Shared item `i(v, e)`; `None` if `v` is not an endpoint of `e`.
    pub fn shared_item(&self, g: &Graph, v: usize, e: usize) -> Option<usize> {
        let (a, b) = g.edges()[e];
        if v == a {
            Some(self.shared_item_at(self.shared_of[e][0]))
        } else if v == b {
            Some(self.shared_item_at(self.shared_of[e][1]))
        } else {
            None
        }
    }

    pub fn is_vertex_item(&self, item: usize) -> bool {
        item < self.k
    }

    pub fn is_vertex_agent(&self, agent: usize) -> bool {
        agent < self.n_vertices
    }

    pub fn vertex_items(&self) -> std::ops::Range<usize> {
        0..self.k
    }
}

#[derive(Clone, Debug)]
pub struct ReducedInstance {
    pub instance: Instance,
    pub graph: Graph,
    pub params: ReductionParams,
    pub tags: Tags,
}

fn edge_name(e: Edge) -> String {
    format!("{}-{}", e.0, e.1)
}

pub fn build_instance(g: &Graph, p: &ReductionParams) -> Result<ReducedInstance> {
    if !is_cubic(g) {
        return Err(Error::Invalid("the reduction needs a 3-regular graph".into()));
    }
    p.check(g)?;
    let tags = Tags::new(g, p.k);
    let one = Rational::one();
    let third = frac(1, 3);
    let mut agents: Vec<String> = (0..g.n()).map(|v| format!("v:{v}")).collect();
    agents.extend(g.edges().iter().map(|&e| format!("e:{}", edge_name(e))));
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for j in 0..p.k {
        items.push(format!("vi:{j}"));
        rows.push((0..g.n()).map(|v| (tags.vertex_agent(v), one.clone())).collect());
    }
    for (e, &edge) in g.edges().iter().enumerate() {
        items.push(format!("ei:{}", edge_name(edge)));
        rows.push(vec![(tags.edge_agent(e), &one - &p.alpha)]);
    }
    for &(v, e) in tags.incidences() {
        items.push(format!("si:{v}@{}", edge_name(g.edges()[e])));
        rows.push(vec![(tags.vertex_agent(v), third.clone()), (tags.edge_agent(e), p.alpha.clone())]);
    }
    let instance = Instance::new(agents, items, rows)?;
    Ok(ReducedInstance { instance, graph: g.clone(), params: p.clone(), tags })
}

impl ReducedInstance {
    /// Sidecar JSON: graph, parameters, and the role of every agent and item.
    pub fn tags_to_json(&self) -> String {
        let g = &self.graph;
        let mut roles = Map::new();
        let mut put = |name: &str, role: Role| {
            roles.insert(name.to_string(), serde_json::to_value(role).unwrap());
        };
        let inst = &self.instance;
        for v in 0..g.n() {
            put(&inst.agents()[self.tags.vertex_agent(v)], Role::VertexAgent { vertex: v });
        }
        for (e, &edge) in g.edges().iter().enumerate() {
            put(&inst.agents()[self.tags.edge_agent(e)], Role::EdgeAgent { edge });
        }
        for j in 0..self.params.k {
            put(&inst.items()[self.tags.vertex_item(j)], Role::VertexItem { index: j });
        }
        for (e, &edge) in g.edges().iter().enumerate() {
            put(&inst.items()[self.tags.edge_item(e)], Role::EdgeItem { edge });
        }
        for (s, &(v, e)) in self.tags.incidences().iter().enumerate() {
            put(&inst.items()[self.tags.shared_item_at(s)], Role::SharedItem { vertex: v, edge: g.edges()[e] });
        }
        let doc = serde_json::json!({
            "alpha": rational::to_string(&self.params.alpha),
            "k": self.params.k,
            "allow_boundary": self.params.allow_boundary,
            "graph": { "n": g.n(), "edges": g.edges() },
            "roles": roles,
        });
        to_json_string(&doc)
    }

    /// Rebuilds the reduction recorded in a tags sidecar and checks that
    /// `instance` is exactly that reduction.
    pub fn from_parts(instance: Instance, tags_json: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct GraphPart {
            n: usize,
            edges: Vec<Edge>,
        }
        #[derive(Deserialize)]
        struct Sidecar {
            alpha: String,
            k: usize,
            #[serde(default)]
            allow_boundary: bool,
            graph: GraphPart,
            roles: Map<String, Value>,
        }
        let side: Sidecar = serde_json::from_str(tags_json).map_err(|e| Error::Parse(format!("tags file: {e}")))?;
        let g = Graph::new(side.graph.n, side.graph.edges)?;
        let params = ReductionParams {
            alpha: rational::parse(&side.alpha)?,
            k: side.k,
            allow_boundary: side.allow_boundary,
        };
        let rebuilt = build_instance(&g, &params)?;
        if rebuilt.instance != instance {
            return Err(Error::Invalid("instance does not match the reduction described by the tags file".into()));
        }
        let expected: Value = serde_json::from_str(&rebuilt.tags_to_json()).unwrap();
        if expected["roles"] != Value::Object(side.roles) {
            return Err(Error::Invalid("tags file roles do not match the reduction".into()));
        }
        Ok(rebuilt)
    }

    pub fn read(instance_path: impl AsRef<Path>, tags_path: impl AsRef<Path>) -> Result<Self> {
        let inst = crate::io::read_instance(instance_path)?;
        Self::from_parts(inst, &read_text(tags_path.as_ref())?)
    }

    pub fn write_tags(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.tags_to_json())
    }

    pub fn n_agents(&self) -> usize {
        self.instance.n_agents()
    }
}

/// The allocation induced by a vertex cover of size `k`: cover vertices take one
/// vertex item each (in index order), the other vertex agents take their three
/// shared items, and every edge agent takes its edge item plus whatever shared
/// items of its edge are left.
pub fn completeness_allocation(r: &ReducedInstance, cover: &VertexSet) -> Result<Allocation> {
    let g = &r.graph;
    cover.check(g)?;
    if !is_vertex_cover(g, cover) {
        return Err(Error::Invalid("the given vertex set is not a vertex cover".into()));
    }
    if cover.len() != r.params.k {
        return Err(Error::Invalid(format!(
            "cover has {} vertices but the instance has k = {} vertex items",
            cover.len(),
            r.params.k
        )));
    }
    let t = &r.tags;
    let mut holders = vec![usize::MAX; r.instance.n_items()];
    for (j, v) in cover.iter().enumerate() {
        holders[t.vertex_item(j)] = t.vertex_agent(v);
    }
    for e in 0..g.m() {
        holders[t.edge_item(e)] = t.edge_agent(e);
    }
    for (s, &(v, e)) in t.incidences().iter().enumerate() {
        holders[t.shared_item_at(s)] = if cover.contains(v) { t.edge_agent(e) } else { t.vertex_agent(v) };
    }
    Allocation::new(&r.instance, holders)
}

/// `(1 + alpha)^(3k - M)` over the `N + M` agents of the reduction: the welfare
/// of the allocation built from a size-`k` cover.
pub fn completeness_value(g: &Graph, k: usize, alpha: &Rational) -> Result<WelfareValue> {
    let exp = 3 * k as i64 - g.m() as i64;
    if exp < 0 {
        return Err(Error::Invalid(format!(
            "3k = {} is below M = {}: no vertex cover of size {k} can exist",
            3 * k,
            g.m()
        )));
    }
    Ok(closed_form_value(g, k, alpha))
}

/// `(1 + alpha)^(3k - M)` without the sign check on the exponent.
pub fn closed_form_value(g: &Graph, k: usize, alpha: &Rational) -> WelfareValue {
    let exp = 3 * k as i64 - g.m() as i64;
    WelfareValue::from_powers(g.n() + g.m(), &[(alpha + int(1), exp)])
}

/// The four strict ratio conditions behind the shared-item exchange rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub alpha: String,
    pub checks: Vec<InequalityCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityCheck {
    pub rule: u8,
    pub expression: &'static str,
    pub value: String,
    pub holds: bool,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

pub fn lemma2_inequalities(alpha: &Rational) -> InequalityReport {
    let one = Rational::one();
    let values = [
        ("(3/4)(1+a) > 1", frac(3, 4) * (&one + alpha)),
        ("(3/2)/(1+a) > 1", frac(3, 2) / (&one + alpha)),
        ("(2/3)/(1-a) > 1", if *alpha == one { Rational::zero() } else { frac(2, 3) / (&one - alpha) }),
        ("2(1-a) > 1", int(2) * (&one - alpha)),
    ];
    let checks = values
        .into_iter()
        .enumerate()
        .map(|(i, (expression, v))| InequalityCheck {
            rule: i as u8 + 1,
            expression,
            holds: v > one,
            value: rational::to_string(&v),
        })
        .collect();
    InequalityReport { alpha: rational::to_string(alpha), checks }
}
