//! Simple undirected graphs, with the cubic-graph tooling the reduction needs.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_text, write_text};

pub type Edge = (usize, usize);

/// A simple graph on vertices `0..n`. Edges are stored as `(u, v)` with `u < v`
/// in the order they were given.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("graph needs at least one vertex".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut out = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::Invalid(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge ({u}, {v}) has an endpoint outside 0..{n}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::Invalid(format!("parallel edge ({}, {})", e.0, e.1)));
            }
            out.push(e);
        }
        Ok(Graph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Edge indices incident to each vertex, in edge order.
    pub fn incident_edges(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (k, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push(k);
            inc[v].push(k);
        }
        inc
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let e = (u.min(v), u.max(v));
        self.edges.iter().position(|&x| x == e)
    }
}

/// A set of vertex indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(BTreeSet<usize>);

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn insert(&mut self, v: usize) -> bool {
        self.0.insert(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }

    /// Members from the low `n` bits of `mask`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        (0..n).filter(|&v| mask >> v & 1 == 1).collect()
    }

    pub fn complement(&self, n: usize) -> Self {
        (0..n).filter(|v| !self.contains(*v)).collect()
    }

    pub fn check(&self, g: &Graph) -> Result<()> {
        match self.0.iter().find(|&&v| v >= g.n()) {
            Some(v) => Err(Error::Invalid(format!("vertex {v} is not in the graph"))),
            None => Ok(()),
        }
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

pub fn is_cubic(g: &Graph) -> bool {
    g.degrees().iter().all(|&d| d == 3)
}

pub fn is_vertex_cover(g: &Graph, s: &VertexSet) -> bool {
    g.edges().iter().all(|&(u, v)| s.contains(u) || s.contains(v))
}

/// Edges with both endpoints in `s`.
pub fn induced_edges(g: &Graph, s: &VertexSet) -> Vec<Edge> {
    g.edges().iter().copied().filter(|&(u, v)| s.contains(u) && s.contains(v)).collect()
}

pub const NAMED_GRAPHS: [&str; 4] = ["K4", "K33", "Petersen", "Prism"];

pub fn named_graph(name: &str) -> Result<Graph> {
    let edges: Vec<Edge> = match name.to_ascii_lowercase().as_str() {
        "k4" => vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        "k33" | "k3,3" => vec![(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
        "petersen" => vec![
            (0, 1), (0, 4), (0, 5), (1, 2), (1, 6), (2, 3), (2, 7), (3, 4),
            (3, 8), (4, 9), (5, 7), (5, 8), (6, 8), (6, 9), (7, 9),
        ],
        "prism" => vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 4), (2, 5), (3, 4), (3, 5), (4, 5)],
        _ => {
            return Err(Error::Invalid(format!(
                "unknown graph {name:?}; choose one of {}",
                NAMED_GRAPHS.join(", ")
            )))
        }
    };
    let n = edges.iter().map(|&(_, v)| v + 1).max().unwrap();
    Graph::new(n, edges)
}

/// `"N M"` header followed by one `"u v"` line per edge.
pub fn graph_to_text(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn graph_from_text(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let parse_pair = |lineno: usize, line: &str| -> Result<(usize, usize)> {
        let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
            _ => Err(Error::Parse(format!("line {}: expected two nonnegative integers, got {line:?}", lineno + 1))),
        }
    };
    let (hl, header) = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
    let (n, m) = parse_pair(hl, header)?;
    let mut edges = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let (u, v) = parse_pair(lineno, line)?;
        if !(u < v && v < n) {
            return Err(Error::Parse(format!("line {}: need 0 <= u < v < {n}, got {u} {v}", lineno + 1)));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!("header declares {m} edges but {} follow", edges.len())));
    }
    Graph::new(n, edges).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    graph_from_text(&read_text(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &graph_to_text(g))
}

/// Random simple cubic graph on `n` vertices from the pairing model: shuffle
/// `3n` half-edges, pair them up, and retry until the result has no loops or
/// parallel edges. Edges come out sorted.
pub fn gen_random_cubic(n: usize, seed: u64) -> Result<Graph> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::Invalid(format!("a cubic graph needs an even vertex count >= 4, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..3 * n).map(|p| p / 3).collect();
    loop {
        points.shuffle(&mut rng);
        let mut edges: Vec<Edge> = points.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
        if edges.iter().any(|&(u, v)| u == v) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return Graph::new(n, edges);
    }
}

/// Every cubic graph on `n` vertices up to isomorphism (connected or not),
/// each with sorted edges. Practical for `n <= 10`.
pub fn all_cubic_graphs(n: usize) -> Result<Vec<Graph>> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::Invalid(format!("a cubic graph needs an even vertex count >= 4, got {n}")));
    }
    if n > 12 {
        return Err(Error::Invalid(format!("cubic graph enumeration is limited to n <= 12, got {n}")));
    }
    let mut adj = vec![0u64; n];
    let mut found: Vec<Vec<u64>> = Vec::new();
    extend_cubic(n, &mut adj, &mut found);
    let mut reps: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
    for g in found {
        let inv = invariant(&g);
        if !reps.iter().any(|(rinv, r)| *rinv == inv && isomorphic(r, &g)) {
            reps.push((inv, g));
        }
    }
    reps.into_iter()
        .map(|(_, adj)| {
            let mut edges = Vec::new();
            for (u, row) in adj.iter().enumerate() {
                for v in u + 1..n {
                    if row >> v & 1 == 1 {
                        edges.push((u, v));
                    }
                }
            }
            Graph::new(n, edges)
        })
        .collect()
}

// Saturates the lowest-index vertex that still needs edges. Candidate partners
// with identical neighbourhoods are interchangeable, so only the first of each
// class is tried.
fn extend_cubic(n: usize, adj: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    let Some(v) = (0..n).find(|&v| adj[v].count_ones() < 3) else {
        out.push(adj.clone());
        return;
    };
    let mut tried: Vec<u64> = Vec::new();
    for w in v + 1..n {
        if adj[w].count_ones() >= 3 || adj[v] >> w & 1 == 1 {
            continue;
        }
        if tried.contains(&adj[w]) {
            continue;
        }
        tried.push(adj[w]);
        adj[v] |= 1 << w;
        adj[w] |= 1 << v;
        extend_cubic(n, adj, out);
        adj[v] &= !(1 << w);
        adj[w] &= !(1 << v);
    }
}

fn invariant(adj: &[u64]) -> Vec<u64> {
    // Per-vertex (triangles, sum of neighbour-of-neighbour counts), sorted.
    let mut sig: Vec<u64> = (0..adj.len())
        .map(|v| {
            let mut tri = 0u64;
            let mut two = 0u64;
            for w in bits(adj[v]) {
                tri += (adj[w] & adj[v]).count_ones() as u64;
                two |= adj[w];
            }
            (tri << 32) | two.count_ones() as u64
        })
        .collect();
    sig.sort_unstable();
    sig
}

fn bits(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(b)
        }
    })
}

fn isomorphic(a: &[u64], b: &[u64]) -> bool {
    fn go(a: &[u64], b: &[u64], map: &mut Vec<usize>, used: u64, v: usize) -> bool {
        if v == a.len() {
            return true;
        }
        for w in 0..b.len() {
            if used >> w & 1 == 1 {
                continue;
            }
            let ok = (0..v).all(|u| (a[v] >> u & 1) == (b[w] >> map[u] & 1));
            if ok {
                map.push(w);
                if go(a, b, map, used | 1 << w, v + 1) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    a.len() == b.len() && go(a, b, &mut Vec::with_capacity(a.len()), 0, 0)
}
