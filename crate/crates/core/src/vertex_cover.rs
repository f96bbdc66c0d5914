//! Exact minimum vertex cover for small graphs.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

pub const DEFAULT_COVER_BOUND: usize = 40;

/// Minimum vertex cover with the default size bound.
pub fn min_vertex_cover(g: &Graph) -> Result<VertexSet> {
    min_vertex_cover_bounded(g, DEFAULT_COVER_BOUND)
}

/// Size of a minimum vertex cover.
pub fn cover_number(g: &Graph, bound: usize) -> Result<usize> {
    Ok(Solver::new(g, bound)?.min_size(0, 0).expect("unconstrained cover exists"))
}

/// A minimum vertex cover; among all minimum covers, the one whose sorted member
/// list is lexicographically smallest.
pub fn min_vertex_cover_bounded(g: &Graph, bound: usize) -> Result<VertexSet> {
    let s = Solver::new(g, bound)?;
    let tau = s.min_size(0, 0).expect("unconstrained cover exists");
    let (mut inside, mut outside) = (0u64, 0u64);
    for v in 0..g.n() {
        if inside.count_ones() as usize == tau {
            outside |= 1 << v;
            continue;
        }
        let with_v = inside | 1 << v;
        if s.min_size(with_v, outside).is_some_and(|k| k <= tau) {
            inside = with_v;
        } else {
            outside |= 1 << v;
        }
    }
    let cover = VertexSet::from_mask(inside, g.n());
    debug_assert!(crate::graph::is_vertex_cover(g, &cover));
    Ok(cover)
}

struct Solver {
    n: usize,
    adj: Vec<u64>,
}

impl Solver {
    fn new(g: &Graph, bound: usize) -> Result<Self> {
        if g.n() > bound.min(64) {
            return Err(Error::CoverBound { n: g.n(), bound: bound.min(64) });
        }
        let mut adj = vec![0u64; g.n()];
        for &(u, v) in g.edges() {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Ok(Solver { n: g.n(), adj })
    }

    /// Smallest cover containing `inside` and disjoint from `outside`, if any.
    fn min_size(&self, inside: u64, outside: u64) -> Option<usize> {
        // Excluding a vertex forces its neighbours in.
        let mut forced = inside;
        for v in 0..self.n {
            if outside >> v & 1 == 1 {
                if self.adj[v] & outside != 0 {
                    return None;
                }
                forced |= self.adj[v];
            }
        }
        if forced & outside != 0 {
            return None;
        }
        let alive = self.full() & !forced & !outside;
        let mut best = usize::MAX;
        self.branch(alive, forced.count_ones() as usize, &mut best);
        Some(best)
    }

    fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    // `alive`: vertices not yet decided; only edges inside `alive` remain uncovered.
    fn branch(&self, alive: u64, taken: usize, best: &mut usize) {
        if taken >= *best {
            return;
        }
        let mut alive = alive;
        // Drop isolated vertices.
        let mut maxdeg = 0;
        let mut pick = usize::MAX;
        let mut edges2 = 0usize;
        for v in ones(alive) {
            let d = (self.adj[v] & alive).count_ones() as usize;
            if d == 0 {
                alive &= !(1 << v);
                continue;
            }
            edges2 += d;
            if d > maxdeg {
                maxdeg = d;
                pick = v;
            }
        }
        if maxdeg == 0 {
            *best = taken;
            return;
        }
        let edges = edges2 / 2;
        if taken + edges.div_ceil(maxdeg) >= *best {
            return;
        }
        if maxdeg <= 2 {
            *best = (*best).min(taken + self.paths_and_cycles(alive));
            return;
        }
        // Degree-one vertex: taking its neighbour is always safe.
        if let Some(v) = ones(alive).find(|&v| (self.adj[v] & alive).count_ones() == 1) {
            let u = (self.adj[v] & alive).trailing_zeros() as usize;
            self.branch(alive & !(1 << u) & !(1 << v), taken + 1, best);
            return;
        }
        let nb = self.adj[pick] & alive;
        self.branch(alive & !(1 << pick), taken + 1, best);
        self.branch(alive & !nb & !(1 << pick), taken + nb.count_ones() as usize, best);
    }

    // Exact cover size of a graph with maximum degree 2.
    fn paths_and_cycles(&self, alive: u64) -> usize {
        let mut seen = 0u64;
        let mut total = 0;
        for s in ones(alive) {
            if seen >> s & 1 == 1 {
                continue;
            }
            let mut comp = 0u64;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                if comp >> v & 1 == 1 {
                    continue;
                }
                comp |= 1 << v;
                stack.extend(ones(self.adj[v] & alive & !comp));
            }
            seen |= comp;
            let verts = comp.count_ones() as usize;
            let is_cycle = ones(comp).all(|v| (self.adj[v] & alive).count_ones() == 2);
            total += if is_cycle { verts.div_ceil(2) } else { verts / 2 };
        }
        total
    }
}

fn ones(mut x: u64) -> impl Iterator<Item = usize> {
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
