//! Structure of normal-form allocations: the vertex/edge partition, its
//! counting identities, the closed-form product, and the resulting upper bound
//! on the optimum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{induced_edges, Edge, Graph, VertexSet};
use crate::instance::{Allocation, WelfareValue};
use crate::normalize::normal_form_violation;
use crate::rational::{frac, int, Rational};
use crate::reduction::ReducedInstance;
use crate::vertex_cover::{cover_number, DEFAULT_COVER_BOUND};

/// Vertex and edge classes of a normal-form allocation.
///
/// * `c`: vertices whose agent holds a vertex item; `i` the rest;
/// * `i3` / `i2`: vertices in `i` whose agent holds all three / two of its
///   shared items;
/// * `e0`, `e1`, `e2`: edges whose agent holds 0, 1, 2 shared items, with `e1`
///   split into `e1c` (touching `c`) and `e1i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureProfile {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub k: usize,
    pub c: Vec<usize>,
    pub i: Vec<usize>,
    pub i2: Vec<usize>,
    pub i3: Vec<usize>,
    pub e0: Vec<Edge>,
    pub e1c: Vec<Edge>,
    pub e1i: Vec<Edge>,
    pub e2: Vec<Edge>,
    /// `|E2| - |I2| - |E0|`
    pub t: i64,
}

impl StructureProfile {
    pub fn e1_len(&self) -> usize {
        self.e1c.len() + self.e1i.len()
    }
}

pub fn analyze_structure(r: &ReducedInstance, alloc: &Allocation) -> Result<StructureProfile> {
    if let Some(why) = normal_form_violation(r, alloc)? {
        return Err(Error::NotNormalForm(why));
    }
    let g = &r.graph;
    let t = &r.tags;
    let held_by = |agent: usize| alloc.holders().iter().filter(move |&&h| h == agent).count();
    let mut c = Vec::new();
    let mut i = Vec::new();
    let mut i2 = Vec::new();
    let mut i3 = Vec::new();
    for v in 0..g.n() {
        let av = t.vertex_agent(v);
        if t.vertex_items().any(|j| alloc.holder(t.vertex_item(j)) == av) {
            c.push(v);
            continue;
        }
        i.push(v);
        match held_by(av) {
            3 => i3.push(v),
            2 => i2.push(v),
            h => {
                return Err(Error::NotNormalForm(format!(
                    "{} holds {h} shared items without a vertex item",
                    r.instance.agents()[av]
                )))
            }
        }
    }
    let in_c: VertexSet = c.iter().copied().collect();
    let (mut e0, mut e1c, mut e1i, mut e2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (e, &(u, w)) in g.edges().iter().enumerate() {
        let shared = [u, w].iter().filter(|&&x| alloc.holder(t.shared_item(g, x, e).unwrap()) == t.edge_agent(e)).count();
        match shared {
            0 => e0.push((u, w)),
            1 if in_c.contains(u) || in_c.contains(w) => e1c.push((u, w)),
            1 => e1i.push((u, w)),
            _ => e2.push((u, w)),
        }
    }
    let tval = e2.len() as i64 - i2.len() as i64 - e0.len() as i64;
    Ok(StructureProfile { n_vertices: g.n(), n_edges: g.m(), k: r.params.k, c, i, i2, i3, e0, e1c, e1i, e2, t: tval })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub all_hold: bool,
}

impl IdentityReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Counting identities and structural facts of a profile.
pub fn verify_identities(r: &ReducedInstance, p: &StructureProfile) -> IdentityReport {
    let g = &r.graph;
    let n = p.n_vertices as i64;
    let m = p.n_edges as i64;
    let k = p.k as i64;
    let (i2, i3) = (p.i2.len() as i64, p.i3.len() as i64);
    let (e0, e1, e1i, e2) = (p.e0.len() as i64, p.e1_len() as i64, p.e1i.len() as i64, p.e2.len() as i64);
    let c: VertexSet = p.c.iter().copied().collect();
    let i2set: VertexSet = p.i2.iter().copied().collect();
    let iset: VertexSet = p.i.iter().copied().collect();
    let eq = |name, lhs: i64, rhs: i64| IdentityCheck { name, lhs, rhs, holds: lhs == rhs };
    let checks = vec![
        eq("|C| = k", p.c.len() as i64, k),
        eq("3|I3| + 2|I2| + 2|E2| + |E1| = 3N", 3 * i3 + 2 * i2 + 2 * e2 + e1, 3 * n),
        eq("|I3| + |I2| = N - k", i3 + i2, n - k),
        eq("|E2| + |E1| + |E0| = M", e2 + e1 + e0, m),
        eq("|E2| = (3k - M) + |I2| + |E0|", e2, (3 * k - m) + i2 + e0),
        eq(
            "E2 edges with an endpoint outside C = 0",
            p.e2.iter().filter(|&&(u, v)| !(c.contains(u) && c.contains(v))).count() as i64,
            0,
        ),
        eq(
            "E0 edges with an endpoint outside I2 = 0",
            p.e0.iter().filter(|&&(u, v)| !(i2set.contains(u) && i2set.contains(v))).count() as i64,
            0,
        ),
        eq("edges induced by I = |E1I| + |E0|", induced_edges(g, &iset).len() as i64, e1i + e0),
        IdentityCheck { name: "3|I2| >= |E1I| + 2|E0|", lhs: 3 * i2, rhs: e1i + 2 * e0, holds: 3 * i2 >= e1i + 2 * e0 },
    ];
    let all_hold = checks.iter().all(|c| c.holds);
    IdentityReport { checks, all_hold }
}

/// `(2/3)^|I2| (1 + alpha)^|E2| (1 - alpha)^|E0|` over the `N + M` agents.
pub fn product_formula(p: &StructureProfile, alpha: &Rational) -> WelfareValue {
    WelfareValue::from_powers(
        p.n_vertices + p.n_edges,
        &[
            (frac(2, 3), p.i2.len() as i64),
            (int(1) + alpha, p.e2.len() as i64),
            (int(1) - alpha, p.e0.len() as i64),
        ],
    )
}

/// Upper bound on the optimal product of the reduction of `g` with `k` vertex
/// items: `(1 + alpha)^(3k - M)`, times `(2 (1 + alpha) / 3)^ceil((tau - k) / 3)`
/// when the minimum cover `tau` exceeds `k`.
pub fn soundness_bound(g: &Graph, k: usize, alpha: &Rational) -> Result<WelfareValue> {
    let tau = cover_number(g, DEFAULT_COVER_BOUND)?;
    Ok(soundness_bound_with_tau(g, k, alpha, tau))
}

pub fn soundness_bound_with_tau(g: &Graph, k: usize, alpha: &Rational, tau: usize) -> WelfareValue {
    let one_plus = int(1) + alpha;
    let penalty = tau.saturating_sub(k).div_ceil(3) as i64;
    WelfareValue::from_powers(
        g.n() + g.m(),
        &[(one_plus.clone(), 3 * k as i64 - g.m() as i64), (int(2) * one_plus / int(3), penalty)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named_graph;
    use crate::normalize::normalize;
    use crate::reduction::{build_instance, completeness_allocation, ReductionParams};

    #[test]
    fn k4_completeness_profile() {
        let g = named_graph("K4").unwrap();
        let r = build_instance(&g, &ReductionParams::new(frac(2, 5), 3)).unwrap();
        let a = completeness_allocation(&r, &[0, 1, 2].into_iter().collect()).unwrap();
        let p = analyze_structure(&r, &a).unwrap();
        assert_eq!(p.c, vec![0, 1, 2]);
        assert_eq!(p.i3, vec![3]);
        assert!(p.i2.is_empty() && p.e0.is_empty());
        assert_eq!((p.e2.len(), p.e1_len()), (3, 3));
        let rep = verify_identities(&r, &p);
        assert!(rep.all_hold, "{rep:?}");
        assert_eq!(rep.checks[1].lhs, 12);
        assert_eq!(product_formula(&p, &frac(2, 5)).product, frac(343, 125));
    }

    #[test]
    fn fabricated_edge_breaks_first_identity() {
        let g = named_graph("K4").unwrap();
        let r = build_instance(&g, &ReductionParams::new(frac(2, 5), 3)).unwrap();
        let a = completeness_allocation(&r, &[0, 1, 2].into_iter().collect()).unwrap();
        let mut p = analyze_structure(&r, &a).unwrap();
        p.e2.push((0, 3));
        let rep = verify_identities(&r, &p);
        assert!(!rep.all_hold);
        assert!(rep.failures().any(|c| c.name.starts_with("3|I3|")));
    }

    #[test]
    fn non_fixpoint_names_rule() {
        let g = named_graph("K4").unwrap();
        let r = build_instance(&g, &ReductionParams::new(frac(2, 5), 3)).unwrap();
        let mut a = completeness_allocation(&r, &[0, 1, 2].into_iter().collect()).unwrap();
        a.set_holder(r.instance.item_id("si:0@0-1").unwrap(), 0);
        let err = analyze_structure(&r, &a).unwrap_err().to_string();
        assert!(err.contains("rule 1"), "{err}");
        assert!(analyze_structure(&r, &normalize(&r, &a).unwrap()).is_ok());
    }

    #[test]
    fn bounds_on_named_graphs() {
        let a = frac(2, 5);
        let k4 = named_graph("K4").unwrap();
        assert_eq!(soundness_bound(&k4, 2, &a).unwrap().product, frac(14, 15));
        assert_eq!(soundness_bound(&k4, 3, &a).unwrap().product, frac(343, 125));
        let pet = named_graph("Petersen").unwrap();
        assert_eq!(soundness_bound(&pet, 5, &a).unwrap().product, frac(14, 15));
    }

    #[test]
    fn empty_profile_formula_is_one() {
        let p = StructureProfile {
            n_vertices: 4,
            n_edges: 6,
            k: 2,
            c: vec![],
            i: vec![],
            i2: vec![],
            i3: vec![],
            e0: vec![],
            e1c: vec![],
            e1i: vec![],
            e2: vec![],
            t: 0,
        };
        assert_eq!(product_formula(&p, &frac(2, 5)).product, int(1));
    }
}
