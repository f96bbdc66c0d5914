//! Improving moves that bring an allocation of a reduced instance into normal
//! form without lowering its welfare.
//!
//! * pass 0: items held by an agent that does not value them go to an agent that
//!   does (the lowest-utility one); single-interest items go to their agent;
//! * pass 1: a vertex agent holding two or more vertex items hands one to a
//!   vertex agent holding none, until every vertex agent holds at most one;
//! * pass 2: sweeps over the shared items in incidence order, moving each one to
//!   the holder prescribed by [`lemma2_rule`] whenever that strictly raises the
//!   welfare, until a sweep makes no move.

use std::cmp::Ordering;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{nsw_product, Allocation};
use crate::rational::Rational;
use crate::reduction::ReducedInstance;

/// Which exchange rule decides a shared item, and who should hold it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RuleVerdict {
    pub rule: u8,
    pub holder: usize,
}

/// Evaluates the four-rule cascade for the shared item `i(v, e)`:
///
/// 1. `a(v)` holds a vertex item: `a(e)` gets it;
/// 2. else `a(e)` holds the other shared item of `e`: `a(v)` gets it;
/// 3. else `a(v)` holds both of its other shared items: `a(e)` gets it;
/// 4. else `a(v)` gets it.
pub fn lemma2_rule(r: &ReducedInstance, alloc: &Allocation, v: usize, e: usize) -> Result<RuleVerdict> {
    if e >= r.graph.m() {
        return Err(Error::Invalid(format!("edge index {e} out of range")));
    }
    let t = &r.tags;
    let g = &r.graph;
    let item = t
        .shared_item(g, v, e)
        .ok_or_else(|| Error::Invalid(format!("vertex {v} is not an endpoint of edge {e}")))?;
    let (av, ae) = (t.vertex_agent(v), t.edge_agent(e));
    let has_vertex_item = t.vertex_items().any(|j| alloc.holder(t.vertex_item(j)) == av);
    if has_vertex_item {
        return Ok(RuleVerdict { rule: 1, holder: ae });
    }
    let (a, b) = g.edges()[e];
    let w = if a == v { b } else { a };
    let other_on_edge = t.shared_item(g, w, e).unwrap();
    if alloc.holder(other_on_edge) == ae {
        return Ok(RuleVerdict { rule: 2, holder: av });
    }
    let others_held = g.incident_edges()[v]
        .iter()
        .map(|&f| t.shared_item(g, v, f).unwrap())
        .filter(|&s| s != item && alloc.holder(s) == av)
        .count();
    if others_held == 2 {
        return Ok(RuleVerdict { rule: 3, holder: ae });
    }
    Ok(RuleVerdict { rule: 4, holder: av })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NormalizeStats {
    pub reassigned: usize,
    pub rebalanced: usize,
    pub exchanged: usize,
    pub sweeps: usize,
}

pub fn normalize(r: &ReducedInstance, alloc: &Allocation) -> Result<Allocation> {
    normalize_with_stats(r, alloc).map(|(a, _)| a)
}

pub fn normalize_with_stats(r: &ReducedInstance, alloc: &Allocation) -> Result<(Allocation, NormalizeStats)> {
    let inst = &r.instance;
    let t = &r.tags;
    let g = &r.graph;
    let mut out = alloc.clone();
    let mut util = out.utilities(inst)?;
    let mut stats = NormalizeStats::default();
    let mv = |out: &mut Allocation, util: &mut Vec<Rational>, item: usize, to: usize| {
        let from = out.holder(item);
        util[from] -= inst.utility(from, item);
        util[to] += inst.utility(to, item);
        out.set_holder(item, to);
    };

    // pass 0
    for item in 0..inst.n_items() {
        let holder = out.holder(item);
        let row = inst.row(item);
        if row.is_empty() || row.iter().any(|(a, _)| *a == holder) {
            continue;
        }
        let to = row.iter().map(|(a, _)| *a).min_by(|&x, &y| util[x].cmp(&util[y]).then(x.cmp(&y))).unwrap();
        mv(&mut out, &mut util, item, to);
        stats.reassigned += 1;
    }

    // pass 1
    let mut held = vec![Vec::new(); g.n()];
    for j in t.vertex_items() {
        let item = t.vertex_item(j);
        held[out.holder(item)].push(item);
    }
    while let Some(rich) =
        (0..g.n()).filter(|&v| held[v].len() >= 2).max_by(|&x, &y| held[x].len().cmp(&held[y].len()).then(y.cmp(&x)))
    {
        let Some(poor) = (0..g.n())
            .filter(|&v| held[v].is_empty())
            .min_by(|&x, &y| util[t.vertex_agent(x)].cmp(&util[t.vertex_agent(y)]).then(x.cmp(&y)))
        else {
            break;
        };
        let item = held[rich].pop().unwrap();
        mv(&mut out, &mut util, item, t.vertex_agent(poor));
        held[poor].push(item);
        stats.rebalanced += 1;
    }

    // pass 2
    loop {
        stats.sweeps += 1;
        let mut moved = false;
        for (s, &(v, e)) in t.incidences().iter().enumerate() {
            let item = t.shared_item_at(s);
            let verdict = lemma2_rule(r, &out, v, e)?;
            let from = out.holder(item);
            if from == verdict.holder {
                continue;
            }
            let to = verdict.holder;
            let before = [util[from].clone(), util[to].clone()];
            let after = [&util[from] - inst.utility(from, item), &util[to] + inst.utility(to, item)];
            if pair_order(&after, &before) == Ordering::Greater {
                mv(&mut out, &mut util, item, to);
                stats.exchanged += 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    debug_assert!(nsw_product(inst, &out)? >= nsw_product(inst, alloc)?);
    Ok((out, stats))
}

/// Welfare order restricted to two agents whose utilities are the only ones
/// that change.
fn pair_order(a: &[Rational; 2], b: &[Rational; 2]) -> Ordering {
    let zeros = |x: &[Rational; 2]| x.iter().filter(|u| u.is_zero()).count();
    let prod = |x: &[Rational; 2]| x.iter().filter(|u| !u.is_zero()).fold(Rational::from_integer(1.into()), |p, u| p * u);
    zeros(b).cmp(&zeros(a)).then_with(|| prod(a).cmp(&prod(b)))
}

/// First departure from normal form, if any.
pub fn normal_form_violation(r: &ReducedInstance, alloc: &Allocation) -> Result<Option<String>> {
    let inst = &r.instance;
    let t = &r.tags;
    let g = &r.graph;
    alloc.utilities(inst)?;
    for item in 0..inst.n_items() {
        let row = inst.row(item);
        let h = alloc.holder(item);
        if !row.is_empty() && !row.iter().any(|(a, _)| *a == h) {
            return Ok(Some(format!(
                "item {} is held by {} who does not value it",
                inst.items()[item],
                inst.agents()[h]
            )));
        }
    }
    let mut count = vec![0usize; g.n()];
    for j in t.vertex_items() {
        count[alloc.holder(t.vertex_item(j))] += 1;
    }
    if let Some(v) = (0..g.n()).find(|&v| count[v] > 1) {
        return Ok(Some(format!("{} holds {} vertex items (at most 1 allowed)", inst.agents()[v], count[v])));
    }
    for (s, &(v, e)) in t.incidences().iter().enumerate() {
        let item = t.shared_item_at(s);
        let verdict = lemma2_rule(r, alloc, v, e)?;
        if alloc.holder(item) != verdict.holder {
            return Ok(Some(format!(
                "rule {} violated: {} should be held by {} but {} holds it",
                verdict.rule,
                inst.items()[item],
                inst.agents()[verdict.holder],
                inst.agents()[alloc.holder(item)]
            )));
        }
    }
    Ok(None)
}
