//! Exact maximization of the product of utilities.
//!
//! Items valued by a single agent are forced to that agent and items valued by
//! nobody go to the first agent. The remaining items are grouped into classes of
//! identical items (equal utility columns). Agents that value some class are then
//! "closed" one at a time in a fixed order; closing an agent decides how many
//! items of each class it takes. Because the objective is a product of per-agent
//! factors, the best value of a partial run depends only on the remaining class
//! counts, which makes a layered dynamic program exact. Only classes shared by a
//! closed and an open agent vary between states, so the state count follows the
//! width of the agent order rather than the number of items.
//!
//! Among all optimal assignments that give every item to an agent valuing it and
//! hand out identical items in non-decreasing agent order, the lexicographically
//! smallest (in item order) is returned. It is found by fixing items one at a
//! time and checking reachability in the graph of optimal transitions, so the
//! answer does not depend on the worker count.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::{nsw_product, Allocation, Instance, WelfareValue};
use crate::par::Executor;
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Maximum number of item placements left open after preprocessing.
    pub item_limit: usize,
    pub worker_count: usize,
    pub time_limit: Option<Duration>,
    /// Maximum number of dynamic-programming states over all layers.
    pub state_limit: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { item_limit: 64, worker_count: 1, time_limit: None, state_limit: 20_000_000 }
    }
}

impl SearchConfig {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.worker_count = workers;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub choice_points: usize,
    pub classes: usize,
    pub layers: usize,
    pub states: usize,
    pub transitions: usize,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub allocation: Allocation,
    pub value: WelfareValue,
    pub stats: SearchStats,
}

pub fn exact_max_nsw(instance: &Instance, cfg: &SearchConfig) -> Result<(Allocation, WelfareValue)> {
    solve(instance, cfg).map(|s| (s.allocation, s.value))
}

/// Like [`exact_max_nsw`], with search statistics.
pub fn solve(instance: &Instance, cfg: &SearchConfig) -> Result<Solution> {
    if cfg.item_limit == 0 || cfg.worker_count == 0 || cfg.state_limit == 0 {
        return Err(Error::Invalid("search limits must be positive".into()));
    }
    let start = Instant::now();
    let problem = Problem::new(instance)?;
    if problem.choice_points > cfg.item_limit {
        return Err(Error::ChoiceLimit { choice_points: problem.choice_points, limit: cfg.item_limit });
    }
    let exec = Executor::new(cfg.worker_count);
    let clock = Clock { start, limit: cfg.time_limit, total: problem.order.len() };
    let dag = Dag::build(&problem, &exec, cfg.state_limit, &clock)?;
    let holders = dag.lex_first(&problem, &clock)?;
    let allocation = Allocation::new(instance, holders)?;
    let value = nsw_product(instance, &allocation)?;
    let stats = SearchStats {
        choice_points: problem.choice_points,
        classes: problem.classes.len(),
        layers: problem.order.len(),
        states: dag.states.iter().map(Vec::len).sum(),
        transitions: dag.edges.iter().map(Vec::len).sum(),
    };
    Ok(Solution { allocation, value, stats })
}

struct Clock {
    start: Instant,
    limit: Option<Duration>,
    total: usize,
}

impl Clock {
    fn check(&self, done: usize) -> Result<()> {
        match self.limit {
            Some(limit) if self.start.elapsed() > limit => Err(Error::TimeLimit { limit, done, total: self.total }),
            _ => Ok(()),
        }
    }
}

/// Product value with zero factors counted separately. Ordered like
/// [`crate::instance::compare`]: fewer zeros first, then larger product.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Val {
    zeros: u32,
    prod: Rational,
}

impl Val {
    fn one() -> Self {
        Val { zeros: 0, prod: Rational::one() }
    }

    fn factor(u: &Rational) -> Self {
        if u.is_zero() {
            Val { zeros: 1, prod: Rational::one() }
        } else {
            Val { zeros: 0, prod: u.clone() }
        }
    }

    fn times(&self, other: &Val) -> Val {
        Val { zeros: self.zeros + other.zeros, prod: &self.prod * &other.prod }
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        other.zeros.cmp(&self.zeros).then_with(|| self.prod.cmp(&other.prod))
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A class of identical items valued by at least two agents.
struct Class {
    items: Vec<usize>,
    /// Interested agents, ascending, with their per-item utility.
    agents: Vec<(usize, Rational)>,
    /// Position in the closing order of the last interested agent.
    last: usize,
}

/// One agent's view of the classes it values.
struct AgentPlan {
    agent: usize,
    base: Rational,
    /// `(class, stride)` for the mixed-radix option code.
    classes: Vec<(usize, u64)>,
    /// `multiples[i][c]` = utility of `c` items of `classes[i]`.
    multiples: Vec<Vec<Rational>>,
}

impl AgentPlan {
    fn counts(&self, code: u64, problem: &Problem) -> impl Iterator<Item = (usize, u16)> + '_ {
        let sizes: Vec<u64> = self.classes.iter().map(|&(g, _)| problem.classes[g].items.len() as u64 + 1).collect();
        self.classes
            .iter()
            .zip(sizes)
            .map(move |(&(g, stride), radix)| (g, ((code / stride) % radix) as u16))
    }

    fn utility(&self, code: u64, problem: &Problem) -> Rational {
        let mut u = self.base.clone();
        for (i, (_, c)) in self.counts(code, problem).enumerate() {
            u += &self.multiples[i][c as usize];
        }
        u
    }
}

struct Problem {
    fixed: Vec<Option<usize>>,
    classes: Vec<Class>,
    class_of: Vec<Option<usize>>,
    /// Closing order of agents that value at least one class.
    order: Vec<AgentPlan>,
    choice_points: usize,
}

impl Problem {
    fn new(instance: &Instance) -> Result<Self> {
        let n = instance.n_agents();
        let mut fixed = vec![None; instance.n_items()];
        let mut base = vec![Rational::zero(); n];
        let mut class_index: HashMap<&[(usize, Rational)], usize> = HashMap::new();
        let mut classes: Vec<Class> = Vec::new();
        let mut class_of = vec![None; instance.n_items()];
        for i in 0..instance.n_items() {
            let row = instance.row(i);
            match row.len() {
                0 => fixed[i] = Some(0),
                1 => {
                    fixed[i] = Some(row[0].0);
                    base[row[0].0] += &row[0].1;
                }
                _ => {
                    let g = *class_index.entry(row).or_insert_with(|| {
                        classes.push(Class { items: Vec::new(), agents: row.to_vec(), last: 0 });
                        classes.len() - 1
                    });
                    classes[g].items.push(i);
                    class_of[i] = Some(g);
                }
            }
        }
        if let Some(c) = classes.iter().find(|c| c.items.len() > u16::MAX as usize) {
            return Err(Error::Invalid(format!("{} identical items exceed the supported class size", c.items.len())));
        }
        let choice_points = classes.iter().map(|c| c.items.len()).sum();

        let mut valued: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (g, c) in classes.iter().enumerate() {
            for &(a, _) in &c.agents {
                valued[a].push(g);
            }
        }
        let agent_order = closing_order(&classes, &valued);
        for (pos, &a) in agent_order.iter().enumerate() {
            for &g in &valued[a] {
                classes[g].last = pos;
            }
        }
        let mut order = Vec::with_capacity(agent_order.len());
        for &a in &agent_order {
            let mut stride = 1u64;
            let mut cls = Vec::new();
            let mut multiples = Vec::new();
            for &g in &valued[a] {
                let size = classes[g].items.len();
                let u = &classes[g].agents.iter().find(|(b, _)| *b == a).unwrap().1;
                cls.push((g, stride));
                multiples.push((0..=size).map(|c| u * Rational::from_integer(c.into())).collect());
                stride = stride
                    .checked_mul(size as u64 + 1)
                    .ok_or_else(|| Error::Invalid(format!("agent {a} values too many item classes")))?;
            }
            order.push(AgentPlan { agent: a, base: base[a].clone(), classes: cls, multiples });
        }
        Ok(Problem { fixed, classes, class_of, order, choice_points })
    }
}

/// Greedy order keeping the set of partially decided classes small. Ties go to
/// the lower agent index.
fn closing_order(classes: &[Class], valued: &[Vec<usize>]) -> Vec<usize> {
    let weight: Vec<f64> = classes.iter().map(|c| ((c.items.len() + 1) as f64).ln()).collect();
    let mut open_count: Vec<usize> = classes.iter().map(|c| c.agents.len()).collect();
    let mut closed = vec![false; valued.len()];
    let candidates: Vec<usize> = (0..valued.len()).filter(|&a| !valued[a].is_empty()).collect();
    let mut order = Vec::with_capacity(candidates.len());
    for _ in 0..candidates.len() {
        // Change in frontier weight if `a` were closed next.
        let delta = |a: usize| -> f64 {
            valued[a]
                .iter()
                .map(|&g| {
                    let total = classes[g].agents.len();
                    let before = open_count[g] < total && open_count[g] > 0;
                    let after = open_count[g] - 1 < total && open_count[g] - 1 > 0;
                    match (before, after) {
                        (false, true) => weight[g],
                        (true, false) => -weight[g],
                        _ => 0.0,
                    }
                })
                .sum()
        };
        let mut best: Option<(f64, usize)> = None;
        for &a in &candidates {
            if closed[a] {
                continue;
            }
            let d = delta(a);
            if best.is_none_or(|(bd, _)| d < bd - 1e-12) {
                best = Some((d, a));
            }
        }
        let (_, a) = best.unwrap();
        closed[a] = true;
        for &g in &valued[a] {
            open_count[g] -= 1;
        }
        order.push(a);
    }
    order
}

type Key = Box<[u16]>;

#[derive(Clone, Copy)]
struct Transition {
    from: u32,
    to: u32,
    code: u64,
}

struct Dag {
    /// `states[t]`: remaining class counts before closing `order[t]`.
    states: Vec<Vec<Key>>,
    /// `edges[t]`: transitions from layer `t` to `t + 1`, grouped by source.
    edges: Vec<Vec<Transition>>,
    /// Transitions lying on some optimal path.
    optimal: Vec<Vec<Transition>>,
}

impl Dag {
    fn build(p: &Problem, exec: &Executor, state_limit: usize, clock: &Clock) -> Result<Self> {
        let initial: Key = p.classes.iter().map(|c| c.items.len() as u16).collect();
        let mut states: Vec<Vec<Key>> = vec![vec![initial]];
        let mut edges: Vec<Vec<Transition>> = Vec::with_capacity(p.order.len());
        let mut forward: Vec<Vec<Val>> = vec![vec![Val::one()]];
        let mut weights: Vec<HashMap<u64, Val>> = Vec::with_capacity(p.order.len());
        let mut total_states = 1usize;

        for (t, plan) in p.order.iter().enumerate() {
            clock.check(t)?;
            let expansions = exec.map(&states[t], |s| successors(p, t, plan, s));
            let mut index: HashMap<Key, u32> = HashMap::new();
            let mut next: Vec<Key> = Vec::new();
            let mut layer = Vec::new();
            let mut w: HashMap<u64, Val> = HashMap::new();
            for (from, succ) in expansions.into_iter().enumerate() {
                for (key, code) in succ {
                    let to = *index.entry(key).or_insert_with_key(|k| {
                        next.push(k.clone());
                        (next.len() - 1) as u32
                    });
                    w.entry(code).or_insert_with(|| Val::factor(&plan.utility(code, p)));
                    layer.push(Transition { from: from as u32, to, code });
                }
            }
            total_states += next.len();
            if total_states > state_limit {
                return Err(Error::StateLimit { states: total_states, limit: state_limit });
            }
            let incoming = group_by(&layer, next.len(), |e| e.to as usize);
            let f_prev = &forward[t];
            let f_next = exec.map(&incoming, |ins| {
                ins.iter()
                    .map(|&k| f_prev[layer[k].from as usize].times(&w[&layer[k].code]))
                    .max()
                    .expect("every state has a predecessor")
            });
            forward.push(f_next);
            states.push(next);
            edges.push(layer);
            weights.push(w);
        }

        let last = states.len() - 1;
        debug_assert_eq!(states[last].len(), 1);
        debug_assert!(states[last][0].iter().all(|&c| c == 0));

        // Best completion value from each state.
        let mut backward: Vec<Vec<Val>> = vec![Vec::new(); states.len()];
        backward[last] = vec![Val::one()];
        for t in (0..p.order.len()).rev() {
            clock.check(t)?;
            let outgoing = group_by(&edges[t], states[t].len(), |e| e.from as usize);
            let b_next = &backward[t + 1];
            let w = &weights[t];
            backward[t] = exec.map(&outgoing, |outs| {
                outs.iter()
                    .map(|&k| w[&edges[t][k].code].times(&b_next[edges[t][k].to as usize]))
                    .max()
                    .expect("every state has a successor")
            });
        }
        let best = forward[last][0].clone();
        debug_assert_eq!(best, backward[0][0]);

        let optimal = (0..p.order.len())
            .map(|t| {
                let keep = exec.map(&edges[t], |e| {
                    forward[t][e.from as usize].times(&weights[t][&e.code]).times(&backward[t + 1][e.to as usize]) == best
                });
                edges[t].iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| *e).collect()
            })
            .collect();
        Ok(Dag { states, edges, optimal })
    }

    /// Lexicographically smallest optimal assignment, fixing items in order.
    fn lex_first(&self, p: &Problem, clock: &Clock) -> Result<Vec<usize>> {
        // Per class, per interested agent (by position): allowed count range.
        let mut bounds: Vec<Vec<(u16, u16)>> = p
            .classes
            .iter()
            .map(|c| vec![(0, c.items.len() as u16); c.agents.len()])
            .collect();
        let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); p.classes.len()];
        let mut holders: Vec<usize> = p.fixed.iter().map(|f| f.unwrap_or(usize::MAX)).collect();
        for (item, class_of) in p.class_of.iter().enumerate() {
            let Some(g) = *class_of else { continue };
            clock.check(p.order.len())?;
            let class = &p.classes[g];
            let floor = chosen[g].last().copied().unwrap_or(0);
            let mut picked = None;
            for (pos_b, &(b, _)) in class.agents.iter().enumerate() {
                if b < floor {
                    continue;
                }
                let trial: Vec<(u16, u16)> = class
                    .agents
                    .iter()
                    .enumerate()
                    .map(|(pos, &(a, _))| {
                        let have = chosen[g].iter().filter(|&&x| x == a).count() as u16;
                        match pos.cmp(&pos_b) {
                            Ordering::Less => (have, have),
                            Ordering::Equal => (have + 1, class.items.len() as u16),
                            Ordering::Greater => (0, class.items.len() as u16),
                        }
                    })
                    .collect();
                let saved = std::mem::replace(&mut bounds[g], trial);
                if self.reachable(p, &bounds) {
                    picked = Some(b);
                    break;
                }
                bounds[g] = saved;
            }
            let b = picked.expect("an optimal assignment extends every feasible prefix");
            chosen[g].push(b);
            holders[item] = b;
        }
        Ok(holders)
    }

    fn reachable(&self, p: &Problem, bounds: &[Vec<(u16, u16)>]) -> bool {
        let mut reach = vec![true];
        for (t, plan) in p.order.iter().enumerate() {
            let allowed = |code: u64| {
                plan.counts(code, p).all(|(g, c)| {
                    let pos = p.classes[g].agents.iter().position(|(a, _)| *a == plan.agent).unwrap();
                    let (lo, hi) = bounds[g][pos];
                    lo <= c && c <= hi
                })
            };
            let mut next = vec![false; self.states[t + 1].len()];
            let mut verdict: HashMap<u64, bool> = HashMap::new();
            for e in &self.optimal[t] {
                if reach[e.from as usize] && !next[e.to as usize] && *verdict.entry(e.code).or_insert_with(|| allowed(e.code)) {
                    next[e.to as usize] = true;
                }
            }
            reach = next;
        }
        reach[0]
    }
}

fn successors(p: &Problem, t: usize, plan: &AgentPlan, state: &Key) -> Vec<(Key, u64)> {
    let mut out = Vec::new();
    let mut key = state.clone();
    fn rec(p: &Problem, t: usize, plan: &AgentPlan, i: usize, key: &mut Key, code: u64, out: &mut Vec<(Key, u64)>) {
        if i == plan.classes.len() {
            out.push((key.clone(), code));
            return;
        }
        let (g, stride) = plan.classes[i];
        let avail = key[g];
        let lo = if p.classes[g].last == t { avail } else { 0 };
        for c in lo..=avail {
            key[g] = avail - c;
            rec(p, t, plan, i + 1, key, code + c as u64 * stride, out);
        }
        key[g] = avail;
    }
    rec(p, t, plan, 0, &mut key, 0, &mut out);
    out
}

fn group_by<F: Fn(&Transition) -> usize>(edges: &[Transition], n: usize, key: F) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n];
    for (k, e) in edges.iter().enumerate() {
        out[key(e)].push(k);
    }
    out
}
