//! Allocation instances with additive utilities, allocations, and their exact
//! Nash social welfare.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Agents, items and a sparse nonnegative utility matrix. Entries that are not
/// stored are exactly zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    agents: Vec<String>,
    items: Vec<String>,
    /// Per item, `(agent index, utility)` pairs sorted by agent index, all positive.
    utilities: Vec<Vec<(usize, Rational)>>,
    agent_index: HashMap<String, usize>,
    item_index: HashMap<String, usize>,
}

impl Instance {
    /// Builds an instance from names and per-item `(agent, utility)` lists.
    /// Zero entries are dropped; negative ones and duplicate names are rejected.
    pub fn new(
        agents: Vec<String>,
        items: Vec<String>,
        utilities: Vec<Vec<(usize, Rational)>>,
    ) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::Invalid("an instance needs at least one agent".into()));
        }
        if utilities.len() != items.len() {
            return Err(Error::Invalid(format!(
                "{} items but {} utility rows",
                items.len(),
                utilities.len()
            )));
        }
        let agent_index = unique_index(&agents, "agent")?;
        let item_index = unique_index(&items, "item")?;
        let mut rows = Vec::with_capacity(utilities.len());
        for (i, row) in utilities.into_iter().enumerate() {
            let mut seen = HashSet::new();
            let mut clean = Vec::with_capacity(row.len());
            for (a, u) in row {
                if a >= agents.len() {
                    return Err(Error::Invalid(format!("item {:?}: agent index {a} out of range", items[i])));
                }
                if !seen.insert(a) {
                    return Err(Error::Invalid(format!(
                        "item {:?}: duplicate utility for agent {:?}",
                        items[i], agents[a]
                    )));
                }
                if u.is_negative() {
                    return Err(Error::Invalid(format!(
                        "item {:?}: negative utility {} for agent {:?}",
                        items[i], u, agents[a]
                    )));
                }
                if !u.is_zero() {
                    clean.push((a, u));
                }
            }
            clean.sort_by_key(|(a, _)| *a);
            rows.push(clean);
        }
        Ok(Instance { agents, items, utilities: rows, agent_index, item_index })
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn agent_id(&self, name: &str) -> Option<usize> {
        self.agent_index.get(name).copied()
    }

    pub fn item_id(&self, name: &str) -> Option<usize> {
        self.item_index.get(name).copied()
    }

    /// Positive utilities for `item`, sorted by agent index.
    pub fn row(&self, item: usize) -> &[(usize, Rational)] {
        &self.utilities[item]
    }

    pub fn utility(&self, agent: usize, item: usize) -> Rational {
        self.utilities[item]
            .binary_search_by_key(&agent, |(a, _)| *a)
            .map(|k| self.utilities[item][k].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// Agents that value `item` positively.
    pub fn interested(&self, item: usize) -> impl Iterator<Item = usize> + '_ {
        self.utilities[item].iter().map(|(a, _)| *a)
    }
}

fn unique_index(names: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), i).is_some() {
            return Err(Error::Invalid(format!("duplicate {what} identifier {n:?}")));
        }
    }
    Ok(map)
}

/// Name-level assignment as read from an allocation file.
pub type Assignment = BTreeMap<String, String>;

/// A total assignment of the instance's items to agents, by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    holders: Vec<usize>,
}

impl Allocation {
    /// Checks length and agent range against `instance`.
    pub fn new(instance: &Instance, holders: Vec<usize>) -> Result<Self> {
        let mut problems = Vec::new();
        if holders.len() != instance.n_items() {
            problems.push(format!("{} holders for {} items", holders.len(), instance.n_items()));
        }
        for (i, &a) in holders.iter().enumerate() {
            if a >= instance.n_agents() {
                problems.push(format!("item #{i} assigned to agent index {a} out of range"));
            }
        }
        if problems.is_empty() {
            Ok(Allocation { holders })
        } else {
            Err(Error::NotPartition(problems))
        }
    }

    pub fn from_assignment(instance: &Instance, assignment: &Assignment) -> Result<Self> {
        let violations = validate(instance, assignment);
        if !violations.is_empty() {
            return Err(Error::NotPartition(violations.iter().map(|v| v.to_string()).collect()));
        }
        let holders = instance
            .items()
            .iter()
            .map(|it| instance.agent_id(&assignment[it]).unwrap())
            .collect();
        Ok(Allocation { holders })
    }

    pub fn to_assignment(&self, instance: &Instance) -> Assignment {
        self.holders
            .iter()
            .enumerate()
            .map(|(i, &a)| (instance.items()[i].clone(), instance.agents()[a].clone()))
            .collect()
    }

    pub fn holders(&self) -> &[usize] {
        &self.holders
    }

    pub fn holder(&self, item: usize) -> usize {
        self.holders[item]
    }

    pub(crate) fn set_holder(&mut self, item: usize, agent: usize) {
        self.holders[item] = agent;
    }

    fn fits(&self, instance: &Instance) -> Result<()> {
        if self.holders.len() != instance.n_items() || self.holders.iter().any(|&a| a >= instance.n_agents()) {
            return Err(Error::NotPartition(vec!["allocation does not match the instance".into()]));
        }
        Ok(())
    }

    /// Exact utility of every agent, in agent order.
    pub fn utilities(&self, instance: &Instance) -> Result<Vec<Rational>> {
        self.fits(instance)?;
        let mut u = vec![Rational::zero(); instance.n_agents()];
        for (i, &a) in self.holders.iter().enumerate() {
            u[a] += instance.utility(a, i);
        }
        Ok(u)
    }

    pub fn bundle(&self, agent: usize) -> impl Iterator<Item = usize> + '_ {
        self.holders.iter().enumerate().filter(move |(_, &a)| a == agent).map(|(i, _)| i)
    }
}

/// One reason an assignment fails to be a partition of the items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Unassigned { item: String },
    UnknownItem { item: String },
    UnknownAgent { item: String, agent: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Unassigned { item } => write!(f, "item {item:?} is not assigned"),
            Violation::UnknownItem { item } => write!(f, "item {item:?} is not in the instance"),
            Violation::UnknownAgent { item, agent } => {
                write!(f, "item {item:?} assigned to unknown agent {agent:?}")
            }
        }
    }
}

/// Empty iff `assignment` maps every item of `instance` to one of its agents
/// and mentions nothing else.
pub fn validate(instance: &Instance, assignment: &Assignment) -> Vec<Violation> {
    let mut out = Vec::new();
    for item in instance.items() {
        match assignment.get(item) {
            None => out.push(Violation::Unassigned { item: item.clone() }),
            Some(agent) if instance.agent_id(agent).is_none() => {
                out.push(Violation::UnknownAgent { item: item.clone(), agent: agent.clone() })
            }
            Some(_) => {}
        }
    }
    for item in assignment.keys() {
        if instance.item_id(item).is_none() {
            out.push(Violation::UnknownItem { item: item.clone() });
        }
    }
    out
}

/// Exact utility of `agent` (by name) under `alloc`.
pub fn agent_utility(instance: &Instance, alloc: &Allocation, agent: &str) -> Result<Rational> {
    let a = instance.agent_id(agent).ok_or_else(|| Error::UnknownAgent(agent.to_string()))?;
    alloc.fits(instance)?;
    Ok(alloc.bundle(a).map(|i| instance.utility(a, i)).sum())
}

pub fn nsw_product(instance: &Instance, alloc: &Allocation) -> Result<WelfareValue> {
    Ok(WelfareValue::from_utilities(&alloc.utilities(instance)?))
}

/// Exact welfare of an allocation: the product of agent utilities, plus the data
/// needed to order allocations whose product is zero. Equality and ordering
/// follow [`compare`] and ignore the floating-point field.
#[derive(Clone, Debug)]
pub struct WelfareValue {
    pub product: Rational,
    /// `(1/n) ln(product)`, or negative infinity when the product is zero.
    pub log_geomean: f64,
    pub agents: usize,
    pub zero_count: usize,
    /// Product of the nonzero utilities.
    pub nonzero_product: Rational,
}

impl WelfareValue {
    pub fn from_utilities(utilities: &[Rational]) -> Self {
        let mut zero_count = 0;
        let mut nonzero = Rational::one();
        let mut log_sum = 0.0;
        for u in utilities {
            if u.is_zero() {
                zero_count += 1;
            } else {
                nonzero *= u;
                log_sum += rational::ln(u);
            }
        }
        Self::assemble(utilities.len(), zero_count, nonzero, log_sum)
    }

    /// Value of `prod base_i^exp_i` over `agents` agents, with the logarithm
    /// accumulated factor by factor. Bases must be positive.
    pub fn from_powers(agents: usize, factors: &[(Rational, i64)]) -> Self {
        let mut product = Rational::one();
        let mut log_sum = 0.0;
        for (base, exp) in factors {
            if *exp != 0 {
                product *= rational::pow(base, *exp);
                log_sum += *exp as f64 * rational::ln(base);
            }
        }
        Self::assemble(agents, 0, product, log_sum)
    }

    pub(crate) fn assemble(agents: usize, zero_count: usize, nonzero_product: Rational, log_sum: f64) -> Self {
        let (product, log_geomean) = if zero_count > 0 {
            (Rational::zero(), f64::NEG_INFINITY)
        } else {
            (nonzero_product.clone(), log_sum / agents.max(1) as f64)
        };
        WelfareValue { product, log_geomean, agents, zero_count, nonzero_product }
    }

    /// Approximate Nash social welfare (geometric mean).
    pub fn geomean(&self) -> f64 {
        self.log_geomean.exp()
    }
}

/// Total order on welfare values: larger exact product first; among zero
/// products, fewer starving agents, then larger product of the rest.
pub fn compare(a: &WelfareValue, b: &WelfareValue) -> Ordering {
    a.product
        .cmp(&b.product)
        .then_with(|| b.zero_count.cmp(&a.zero_count))
        .then_with(|| a.nonzero_product.cmp(&b.nonzero_product))
}

impl PartialEq for WelfareValue {
    fn eq(&self, other: &Self) -> bool {
        compare(self, other) == Ordering::Equal
    }
}

impl Eq for WelfareValue {}

impl PartialOrd for WelfareValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WelfareValue {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}
