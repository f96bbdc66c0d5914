//! JSON file formats for instances and allocations.
//!
//! Instance file:
//!
//! ```json
//! {
//!   "agents": ["a", "b"],
//!   "items": [{"name": "x", "utilities": {"a": "7/5", "b": "1"}}]
//! }
//! ```
//!
//! Allocation file: a JSON object mapping item name to agent name.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::instance::{Allocation, Assignment, Instance};
use crate::rational;

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    agents: Vec<String>,
    items: Vec<ItemEntry>,
}

#[derive(Serialize, Deserialize)]
struct ItemEntry {
    name: String,
    utilities: Map<String, Value>,
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn instance_to_json(instance: &Instance) -> String {
    let items = instance
        .items()
        .iter()
        .enumerate()
        .map(|(i, name)| ItemEntry {
            name: name.clone(),
            utilities: instance
                .row(i)
                .iter()
                .map(|(a, u)| (instance.agents()[*a].clone(), Value::String(rational::to_string(u))))
                .collect(),
        })
        .collect();
    to_json_string(&InstanceFile { agents: instance.agents().to_vec(), items })
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance file: {e}")))?;
    let mut agent_pos = std::collections::HashMap::new();
    for (i, a) in file.agents.iter().enumerate() {
        if agent_pos.insert(a.as_str(), i).is_some() {
            return Err(Error::Parse(format!("agents[{i}]: duplicate agent {a:?}")));
        }
    }
    let mut names = Vec::with_capacity(file.items.len());
    let mut rows = Vec::with_capacity(file.items.len());
    for (i, item) in file.items.iter().enumerate() {
        let mut row = Vec::with_capacity(item.utilities.len());
        for (agent, lit) in &item.utilities {
            let ctx = || format!("items[{i}] ({:?}).utilities.{agent}", item.name);
            let a = *agent_pos
                .get(agent.as_str())
                .ok_or_else(|| Error::Parse(format!("{}: unknown agent", ctx())))?;
            let s = match lit {
                Value::String(s) => s.clone(),
                Value::Number(n) if n.is_u64() || n.is_i64() => n.to_string(),
                other => return Err(Error::Parse(format!("{}: expected a rational string, got {other}", ctx()))),
            };
            let u = rational::parse_nonneg(&s).map_err(|e| Error::Parse(format!("{}: {e}", ctx())))?;
            row.push((a, u));
        }
        names.push(item.name.clone());
        rows.push(row);
    }
    Instance::new(file.agents, names, rows).map_err(|e| match e {
        Error::Invalid(m) => Error::Parse(m),
        other => other,
    })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    instance_from_json(&read_text(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &instance_to_json(instance))
}

pub fn allocation_to_json(instance: &Instance, alloc: &Allocation) -> String {
    // Keep the instance's item order rather than sorted keys.
    let map: Map<String, Value> = instance
        .items()
        .iter()
        .zip(alloc.holders())
        .map(|(it, &a)| (it.clone(), Value::String(instance.agents()[a].clone())))
        .collect();
    to_json_string(&map)
}

pub fn assignment_from_json(text: &str) -> Result<Assignment> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("allocation file: {e}")))
}

pub fn read_allocation(instance: &Instance, path: impl AsRef<Path>) -> Result<Allocation> {
    let asg = assignment_from_json(&read_text(path.as_ref())?)?;
    Allocation::from_assignment(instance, &asg)
}

pub fn write_allocation(instance: &Instance, alloc: &Allocation, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &allocation_to_json(instance, alloc))
}
