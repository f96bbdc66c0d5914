//! Nash social welfare instances built from cubic graphs.
//!
//! The crate compiles a 3-regular graph into an allocation instance whose
//! optimal Nash social welfare tracks the graph's minimum vertex cover, and
//! provides the tools to check that relationship exactly at small scale:
//! exact rational welfare values, an exact maximizer, an improving-move
//! normalizer, and the counting identities of normal-form allocations.

pub mod constants;
pub mod error;
pub mod graph;
pub mod instance;
pub mod io;
pub mod normalize;
pub mod par;
pub mod rational;
pub mod reduction;
pub mod solver;
pub mod structure;
pub mod vertex_cover;

pub use constants::{hardness_constants, HardnessConstants};
pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
pub use instance::{agent_utility, compare, nsw_product, validate, Allocation, Instance, WelfareValue};
pub use normalize::{lemma2_rule, normalize};
pub use rational::Rational;
pub use reduction::{build_instance, completeness_allocation, completeness_value, ReducedInstance, ReductionParams};
pub use solver::{exact_max_nsw, SearchConfig};
pub use structure::{analyze_structure, product_formula, soundness_bound, verify_identities, StructureProfile};
pub use vertex_cover::min_vertex_cover;
