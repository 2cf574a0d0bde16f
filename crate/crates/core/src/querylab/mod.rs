//! Query lineages and the hard function family.

mod db;
mod hfamily;
mod lineage;
mod query;

pub use db::{Database, Tuple};
pub use hfamily::{
    balanced_nodes, h_family, h_family_circuit, hardness_experiment, node_with_vars,
    separating_vtree, HLayout, HardnessReport, HardnessRow, VtreeMode,
};
pub use lineage::{holds, lineage};
pub use query::{Atom, Disjunct, Ucq};
