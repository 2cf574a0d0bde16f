pub mod analysis;
pub mod boolfn;
pub mod circuit;
pub mod compile;
mod error;
pub mod graph;
pub mod isa;
pub mod querylab;
pub mod treedec;
pub mod vtree;

pub use boolfn::{Assignment, BoolFunc, FunctionStore, VarId, VarSet, Variables};
pub use circuit::{Circuit, CircuitBuilder, Gate, GateId};
pub use compile::{compile_dsnnf, compile_sdd, CompiledForm, FormKind};
pub use error::{Error, Result};
pub use graph::UndirectedGraph;
pub use vtree::{Label, VNodeId, Vtree, VtreeBuilder};
