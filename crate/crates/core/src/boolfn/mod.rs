//! Boolean functions as explicit truth tables, with cofactors and factors.

mod factors;
mod func;
mod store;
pub mod table;
mod vars;

pub use factors::{factors, Factor, FactorClass, FactorPartition};
pub(crate) use func::check_cap;
pub use func::{set_var_cap, var_cap, BoolFunc, DEFAULT_VAR_CAP};
pub use store::{FuncId, FunctionStore};
pub use table::TruthTable;
pub use vars::{Assignment, VarId, VarSet, Variables};
