//! The indirect storage function and its polynomial-size SDD.

mod audit;
mod build;
pub mod convention;

pub use audit::{isa_size_audit, IsaAudit};
pub use build::{isa_function, isa_sdd};
pub use convention::IsaParams;
