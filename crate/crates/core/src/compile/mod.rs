//! Compilation of Boolean functions into canonical deterministic structured
//! NNFs and SDDs, the width measures they induce, and OBDD export.

mod construct;
mod form;
mod io;
mod obdd;
mod width;

pub use construct::{compile_dsnnf, compile_sdd, implicants};
pub(crate) use form::FormBuilder;
pub use form::{CompiledForm, FormKind, Node, NodeId};
pub use io::{parse_form, write_form};
pub use obdd::{obdd_export, Obdd, ObddRef};
pub use width::{factor_width, fiw, sdw, structured_width, WidthReport};

#[cfg(test)]
mod tests;
