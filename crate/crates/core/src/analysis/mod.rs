//! Checks and measurements over compiled forms.

mod count;
mod cover;
mod feedback;
mod rank;
mod verify;

pub use count::{model_count, parse_rational, weighted_count, WeightMap};
pub use cover::{extract_cover, verify_cover, Cover, CoverCheck, Rectangle};
pub use feedback::{feedback_decomposition, FeedbackDecomposition};
pub use rank::{
    comm_rank, comm_rank_with_limit, cover_lower_bound_check, disjointness, disjointness_blocks,
    CommMatrix, LowerBoundReport, RANK_LIMIT,
};
pub use verify::{verify, Property, VerifyReport, Violation};
