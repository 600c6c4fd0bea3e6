//! Verification and heuristic construction of combinatorial designs.
//!
//! * [`designs`]: families, instances, the matrix container, exact verifiers
//!   and the plain-text matrix format.
//! * [`heuristics`]: incremental cost models and search drivers.
//! * [`tuner`]: endpoint-dense grids, scoring and successive narrowing.
//! * [`harness`]: parallel multi-seed batches, re-verification and reports.

pub mod designs;
pub mod harness;
pub mod heuristics;
pub mod tuner;
