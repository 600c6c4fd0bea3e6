//! Design families, instance parameters, the matrix container and the exact
//! verifiers.
//!
//! Every design handled by this crate is a rectangular array of small
//! integers. The container does not know what family it belongs to; entry
//! ranges and counting constraints are the verifiers' business.

mod fixtures;
mod instance;
mod io;
mod matrix;
mod verify;

pub use fixtures::{load_fixture_dir, Fixture, FixtureError, CHECKSUM_FILE, FIXTURE_MANIFEST};
pub use instance::{
    BtdParams, DesignFamily, EpaParams, FrParams, InstanceManifest, InstanceSpec, PaParams,
    WeighingParams,
};
pub(crate) use instance::OrderedParams;
pub use io::{format_matrix, parse_matrix};
pub use matrix::DesignMatrix;
pub use verify::{
    verify, verify_btd, verify_epa, verify_fr, verify_pa, verify_weighing, VerificationReport,
    Violation, WeighingKind,
};

use thiserror::Error;

/// Errors raised while building or reading designs and instances.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    /// The matrix does not have the shape the instance demands. Kept apart
    /// from an invalid-design verdict: a wrong shape means the producer is
    /// broken, not that the instance is unsolved.
    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    Shape {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("unknown design family `{0}`")]
    UnknownFamily(String),
}
