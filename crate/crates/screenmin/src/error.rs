//! Error type shared by all modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong on the library side.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A numeric argument fell outside its documented domain.
    #[error("{name} must lie in {bounds}, got {value}")]
    Domain {
        name: &'static str,
        bounds: &'static str,
        value: f64,
    },

    /// Pair-state proportions are individually out of range or do not sum to one.
    #[error("proportions must be in [0,1] and sum to 1 within 1e-12, got ({pi0}, {pi1}, {pi2})")]
    InvalidMix { pi0: f64, pi1: f64, pi2: f64 },

    /// The exact selected-set distribution is only computed up to a cap;
    /// larger problems must use the expected-size plug-in instead.
    #[error("m = {m} exceeds the exact distribution cap of {cap}")]
    ExactPmfCap { m: usize, cap: usize },

    /// Nothing can be selected at this threshold, so the quantity is undefined.
    #[error("expected selected-set size is zero at c = {c}")]
    NothingSelected { c: f64 },

    /// A p-value matrix needs at least one row.
    #[error("p-value matrix must contain at least one row")]
    EmptyMatrix,

    /// A matrix entry outside [0,1].
    #[error("p-value at row {row}, column {col} is {value}, outside [0,1]")]
    InvalidPValue { row: usize, col: usize, value: f64 },

    /// Truth labels must line up with the rows they describe.
    #[error("label count {labels} does not match row count {rows}")]
    LabelMismatch { labels: usize, rows: usize },

    /// A Monte Carlo replication failed; the index identifies the offender.
    #[error("replication {rep} failed: {source}")]
    Replication {
        rep: usize,
        #[source]
        source: Box<Error>,
    },
}
