use std::io;

use thiserror::Error;

use crate::engine::BranchPath;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("block order mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A pivot in a b×b factorization fell below the singularity threshold.
    #[error("singular block: pivot {pivot_index} below threshold")]
    SingularBlock { pivot_index: usize },

    /// Same as [`Error::SingularBlock`] but for a whole m×m matrix.
    #[error("singular matrix: pivot {pivot_index} below threshold")]
    SingularMatrix { pivot_index: usize },

    /// A Schur pivot inside the recursion could not be inverted.
    #[error("singular pivot at {0}")]
    SingularPivot(Box<BranchPath>),

    #[error("bad partition: m = {m} cannot be split into k = {k} block rows")]
    BadPartition { m: usize, k: usize },

    #[error("block index ({alpha}, {beta}) out of range 1..={k}")]
    IndexOutOfRange { alpha: usize, beta: usize, k: usize },

    #[error("frame of size {n} cannot be split (need at least 3)")]
    FrameTooSmall { n: usize },

    #[error("io error{}: {source}", offset.map(|o| format!(" at byte offset {o}")).unwrap_or_default())]
    Io {
        offset: Option<u64>,
        #[source]
        source: io::Error,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("inverse sink finalized with {received} of {expected} blocks")]
    MissingBlocks { received: usize, expected: usize },

    #[error("memory gauge released more buffers than it registered")]
    GaugeUnderflow,

    #[error("matrix order {m} exceeds the materialization ceiling {ceiling}")]
    Overflow { m: usize, ceiling: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io_at(offset: u64, source: io::Error) -> Self {
        Error::Io {
            offset: Some(offset),
            source,
        }
    }
}

impl From<io::Error> for Error {
    fn from(source: io::Error) -> Self {
        Error::Io { offset: None, source }
    }
}
