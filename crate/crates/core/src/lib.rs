//! Block recursive inversion of dense matrices.
//!
//! An m×m matrix is viewed as a k×k grid of b×b blocks. Each run of the
//! engine produces one block of the inverse from nested Schur complements
//! while holding only O(k) blocks, so the input can live on disk or be
//! generated element by element. Running all k² positions yields the full
//! inverse at a cost of O(k²·b³·4^k) block arithmetic.
//!
//! ```
//! use bri::{invert_block, memory_provider, Meter};
//!
//! let provider = memory_provider(2, vec![4.0, 2.0, 1.0, 3.0], 2).unwrap();
//! let n11 = invert_block(&provider, &Meter::new(), 1, 1).unwrap();
//! assert!((n11.get(0, 0) - 0.3).abs() < 1e-15);
//! ```

pub mod baseline;
pub mod bench;
pub mod engine;
pub mod error;
pub mod generate;
pub mod instrument;
pub mod io;
pub mod linalg;
pub mod provider;

pub use baseline::{lu_invert_full, materialize, DenseMatrix};
pub use engine::{
    invert_block, invert_full, invert_full_with, reduce_frame, schur_eliminate, split_frame, BlockSink, BranchPath,
    DenseSink, Frame, InvertOptions, InvertSummary, NullSink, Quadrant,
};
pub use error::{Error, Result};
pub use instrument::{predicted_counts, BenchRecord, MemoryGauge, Meter, Method, OpCounters};
pub use linalg::Block;
pub use provider::{
    file_provider, kernel_provider, memory_provider, Augmented, BlockLayout, BlockProvider, KernelSpec, Permuted,
};
