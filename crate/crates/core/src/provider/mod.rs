//! On-demand access to the blocks of a (possibly virtual) input matrix.
//!
//! A [`MatrixSource`] knows how to fill rectangular regions of the original
//! m×m matrix. [`Augmented`] lays a k×k block grid over it, padding with an
//! identity corner when m is not a multiple of k, and is the base
//! [`BlockProvider`]. [`Permuted`] is a lazy index-mapping view on top.
//!
//! Block indices are 1-based; element indices are 0-based.

mod augment;
mod file;
mod kernel;
mod memory;
mod permute;

pub use augment::Augmented;
pub use file::FileSource;
pub use kernel::{KernelSource, KernelSpec};
pub use memory::DenseSource;
pub use permute::{BlockPermutation, Permuted};

use std::ops::Range;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instrument::Meter;
use crate::linalg::Block;

/// Partition geometry of an m×m matrix into k×k blocks of order b, after
/// padding by l rows and columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    m: usize,
    k: usize,
    l: usize,
    b: usize,
}

impl BlockLayout {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if m == 0 || k < 2 {
            return Err(Error::BadPartition { m, k });
        }
        let l = (k - m % k) % k;
        let b = (m + l) / k;
        Ok(BlockLayout { m, k, l, b })
    }

    /// Original matrix order.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Blocks per dimension.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Padding rows/columns added to reach a multiple of k.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Block order.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Order of the padded matrix, `m + l == k·b`.
    pub fn padded_order(&self) -> usize {
        self.k * self.b
    }

    pub fn check_index(&self, alpha: usize, beta: usize) -> Result<()> {
        if alpha == 0 || beta == 0 || alpha > self.k || beta > self.k {
            return Err(Error::IndexOutOfRange { alpha, beta, k: self.k });
        }
        Ok(())
    }

    /// 0-based element range of block index `alpha` in the padded matrix.
    pub fn span(&self, alpha: usize) -> Range<usize> {
        (alpha - 1) * self.b..alpha * self.b
    }
}

/// Anything that can produce elements of an m×m matrix on demand.
pub trait MatrixSource: Send + Sync {
    fn order(&self) -> usize;

    /// Fills `out` (row-major, `rows.len() × cols.len()`) with the elements
    /// in the given 0-based ranges. Ranges lie within `0..order()`.
    fn fill(&self, rows: Range<usize>, cols: Range<usize>, out: &mut [f64]) -> Result<()>;
}

/// Source of b×b blocks on a k×k grid.
pub trait BlockProvider: Send + Sync {
    fn layout(&self) -> BlockLayout;

    /// Block at 1-based position (alpha, beta), allocated through `meter`.
    /// Repeated fetches return bit-identical data.
    fn fetch(&self, meter: &Meter, alpha: usize, beta: usize) -> Result<Block>;
}

impl<P: BlockProvider + ?Sized> BlockProvider for &P {
    fn layout(&self) -> BlockLayout {
        (**self).layout()
    }

    fn fetch(&self, meter: &Meter, alpha: usize, beta: usize) -> Result<Block> {
        (**self).fetch(meter, alpha, beta)
    }
}

impl<P: BlockProvider + ?Sized> BlockProvider for Box<P> {
    fn layout(&self) -> BlockLayout {
        (**self).layout()
    }

    fn fetch(&self, meter: &Meter, alpha: usize, beta: usize) -> Result<Block> {
        (**self).fetch(meter, alpha, beta)
    }
}

/// In-memory provider over a row-major m×m matrix.
pub fn memory_provider(order: usize, data: Vec<f64>, k: usize) -> Result<Augmented<DenseSource>> {
    Augmented::new(DenseSource::new(order, data)?, k)
}

/// Provider reading blocks from a BRIM file by per-row seeks.
pub fn file_provider(path: impl AsRef<Path>, k: usize) -> Result<Augmented<FileSource<std::fs::File>>> {
    Augmented::new(FileSource::open(path)?, k)
}

/// Provider generating the bordered LS-SVM kernel matrix on demand.
pub fn kernel_provider(spec: KernelSpec, k: usize) -> Result<Augmented<KernelSource>> {
    Augmented::new(KernelSource::new(spec)?, k)
}
