use super::{BlockLayout, BlockProvider};
use crate::error::Result;
use crate::instrument::Meter;
use crate::linalg::Block;

/// Exchange of block row 1 with block row `row_swap` and block column 1
/// with block column `col_swap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockPermutation {
    pub row_swap: usize,
    pub col_swap: usize,
}

impl BlockPermutation {
    /// Permutation that brings inverse block (alpha, beta) to the corner:
    /// rows swap 1↔beta, columns swap 1↔alpha. For a view `P·M·Q`,
    /// `(P·M·Q)⁻¹ = Qᵀ·M⁻¹·Pᵀ`, whose (1,1) block is `N_{alpha,beta}`.
    pub fn for_inverse_block(alpha: usize, beta: usize) -> Self {
        BlockPermutation {
            row_swap: beta,
            col_swap: alpha,
        }
    }

    fn swap(target: usize, i: usize) -> usize {
        if i == 1 {
            target
        } else if i == target {
            1
        } else {
            i
        }
    }

    pub fn map_row(&self, i: usize) -> usize {
        Self::swap(self.row_swap, i)
    }

    pub fn map_col(&self, j: usize) -> usize {
        Self::swap(self.col_swap, j)
    }
}

/// Lazy view with `fetch'(i, j) = fetch(row_swap(i), col_swap(j))`.
#[derive(Clone, Debug)]
pub struct Permuted<P> {
    base: P,
    perm: BlockPermutation,
}

impl<P: BlockProvider> Permuted<P> {
    /// View whose (1,1) inverse block is the base's `N_{alpha,beta}`.
    pub fn new(base: P, alpha: usize, beta: usize) -> Result<Self> {
        base.layout().check_index(alpha, beta)?;
        Ok(Permuted {
            base,
            perm: BlockPermutation::for_inverse_block(alpha, beta),
        })
    }

    pub fn permutation(&self) -> BlockPermutation {
        self.perm
    }

    pub fn into_inner(self) -> P {
        self.base
    }
}

impl<P: BlockProvider> BlockProvider for Permuted<P> {
    fn layout(&self) -> BlockLayout {
        self.base.layout()
    }

    fn fetch(&self, meter: &Meter, alpha: usize, beta: usize) -> Result<Block> {
        self.base.layout().check_index(alpha, beta)?;
        self.base
            .fetch(meter, self.perm.map_row(alpha), self.perm.map_col(beta))
    }
}
