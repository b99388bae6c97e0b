#![allow(dead_code)]

use bri::{memory_provider, BlockProvider, DenseMatrix, DenseSink, Meter};
use nalgebra::DMatrix;

/// Dense inverse through nalgebra, independent of the crate's LU.
pub fn oracle_inverse(a: &DenseMatrix) -> DenseMatrix {
    let m = a.order();
    let inv = DMatrix::from_row_slice(m, m, a.data())
        .try_inverse()
        .expect("oracle: matrix is invertible");
    DenseMatrix::from_fn(m, |i, j| inv[(i, j)])
}

/// Schur complement `M[0..b,0..b] − M[0..b,b..] · M[b..,b..]⁻¹ · M[b..,0..b]`.
pub fn oracle_corner_schur(a: &DenseMatrix, b: usize) -> DMatrix<f64> {
    let m = a.order();
    let full = DMatrix::from_row_slice(m, m, a.data());
    let tl = full.view((0, 0), (b, b)).into_owned();
    let tr = full.view((0, b), (b, m - b)).into_owned();
    let bl = full.view((b, 0), (m - b, b)).into_owned();
    let br = full.view((b, b), (m - b, m - b)).into_owned();
    tl - tr * br.try_inverse().expect("trailing block invertible") * bl
}

/// Full inverse through the block engine, reassembled in memory.
pub fn bri_inverse(a: &DenseMatrix, k: usize) -> bri::Result<DenseMatrix> {
    let p = memory_provider(a.order(), a.data().to_vec(), k)?;
    let mut sink = DenseSink::new(p.layout());
    bri::invert_full(&p, &mut sink)?;
    sink.finish()
}

pub fn block_of(a: &DenseMatrix, b: usize, alpha: usize, beta: usize) -> bri::Block {
    let rows: Vec<Vec<f64>> = (0..b)
        .map(|r| (0..b).map(|c| a.get((alpha - 1) * b + r, (beta - 1) * b + c)).collect())
        .collect();
    bri::Block::from_rows(&rows)
}

pub fn fresh() -> Meter {
    Meter::new()
}
