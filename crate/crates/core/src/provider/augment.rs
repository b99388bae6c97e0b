use super::{BlockLayout, BlockProvider, MatrixSource};
use crate::error::Result;
use crate::instrument::Meter;
use crate::linalg::Block;

/// Block grid over `Γ = [[M, 0], [0ᵀ, I_l]]`, where l pads the order of
/// `M` up to a multiple of k. With l = 0 every block comes straight from
/// the source.
#[derive(Clone, Debug)]
pub struct Augmented<S> {
    source: S,
    layout: BlockLayout,
}

impl<S: MatrixSource> Augmented<S> {
    pub fn new(source: S, k: usize) -> Result<Self> {
        let layout = BlockLayout::new(source.order(), k)?;
        Ok(Augmented { source, layout })
    }

    pub fn source(&self) -> &S {
        &self.source
    }
}

impl<S: MatrixSource> BlockProvider for Augmented<S> {
    fn layout(&self) -> BlockLayout {
        self.layout
    }

    fn fetch(&self, meter: &Meter, alpha: usize, beta: usize) -> Result<Block> {
        self.layout.check_index(alpha, beta)?;
        let m = self.layout.m();
        let b = self.layout.b();
        let rows = self.layout.span(alpha);
        let cols = self.layout.span(beta);
        let mut out = Block::zeros_in(b, meter);

        // Part of the block that lies inside M.
        let real_rows = rows.start.min(m)..rows.end.min(m);
        let real_cols = cols.start.min(m)..cols.end.min(m);
        if !real_rows.is_empty() && !real_cols.is_empty() {
            let w = real_cols.len();
            if w == b && real_rows.len() == b {
                self.source.fill(real_rows, real_cols, out.data_mut())?;
            } else {
                let mut scratch = vec![0.0; real_rows.len() * w];
                self.source.fill(real_rows.clone(), real_cols, &mut scratch)?;
                for (r, chunk) in scratch.chunks_exact(w).enumerate() {
                    out.data_mut()[r * b..r * b + w].copy_from_slice(chunk);
                }
            }
        }

        // Identity padding on the diagonal beyond m.
        for i in rows.clone() {
            if i >= m && cols.contains(&i) {
                out.set(i - rows.start, i - cols.start, 1.0);
            }
        }
        Ok(out)
    }
}
