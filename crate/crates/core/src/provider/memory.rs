use std::ops::Range;

use super::MatrixSource;
use crate::error::{Error, Result};

/// Row-major m×m matrix held in memory.
#[derive(Clone, Debug)]
pub struct DenseSource {
    order: usize,
    data: Vec<f64>,
}

impl DenseSource {
    pub fn new(order: usize, data: Vec<f64>) -> Result<Self> {
        if order == 0 || data.len() != order * order {
            return Err(Error::InvalidInput(format!(
                "matrix of order {order} needs {} elements, got {}",
                order * order,
                data.len()
            )));
        }
        Ok(DenseSource { order, data })
    }
}

impl MatrixSource for DenseSource {
    fn order(&self) -> usize {
        self.order
    }

    fn fill(&self, rows: Range<usize>, cols: Range<usize>, out: &mut [f64]) -> Result<()> {
        let width = cols.len();
        for (r, i) in rows.enumerate() {
            let src = &self.data[i * self.order + cols.start..i * self.order + cols.end];
            out[r * width..(r + 1) * width].copy_from_slice(src);
        }
        Ok(())
    }
}
