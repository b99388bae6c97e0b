//! Whole-matrix LU inversion, used as the reference result and as the
//! benchmark baseline.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::instrument::{BenchRecord, Meter, Method, OpCounters};
use crate::linalg::{gemm_into, inverse_from_lu, lu_in_place};
use crate::provider::BlockProvider;

/// Largest order [`materialize`] accepts by default.
pub const MATERIALIZE_CEILING: usize = 8192;

/// Unpartitioned row-major m×m matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    order: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(order: usize) -> Self {
        DenseMatrix {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut out = DenseMatrix::zeros(order);
        for i in 0..order {
            out.set(i, i, 1.0);
        }
        out
    }

    pub fn from_vec(order: usize, data: Vec<f64>) -> Result<Self> {
        if order == 0 || data.len() != order * order {
            return Err(Error::InvalidInput(format!(
                "matrix of order {order} needs {} elements, got {}",
                order * order,
                data.len()
            )));
        }
        Ok(DenseMatrix { order, data })
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = DenseMatrix::zeros(order);
        for i in 0..order {
            for j in 0..order {
                out.set(i, j, f(i, j));
            }
        }
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] = v;
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.order, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.order, other.order);
        let mut out = DenseMatrix::zeros(self.order);
        gemm_into(self.order, &self.data, &other.data, &mut out.data);
        out
    }

    /// Leading `n×n` submatrix.
    pub fn leading(&self, n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, |i, j| self.get(i, j))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.order, other.order);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `‖self − reference‖_max / ‖reference‖_max`.
    pub fn rel_max_diff(&self, reference: &DenseMatrix) -> f64 {
        let scale = reference.max_abs();
        let diff = self.max_abs_diff(reference);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    /// `‖self·other − I‖_max`.
    pub fn identity_residual(&self, other: &DenseMatrix) -> f64 {
        self.matmul(other).max_abs_diff(&DenseMatrix::identity(self.order))
    }
}

/// Dense inverse via LU with partial pivoting and row interchanges.
pub fn lu_invert_full(x: &DenseMatrix) -> Result<DenseMatrix> {
    let n = x.order;
    let mut lu = x.data.clone();
    let mut pivots = vec![0; n];
    lu_in_place(n, &mut lu, &mut pivots).map_err(|pivot_index| Error::SingularMatrix { pivot_index })?;
    let mut out = DenseMatrix::zeros(n);
    inverse_from_lu(n, &lu, &pivots, &mut out.data);
    Ok(out)
}

/// Bytes resident during [`lu_invert_full`]: input, output, the factor
/// copy and the pivot vector.
pub fn lu_peak_bytes(m: usize) -> u64 {
    let m = m as u64;
    3 * 8 * m * m + 8 * m
}

/// Times one baseline inversion.
pub fn lu_invert_timed(x: &DenseMatrix, seed: u64) -> Result<(DenseMatrix, BenchRecord)> {
    let start = Instant::now();
    let inv = lu_invert_full(x)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let record = BenchRecord {
        method: Method::Lu,
        m: x.order,
        k: 1,
        wall_ms,
        peak_bytes: lu_peak_bytes(x.order),
        counters: OpCounters::default(),
        seed,
    };
    Ok((inv, record))
}

/// Assembles the provider's blocks into one dense matrix. With `trim` the
/// padding is dropped and the result has order m; otherwise it has the
/// padded order k·b.
pub fn materialize(provider: &impl BlockProvider, trim: bool) -> Result<DenseMatrix> {
    materialize_with_ceiling(provider, trim, MATERIALIZE_CEILING)
}

pub fn materialize_with_ceiling(provider: &impl BlockProvider, trim: bool, ceiling: usize) -> Result<DenseMatrix> {
    let layout = provider.layout();
    let full = layout.padded_order();
    if full > ceiling {
        return Err(Error::Overflow { m: full, ceiling });
    }
    let meter = Meter::new();
    let b = layout.b();
    let mut out = DenseMatrix::zeros(full);
    for alpha in 1..=layout.k() {
        for beta in 1..=layout.k() {
            let blk = provider.fetch(&meter, alpha, beta)?;
            for r in 0..b {
                let i = (alpha - 1) * b + r;
                let start = i * full + (beta - 1) * b;
                out.data[start..start + b].copy_from_slice(blk.row(r));
            }
        }
    }
    Ok(if trim && layout.l() > 0 {
        out.leading(layout.m())
    } else {
        out
    })
}
