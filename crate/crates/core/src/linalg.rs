//! Dense b×b block arithmetic.
//!
//! Every buffer produced here is registered with the [`Meter`]'s gauge and
//! every product, subtraction and inversion is counted. Element indices are
//! 0-based.

use std::fmt;

use crate::error::{Error, Result};
use crate::instrument::{GaugeLease, Meter};

/// Square row-major block of `f64`.
pub struct Block {
    order: usize,
    data: Vec<f64>,
    lease: Option<GaugeLease>,
}

impl Block {
    /// Untracked zero block.
    pub fn zeros(order: usize) -> Self {
        assert!(order >= 1, "block order must be positive");
        Block {
            order,
            data: vec![0.0; order * order],
            lease: None,
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut out = Block::zeros(order);
        for i in 0..order {
            out.data[i * order + i] = 1.0;
        }
        out
    }

    /// Zero block registered with `meter`'s gauge.
    pub fn zeros_in(order: usize, meter: &Meter) -> Self {
        let mut out = Block::zeros(order);
        out.lease = Some(meter.gauge().lease());
        out
    }

    pub fn from_vec(order: usize, data: Vec<f64>) -> Result<Self> {
        if order == 0 || data.len() != order * order {
            return Err(Error::InvalidInput(format!(
                "block of order {order} needs {} elements, got {}",
                order * order,
                data.len()
            )));
        }
        Ok(Block {
            order,
            data,
            lease: None,
        })
    }

    /// Builds a block from equal-length rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let order = rows.len();
        let mut data = Vec::with_capacity(order * order);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), order, "rows must form a square block");
            data.extend_from_slice(r);
        }
        Block::from_vec(order, data).expect("square by construction")
    }

    /// Registers this buffer with `meter`'s gauge if it is not already.
    pub fn tracked(mut self, meter: &Meter) -> Self {
        if self.lease.is_none() {
            self.lease = Some(meter.gauge().lease());
        }
        self
    }

    pub fn is_tracked(&self) -> bool {
        self.lease.is_some()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
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

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Block) -> f64 {
        assert_eq!(self.order, other.order);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Clone for Block {
    fn clone(&self) -> Self {
        Block {
            order: self.order,
            data: self.data.clone(),
            lease: self.lease.as_ref().map(|l| l.gauge().lease()),
        }
    }
}

impl PartialEq for Block {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.data == other.data
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.order).map(|i| self.row(i)).collect();
        f.debug_struct("Block")
            .field("order", &self.order)
            .field("rows", &rows)
            .field("tracked", &self.is_tracked())
            .finish()
    }
}

fn check_orders(x: &Block, y: &Block) -> Result<()> {
    if x.order != y.order {
        return Err(Error::DimensionMismatch {
            left: x.order,
            right: y.order,
        });
    }
    Ok(())
}

/// Row-major product `out = x · y`, `out` zeroed on entry.
pub(crate) fn gemm_into(n: usize, x: &[f64], y: &[f64], out: &mut [f64]) {
    for i in 0..n {
        let out_row = &mut out[i * n..(i + 1) * n];
        for (p, &xip) in x[i * n..(i + 1) * n].iter().enumerate() {
            if xip == 0.0 {
                continue;
            }
            let y_row = &y[p * n..(p + 1) * n];
            for (o, &yv) in out_row.iter_mut().zip(y_row) {
                *o += xip * yv;
            }
        }
    }
}

pub fn multiply(meter: &Meter, x: &Block, y: &Block) -> Result<Block> {
    check_orders(x, y)?;
    let mut out = Block::zeros_in(x.order, meter);
    gemm_into(x.order, &x.data, &y.data, &mut out.data);
    meter.count_multiplication();
    Ok(out)
}

/// `x − y` into a fresh buffer.
pub fn subtract(meter: &Meter, x: &Block, y: &Block) -> Result<Block> {
    check_orders(x, y)?;
    let mut out = Block::zeros_in(x.order, meter);
    for ((o, a), b) in out.data.iter_mut().zip(&x.data).zip(&y.data) {
        *o = a - b;
    }
    meter.count_subtraction();
    Ok(out)
}

/// `x − y` written over `x`'s buffer.
pub fn subtract_in_place(meter: &Meter, mut x: Block, y: &Block) -> Result<Block> {
    check_orders(&x, y)?;
    for (a, b) in x.data.iter_mut().zip(&y.data) {
        *a -= b;
    }
    meter.count_subtraction();
    Ok(x)
}

/// Packed LU factors with partial pivoting: `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct LuFactors {
    packed: Block,
    /// Row `i` of `P·A` is row `pivots[i]` of `A`.
    pivots: Vec<usize>,
}

impl LuFactors {
    pub fn order(&self) -> usize {
        self.packed.order
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn packed(&self) -> &Block {
        &self.packed
    }

    /// Unit lower triangle as an untracked block.
    pub fn lower(&self) -> Block {
        let n = self.order();
        let mut l = Block::identity(n);
        for i in 0..n {
            for j in 0..i {
                l.set(i, j, self.packed.get(i, j));
            }
        }
        l
    }

    pub fn upper(&self) -> Block {
        let n = self.order();
        let mut u = Block::zeros(n);
        for i in 0..n {
            for j in i..n {
                u.set(i, j, self.packed.get(i, j));
            }
        }
        u
    }

    /// Inverse from the factors, counted as one block inversion.
    pub fn inverse(&self, meter: &Meter) -> Block {
        let mut out = Block::zeros_in(self.order(), meter);
        inverse_from_lu(self.order(), &self.packed.data, &self.pivots, &mut out.data);
        meter.count_inversion();
        out
    }
}

/// In-place LU with partial pivoting on a row-major `n×n` slice.
///
/// A pivot is rejected when `|p| ≤ n·ε·max|row|`, the row being the active
/// part of the chosen pivot row. On rejection returns the 0-based step.
pub(crate) fn lu_in_place(n: usize, a: &mut [f64], pivots: &mut [usize]) -> std::result::Result<(), usize> {
    debug_assert_eq!(a.len(), n * n);
    for (i, p) in pivots.iter_mut().enumerate() {
        *p = i;
    }
    for j in 0..n {
        let mut p = j;
        let mut best = a[j * n + j].abs();
        for i in j + 1..n {
            let v = a[i * n + j].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if p != j {
            for c in 0..n {
                a.swap(j * n + c, p * n + c);
            }
            pivots.swap(j, p);
        }
        let row_max = a[j * n + j..(j + 1) * n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let pivot = a[j * n + j];
        let tol = n as f64 * f64::EPSILON * row_max;
        if pivot.is_nan() || pivot.abs() <= tol {
            return Err(j);
        }
        let (upper, lower) = a.split_at_mut((j + 1) * n);
        let pivot_row = &upper[j * n..(j + 1) * n];
        for i in 0..n - j - 1 {
            let row = &mut lower[i * n..(i + 1) * n];
            let factor = row[j] / pivot;
            row[j] = factor;
            if factor != 0.0 {
                for c in j + 1..n {
                    row[c] -= factor * pivot_row[c];
                }
            }
        }
    }
    Ok(())
}

/// Writes `A⁻¹` into `out` given packed factors of `A`.
pub(crate) fn inverse_from_lu(n: usize, lu: &[f64], pivots: &[usize], out: &mut [f64]) {
    // out = P, then L·Y = P, then U·X = Y, all as whole-row operations.
    out.iter_mut().for_each(|v| *v = 0.0);
    for (i, &p) in pivots.iter().enumerate() {
        out[i * n + p] = 1.0;
    }
    for i in 0..n {
        let (done, rest) = out.split_at_mut(i * n);
        let row = &mut rest[..n];
        for j in 0..i {
            let l = lu[i * n + j];
            if l != 0.0 {
                let src = &done[j * n..(j + 1) * n];
                for (r, s) in row.iter_mut().zip(src) {
                    *r -= l * s;
                }
            }
        }
    }
    for i in (0..n).rev() {
        let (head, tail) = out.split_at_mut((i + 1) * n);
        let row = &mut head[i * n..];
        for j in i + 1..n {
            let u = lu[i * n + j];
            if u != 0.0 {
                let src = &tail[(j - i - 1) * n..(j - i) * n];
                for (r, s) in row.iter_mut().zip(src) {
                    *r -= u * s;
                }
            }
        }
        let d = lu[i * n + i];
        for r in row.iter_mut() {
            *r /= d;
        }
    }
}

pub fn lu_factor(meter: &Meter, x: &Block) -> Result<LuFactors> {
    lu_factor_owned(meter, Block::zeros_in(x.order, meter).with_data_of(x))
}

/// Factors in place over `x`'s buffer.
pub fn lu_factor_owned(meter: &Meter, x: Block) -> Result<LuFactors> {
    let mut x = x.tracked(meter);
    let n = x.order;
    let mut pivots = vec![0; n];
    lu_in_place(n, &mut x.data, &mut pivots).map_err(|pivot_index| Error::SingularBlock { pivot_index })?;
    Ok(LuFactors { packed: x, pivots })
}

/// `x⁻¹` via LU; holds at most two buffers (factor copy and result).
pub fn invert_dense(meter: &Meter, x: &Block) -> Result<Block> {
    let lu = lu_factor(meter, x)?;
    Ok(lu.inverse(meter))
}

/// `x⁻¹`, factoring over `x`'s own buffer.
pub fn invert_owned(meter: &Meter, x: Block) -> Result<Block> {
    let lu = lu_factor_owned(meter, x)?;
    Ok(lu.inverse(meter))
}

impl Block {
    fn with_data_of(mut self, src: &Block) -> Block {
        self.data.copy_from_slice(&src.data);
        self
    }
}
