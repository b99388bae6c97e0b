//! Block recursive inversion.
//!
//! One run computes a single inverse block. The frame tree is pure index
//! bookkeeping: a frame is a list of block rows and block columns of the
//! input, and splitting a frame drops one block row and one block column
//! while keeping the anchor block (the input's M₂₂) at frame position
//! (2, 2). Reduction walks the tree depth first: every 2×2 leaf eliminates
//! its anchor, and every internal node assembles its four child results
//! into a 2×2 block matrix and eliminates the quadrant `mirror(label)`.
//! The root carries label A; inverting its reduced block yields N₁₁.
//! Any other N_{αβ} is N₁₁ of a block-permuted view of the input.

mod full;

pub use full::{invert_full, invert_full_with, BlockSink, DenseSink, InvertOptions, InvertSummary, NullSink};

use std::fmt;

use crate::error::{Error, Result};
use crate::instrument::Meter;
use crate::linalg::{invert_owned, multiply, subtract_in_place, Block};
use crate::provider::{BlockProvider, Permuted};

/// Position in a 2×2 block matrix `[[A, B], [C, D]]`; also the label a
/// frame carries relative to its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quadrant {
    A,
    B,
    C,
    D,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::A, Quadrant::B, Quadrant::C, Quadrant::D];

    /// A↔D, B↔C.
    pub fn mirror(self) -> Quadrant {
        match self {
            Quadrant::A => Quadrant::D,
            Quadrant::B => Quadrant::C,
            Quadrant::C => Quadrant::B,
            Quadrant::D => Quadrant::A,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// (row, col) in the 2×2 grid, 0-based.
    pub fn position(self) -> (usize, usize) {
        let i = self.index();
        (i / 2, i % 2)
    }

    fn at(row: usize, col: usize) -> Quadrant {
        Quadrant::ALL[row * 2 + col]
    }

    /// For pivot `self`, the operands of `keep − row_partner · pivot⁻¹ · col_partner`.
    fn elimination_roles(self) -> (Quadrant, Quadrant, Quadrant) {
        let (pr, pc) = self.position();
        let (kr, kc) = (1 - pr, 1 - pc);
        (Quadrant::at(kr, kc), Quadrant::at(kr, pc), Quadrant::at(pr, kc))
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Quadrant::A => 'A',
            Quadrant::B => 'B',
            Quadrant::C => 'C',
            Quadrant::D => 'D',
        };
        write!(f, "{c}")
    }
}

/// Sub-block-matrix named by 1-based block-row and block-column lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub label: Quadrant,
}

impl Frame {
    /// Whole k×k matrix, label A.
    pub fn root(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadPartition { m: 0, k });
        }
        Ok(Frame {
            rows: (1..=k).collect(),
            cols: (1..=k).collect(),
            label: Quadrant::A,
        })
    }

    /// Number of block rows (= block columns).
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// The pivot pair held at frame position (2, 2).
    pub fn anchor(&self) -> (usize, usize) {
        (self.rows[1], self.cols[1])
    }

    /// Block indices of position `(i, j)`, 0-based within the frame.
    pub fn block_at(&self, i: usize, j: usize) -> (usize, usize) {
        (self.rows[i], self.cols[j])
    }
}

fn drop_last(v: &[usize]) -> Vec<usize> {
    v[..v.len() - 1].to_vec()
}

/// `[v₃, v₂, v₄, …, v_n]`: drop the first entry, then swap the first two.
fn drop_first_swapped(v: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(v.len() - 1);
    out.push(v[2]);
    out.push(v[1]);
    out.extend_from_slice(&v[3..]);
    out
}

/// Splits a frame of size n ≥ 3 into four frames of size n − 1, in
/// A, B, C, D order, each with the anchor at position (2, 2).
pub fn split_frame(f: &Frame) -> Result<[Frame; 4]> {
    let n = f.size();
    if n < 3 {
        return Err(Error::FrameTooSmall { n });
    }
    let top = drop_last(&f.rows);
    let bottom = drop_first_swapped(&f.rows);
    let left = drop_last(&f.cols);
    let right = drop_first_swapped(&f.cols);
    Ok([
        Frame {
            rows: top.clone(),
            cols: left.clone(),
            label: Quadrant::A,
        },
        Frame {
            rows: top,
            cols: right.clone(),
            label: Quadrant::B,
        },
        Frame {
            rows: bottom.clone(),
            cols: left,
            label: Quadrant::C,
        },
        Frame {
            rows: bottom,
            cols: right,
            label: Quadrant::D,
        },
    ])
}

/// Where in the recursion a pivot could not be inverted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchPath {
    /// Inverse block the run was computing.
    pub target: (usize, usize),
    /// Child labels from the root to the failing node.
    pub labels: Vec<Quadrant>,
    /// Quadrant eliminated at the failing node.
    pub pivot: Quadrant,
    /// Block indices of the pivot in the permuted view when it was fetched
    /// directly (leaf nodes); `None` when it was itself a reduced block.
    pub pivot_block: Option<(usize, usize)>,
}

impl BranchPath {
    pub fn depth(&self) -> usize {
        self.labels.len()
    }

    /// Rebuilds the failing node's frame from the root of a k×k partition.
    pub fn replay(&self, k: usize) -> Result<Frame> {
        let mut frame = Frame::root(k)?;
        for &label in &self.labels {
            frame = split_frame(&frame)?[label.index()].clone();
        }
        Ok(frame)
    }
}

impl fmt::Display for BranchPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.labels.iter().map(Quadrant::to_string).collect();
        write!(
            f,
            "N({},{}) branch [{}] depth {}, pivot quadrant {}",
            self.target.0,
            self.target.1,
            path.join(" "),
            self.depth(),
            self.pivot
        )?;
        if let Some((i, j)) = self.pivot_block {
            write!(f, " (block {i},{j})")?;
        }
        Ok(())
    }
}

/// Receives the value of every reduced node, leaves included.
pub trait ReduceObserver {
    fn on_node(&mut self, path: &[Quadrant], frame: &Frame, value: &Block);
}

impl ReduceObserver for () {
    fn on_node(&mut self, _: &[Quadrant], _: &Frame, _: &Block) {}
}

impl<F: FnMut(&[Quadrant], &Frame, &Block)> ReduceObserver for F {
    fn on_node(&mut self, path: &[Quadrant], frame: &Frame, value: &Block) {
        self(path, frame, value)
    }
}

enum StepError {
    Pivot,
    Operand(Error),
}

/// `keep − row_partner · pivot⁻¹ · col_partner`, requesting operands in
/// the order pivot, col partner, row partner, keep and freeing each as
/// soon as it has been folded in.
fn eliminate<F>(meter: &Meter, pivot: Quadrant, mut get: F) -> std::result::Result<Block, StepError>
where
    F: FnMut(Quadrant) -> Result<Block>,
{
    let (keep, row_partner, col_partner) = pivot.elimination_roles();
    let p = get(pivot).map_err(StepError::Operand)?;
    let p_inv = match invert_owned(meter, p) {
        Ok(inv) => inv,
        Err(Error::SingularBlock { .. }) => return Err(StepError::Pivot),
        Err(e) => return Err(StepError::Operand(e)),
    };
    let cp = get(col_partner).map_err(StepError::Operand)?;
    let t = multiply(meter, &p_inv, &cp).map_err(StepError::Operand)?;
    drop((p_inv, cp));
    let rp = get(row_partner).map_err(StepError::Operand)?;
    let u = multiply(meter, &rp, &t).map_err(StepError::Operand)?;
    drop((rp, t));
    let kb = get(keep).map_err(StepError::Operand)?;
    let out = subtract_in_place(meter, kb, &u).map_err(StepError::Operand)?;
    meter.count_schur_node();
    Ok(out)
}

/// Schur complement of a 2×2 block matrix with respect to quadrant `q`:
///
/// - A: `D − C·A⁻¹·B`
/// - B: `C − D·B⁻¹·A`
/// - C: `B − A·C⁻¹·D`
/// - D: `A − B·D⁻¹·C`
pub fn schur_eliminate(meter: &Meter, g: [Block; 4], q: Quadrant) -> Result<Block> {
    let order = g[0].order();
    if let Some(bad) = g.iter().find(|b| b.order() != order) {
        return Err(Error::DimensionMismatch {
            left: order,
            right: bad.order(),
        });
    }
    let mut slots = g.map(Some);
    eliminate(meter, q, |quad| {
        Ok(slots[quad.index()].take().expect("each operand used once"))
    })
    .map_err(|e| match e {
        StepError::Pivot => Error::SingularPivot(Box::new(BranchPath {
            target: (1, 1),
            labels: Vec::new(),
            pivot: q,
            pivot_block: None,
        })),
        StepError::Operand(e) => e,
    })
}

struct Reducer<'a, P, O> {
    provider: &'a P,
    meter: &'a Meter,
    observer: O,
    target: (usize, usize),
    path: Vec<Quadrant>,
}

impl<P: BlockProvider, O: ReduceObserver> Reducer<'_, P, O> {
    fn reduce(&mut self, frame: &Frame) -> Result<Block> {
        let meter = self.meter;
        let (pivot, step) = if frame.size() == 2 {
            let provider = self.provider;
            let step = eliminate(meter, Quadrant::D, |q| {
                let (i, j) = q.position();
                let (r, c) = frame.block_at(i, j);
                provider.fetch(meter, r, c)
            });
            (Quadrant::D, step)
        } else {
            let children = split_frame(frame)?;
            let pivot = frame.label.mirror();
            let step = eliminate(meter, pivot, |q| {
                self.path.push(q);
                let out = self.reduce(&children[q.index()]);
                self.path.pop();
                out
            });
            (pivot, step)
        };
        let value = step.map_err(|e| match e {
            StepError::Pivot => Error::SingularPivot(Box::new(BranchPath {
                target: self.target,
                labels: self.path.clone(),
                pivot,
                pivot_block: (frame.size() == 2).then(|| frame.anchor()),
            })),
            StepError::Operand(e) => e,
        })?;
        self.observer.on_node(&self.path, frame, &value);
        Ok(value)
    }
}

/// Reduces `frame` to a single block.
pub fn reduce_frame(provider: &impl BlockProvider, meter: &Meter, frame: &Frame) -> Result<Block> {
    reduce_frame_traced(provider, meter, frame, ())
}

/// [`reduce_frame`] reporting every node value to `observer`.
pub fn reduce_frame_traced<P: BlockProvider, O: ReduceObserver>(
    provider: &P,
    meter: &Meter,
    frame: &Frame,
    observer: O,
) -> Result<Block> {
    run_reduction(provider, meter, frame, observer, (1, 1))
}

fn run_reduction<P: BlockProvider, O: ReduceObserver>(
    provider: &P,
    meter: &Meter,
    frame: &Frame,
    observer: O,
    target: (usize, usize),
) -> Result<Block> {
    if frame.size() < 2 {
        return Err(Error::FrameTooSmall { n: frame.size() });
    }
    let k = provider.layout().k();
    for (&r, &c) in frame.rows.iter().zip(&frame.cols) {
        provider.layout().check_index(r, c)?;
    }
    debug_assert!(frame.size() <= k);
    let mut reducer = Reducer {
        provider,
        meter,
        observer,
        target,
        path: Vec::new(),
    };
    reducer.reduce(frame)
}

/// Block N_{αβ} of the inverse of the provider's (padded) matrix.
pub fn invert_block(provider: &impl BlockProvider, meter: &Meter, alpha: usize, beta: usize) -> Result<Block> {
    invert_block_traced(provider, meter, alpha, beta, ())
}

pub fn invert_block_traced<P: BlockProvider, O: ReduceObserver>(
    provider: &P,
    meter: &Meter,
    alpha: usize,
    beta: usize,
    observer: O,
) -> Result<Block> {
    let view = Permuted::new(provider, alpha, beta)?;
    let root = Frame::root(view.layout().k())?;
    let reduced = run_reduction(&view, meter, &root, observer, (alpha, beta))?;
    invert_owned(meter, reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::memory_provider;

    fn scalar(v: f64) -> Block {
        Block::from_rows(&[[v]])
    }

    #[test]
    fn mirror_is_an_involution() {
        for q in Quadrant::ALL {
            assert_eq!(q.mirror().mirror(), q);
        }
        assert_eq!(Quadrant::A.mirror(), Quadrant::D);
        assert_eq!(Quadrant::B.mirror(), Quadrant::C);
    }

    #[test]
    fn split_root_of_four() {
        let kids = split_frame(&Frame::root(4).unwrap()).unwrap();
        assert_eq!(
            (kids[0].rows.clone(), kids[0].cols.clone()),
            (vec![1, 2, 3], vec![1, 2, 3])
        );
        assert_eq!(
            (kids[1].rows.clone(), kids[1].cols.clone()),
            (vec![1, 2, 3], vec![3, 2, 4])
        );
        assert_eq!(
            (kids[2].rows.clone(), kids[2].cols.clone()),
            (vec![3, 2, 4], vec![1, 2, 3])
        );
        assert_eq!(
            (kids[3].rows.clone(), kids[3].cols.clone()),
            (vec![3, 2, 4], vec![3, 2, 4])
        );
        for (kid, q) in kids.iter().zip(Quadrant::ALL) {
            assert_eq!(kid.label, q);
            assert_eq!(kid.anchor(), (2, 2));
        }
    }

    #[test]
    fn split_root_of_three_and_too_small() {
        let kids = split_frame(&Frame::root(3).unwrap()).unwrap();
        assert_eq!(kids[0].rows, vec![1, 2]);
        assert_eq!(kids[0].cols, vec![1, 2]);
        assert!(matches!(
            split_frame(&Frame::root(2).unwrap()),
            Err(Error::FrameTooSmall { n: 2 })
        ));
    }

    #[test]
    fn schur_forms_on_scalars() {
        let m = Meter::new();
        let g = || [scalar(4.0), scalar(2.0), scalar(1.0), scalar(3.0)];
        let d = schur_eliminate(&m, g(), Quadrant::D).unwrap();
        assert!((d.get(0, 0) - 10.0 / 3.0).abs() < 1e-15);
        let c = schur_eliminate(&m, [scalar(1.0), scalar(2.0), scalar(4.0), scalar(8.0)], Quadrant::C).unwrap();
        assert_eq!(c.get(0, 0), 0.0);
        // D − C·A⁻¹·B = 3 − 1·(1/4)·2
        let a = schur_eliminate(&m, g(), Quadrant::A).unwrap();
        assert!((a.get(0, 0) - 2.5).abs() < 1e-15);
        // C − D·B⁻¹·A = 1 − 3·(1/2)·4
        let b = schur_eliminate(&m, g(), Quadrant::B).unwrap();
        assert!((b.get(0, 0) + 5.0).abs() < 1e-15);
        let counts = m.counters();
        assert_eq!(counts.block_inversions, 4);
        assert_eq!(counts.block_multiplications, 8);
        assert_eq!(counts.block_subtractions, 4);
        assert_eq!(m.gauge().live(), 0);
    }

    #[test]
    fn schur_block_diagonal() {
        let m = Meter::new();
        let x = Block::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let y = Block::from_rows(&[[2.0, 0.0], [1.0, 5.0]]);
        let out = schur_eliminate(&m, [x.clone(), Block::zeros(2), Block::zeros(2), y], Quadrant::D).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn schur_singular_pivot() {
        let m = Meter::new();
        let err = schur_eliminate(&m, [scalar(1.0), scalar(2.0), scalar(3.0), scalar(0.0)], Quadrant::D).unwrap_err();
        assert!(matches!(err, Error::SingularPivot(ref p) if p.pivot == Quadrant::D));
    }

    #[test]
    fn reduce_two_by_two_scalar() {
        let p = memory_provider(2, vec![4.0, 2.0, 1.0, 3.0], 2).unwrap();
        let v = reduce_frame(&p, &Meter::new(), &Frame::root(2).unwrap()).unwrap();
        assert!((v.get(0, 0) - 10.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reduce_identity_is_one() {
        let mut data = vec![0.0; 16];
        for i in 0..4 {
            data[i * 5] = 1.0;
        }
        let p = memory_provider(4, data, 4).unwrap();
        let v = reduce_frame(&p, &Meter::new(), &Frame::root(4).unwrap()).unwrap();
        assert_eq!(v.get(0, 0), 1.0);
    }

    #[test]
    fn invert_block_two_by_two() {
        let p = memory_provider(2, vec![4.0, 2.0, 1.0, 3.0], 2).unwrap();
        let m = Meter::new();
        let want = [[0.3, -0.2], [-0.1, 0.4]];
        for a in 1..=2 {
            for b in 1..=2 {
                let v = invert_block(&p, &m, a, b).unwrap().get(0, 0);
                assert!((v - want[a - 1][b - 1]).abs() < 1e-15, "N({a},{b}) = {v}");
            }
        }
    }

    #[test]
    fn invert_block_identity() {
        // A run yields N_{αβ} = (V/V[2..k, 2..k])⁻¹ for the permuted view V,
        // so it can only succeed when N_{αβ} is invertible: the zero
        // off-diagonal blocks of I⁻¹ always hit a singular pivot. From k = 5
        // on, the interior pivots of a block-diagonal input are zero
        // off-diagonal Schur entries, so even the diagonal runs fail.
        for k in 2..=6 {
            let m = 2 * k;
            let mut data = vec![0.0; m * m];
            for i in 0..m {
                data[i * m + i] = 1.0;
            }
            let p = memory_provider(m, data, k).unwrap();
            for a in 1..=k {
                for b in 1..=k {
                    let res = invert_block(&p, &Meter::new(), a, b);
                    if a == b && k <= 4 {
                        assert_eq!(res.unwrap(), Block::identity(2));
                    } else {
                        assert!(matches!(res, Err(Error::SingularPivot(_))), "k={k} N({a},{b})");
                    }
                }
            }
        }
    }

    #[test]
    fn observer_sees_every_node() {
        let data: Vec<f64> = (0..16)
            .map(|i| if i % 5 == 0 { 10.0 } else { i as f64 * 0.1 })
            .collect();
        let p = memory_provider(4, data, 4).unwrap();
        let mut seen = 0usize;
        let obs = |_: &[Quadrant], _: &Frame, _: &Block| seen += 1;
        invert_block_traced(&p, &Meter::new(), 1, 1, obs).unwrap();
        assert_eq!(seen, 21);
    }

    #[test]
    fn singular_anchor_reports_path() {
        // M₂₂ = 0 with k = 3.
        let data = vec![1.0, 2.0, 3.0, 4.0, 0.0, 5.0, 6.0, 7.0, 8.0];
        let p = memory_provider(3, data, 3).unwrap();
        let err = invert_block(&p, &Meter::new(), 1, 1).unwrap_err();
        let Error::SingularPivot(path) = err else {
            panic!("expected SingularPivot, got {err:?}")
        };
        assert!(!path.labels.is_empty());
        assert_eq!(path.pivot_block, Some((2, 2)));
        let frame = path.replay(3).unwrap();
        assert_eq!(frame.size(), 2);
        assert_eq!(frame.anchor(), (2, 2));
    }
}
