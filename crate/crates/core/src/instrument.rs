//! Exact operation accounting for block runs.
//!
//! Memory is charged in whole b×b block buffers rather than sampled from the
//! allocator: every engine-managed [`Block`](crate::Block) registers with a
//! [`MemoryGauge`] when it is allocated and deregisters when dropped. A heap
//! profiler attached to the process would report roughly
//! `peak_blocks · 8b²` bytes plus a constant for provider handles and the
//! recursion's index lists, which is what `peak_bytes` reports.

use std::ops::{Add, AddAssign};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Snapshot of block-level operation counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    pub block_inversions: u64,
    pub block_multiplications: u64,
    pub block_subtractions: u64,
    pub schur_nodes: u64,
}

impl Add for OpCounters {
    type Output = OpCounters;

    fn add(self, rhs: OpCounters) -> OpCounters {
        OpCounters {
            block_inversions: self.block_inversions + rhs.block_inversions,
            block_multiplications: self.block_multiplications + rhs.block_multiplications,
            block_subtractions: self.block_subtractions + rhs.block_subtractions,
            schur_nodes: self.schur_nodes + rhs.schur_nodes,
        }
    }
}

impl AddAssign for OpCounters {
    fn add_assign(&mut self, rhs: OpCounters) {
        *self = *self + rhs;
    }
}

/// Closed-form counts for a single-block run on a k×k partition.
///
/// The recursion tree is 4-ary with depth k−2, so it has (4^{k−1} − 1)/3
/// Schur nodes. Each node costs one inversion, two products and one
/// subtraction; the run ends with one more inversion.
pub fn predicted_counts(k: usize) -> Result<OpCounters> {
    if !(2..=32).contains(&k) {
        return Err(Error::BadPartition { m: 0, k });
    }
    let nodes = (4u64.pow(k as u32 - 1) - 1) / 3;
    Ok(OpCounters {
        block_inversions: nodes + 1,
        block_multiplications: 2 * nodes,
        block_subtractions: nodes,
        schur_nodes: nodes,
    })
}

#[derive(Debug, Default)]
struct AtomicCounters {
    inversions: AtomicU64,
    multiplications: AtomicU64,
    subtractions: AtomicU64,
    schur_nodes: AtomicU64,
}

#[derive(Debug, Default)]
struct GaugeState {
    live: AtomicUsize,
    peak: AtomicUsize,
}

/// Live block-buffer count with a high-water mark.
#[derive(Clone, Debug, Default)]
pub struct MemoryGauge {
    state: Arc<GaugeState>,
}

impl MemoryGauge {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn live(&self) -> usize {
        self.state.live.load(Ordering::SeqCst)
    }

    pub fn peak(&self) -> usize {
        self.state.peak.load(Ordering::SeqCst)
    }

    /// Registers one buffer.
    pub fn acquire(&self) {
        let live = self.state.live.fetch_add(1, Ordering::SeqCst) + 1;
        self.state.peak.fetch_max(live, Ordering::SeqCst);
    }

    /// Deregisters one buffer. Releasing with nothing live is a bookkeeping
    /// bug and reported as [`Error::GaugeUnderflow`]; the count is left at 0.
    pub fn release(&self) -> Result<()> {
        self.state
            .live
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |live| live.checked_sub(1))
            .map(|_| ())
            .map_err(|_| Error::GaugeUnderflow)
    }

    /// Restarts the high-water mark from the current live count.
    pub fn reset_peak(&self) {
        self.state.peak.store(self.live(), Ordering::SeqCst);
    }

    /// Runs `f` with a fresh high-water mark and returns the peak it reached.
    pub fn scope<R>(&self, f: impl FnOnce() -> R) -> (R, usize) {
        self.reset_peak();
        let out = f();
        (out, self.peak())
    }

    pub(crate) fn lease(&self) -> GaugeLease {
        self.acquire();
        GaugeLease { gauge: self.clone() }
    }
}

/// Registration of one buffer; released on drop.
#[derive(Debug)]
pub(crate) struct GaugeLease {
    gauge: MemoryGauge,
}

impl GaugeLease {
    pub(crate) fn gauge(&self) -> &MemoryGauge {
        &self.gauge
    }
}

impl Drop for GaugeLease {
    fn drop(&mut self) {
        let released = self.gauge.release();
        debug_assert!(released.is_ok(), "gauge underflow on block drop");
    }
}

/// Counters plus gauge for one run. Cloning shares the underlying state, so
/// concurrent tasks can either share one meter or own one each and merge.
#[derive(Clone, Debug, Default)]
pub struct Meter {
    counters: Arc<AtomicCounters>,
    gauge: MemoryGauge,
}

impl Meter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn gauge(&self) -> &MemoryGauge {
        &self.gauge
    }

    pub fn counters(&self) -> OpCounters {
        let c = &self.counters;
        OpCounters {
            block_inversions: c.inversions.load(Ordering::SeqCst),
            block_multiplications: c.multiplications.load(Ordering::SeqCst),
            block_subtractions: c.subtractions.load(Ordering::SeqCst),
            schur_nodes: c.schur_nodes.load(Ordering::SeqCst),
        }
    }

    pub(crate) fn count_inversion(&self) {
        self.counters.inversions.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn count_multiplication(&self) {
        self.counters.multiplications.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn count_subtraction(&self) {
        self.counters.subtractions.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn count_schur_node(&self) {
        self.counters.schur_nodes.fetch_add(1, Ordering::Relaxed);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bri,
    Lu,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Bri => "bri",
            Method::Lu => "lu",
        }
    }
}

/// One timed inversion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub m: usize,
    /// Block count per dimension; 1 for the unpartitioned LU baseline.
    pub k: usize,
    pub wall_ms: f64,
    pub peak_bytes: u64,
    pub counters: OpCounters,
    pub seed: u64,
}

/// Bytes held by `blocks` buffers of order `b`.
pub fn block_bytes(blocks: usize, b: usize) -> u64 {
    (blocks as u64) * 8 * (b as u64) * (b as u64)
}
