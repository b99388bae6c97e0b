use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use super::invert_block;
use crate::baseline::DenseMatrix;
use crate::error::{Error, Result};
use crate::instrument::{block_bytes, Meter, OpCounters};
use crate::linalg::Block;
use crate::provider::{BlockLayout, BlockProvider};

/// Destination for inverse blocks keyed by 1-based (alpha, beta).
pub trait BlockSink {
    fn accept(&mut self, alpha: usize, beta: usize, block: &Block) -> Result<()>;
}

/// Collects blocks into an m×m matrix, trimming padding.
#[derive(Debug)]
pub struct DenseSink {
    layout: BlockLayout,
    out: DenseMatrix,
    received: Vec<bool>,
}

impl DenseSink {
    pub fn new(layout: BlockLayout) -> Self {
        DenseSink {
            layout,
            out: DenseMatrix::zeros(layout.m()),
            received: vec![false; layout.k() * layout.k()],
        }
    }

    pub fn finish(self) -> Result<DenseMatrix> {
        let received = self.received.iter().filter(|&&r| r).count();
        if received != self.received.len() {
            return Err(Error::MissingBlocks {
                received,
                expected: self.received.len(),
            });
        }
        Ok(self.out)
    }
}

impl BlockSink for DenseSink {
    fn accept(&mut self, alpha: usize, beta: usize, block: &Block) -> Result<()> {
        let layout = self.layout;
        layout.check_index(alpha, beta)?;
        let m = layout.m();
        let rows = layout.span(alpha);
        let cols = layout.span(beta);
        for i in rows.start..rows.end.min(m) {
            for j in cols.start..cols.end.min(m) {
                self.out.set(i, j, block.get(i - rows.start, j - cols.start));
            }
        }
        self.received[(alpha - 1) * layout.k() + beta - 1] = true;
        Ok(())
    }
}

/// Counts blocks and discards them.
#[derive(Debug, Default)]
pub struct NullSink {
    pub blocks: usize,
}

impl BlockSink for NullSink {
    fn accept(&mut self, _: usize, _: usize, _: &Block) -> Result<()> {
        self.blocks += 1;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct InvertOptions {
    /// Worker threads for the k² block runs. With more than one worker the
    /// reported peak covers all blocks in flight at once.
    pub threads: usize,
}

impl Default for InvertOptions {
    fn default() -> Self {
        InvertOptions { threads: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct InvertSummary {
    pub layout: BlockLayout,
    pub counters: OpCounters,
    pub peak_blocks: usize,
    pub peak_bytes: u64,
    pub wall_ms: f64,
    pub blocks: usize,
}

/// Computes all k² inverse blocks in row-major order and streams each to
/// `sink` as soon as it is ready.
pub fn invert_full<P, S>(provider: &P, sink: &mut S) -> Result<InvertSummary>
where
    P: BlockProvider,
    S: BlockSink + Send,
{
    invert_full_with(provider, sink, &InvertOptions::default())
}

pub fn invert_full_with<P, S>(provider: &P, sink: &mut S, opts: &InvertOptions) -> Result<InvertSummary>
where
    P: BlockProvider,
    S: BlockSink + Send,
{
    let layout = provider.layout();
    let k = layout.k();
    let meter = Meter::new();
    let start = Instant::now();
    if opts.threads <= 1 {
        for alpha in 1..=k {
            for beta in 1..=k {
                let blk = invert_block(provider, &meter, alpha, beta)?;
                sink.accept(alpha, beta, &blk)?;
            }
        }
    } else {
        run_parallel(provider, sink, &meter, opts.threads)?;
    }
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let peak_blocks = meter.gauge().peak();
    Ok(InvertSummary {
        layout,
        counters: meter.counters(),
        peak_blocks,
        peak_bytes: block_bytes(peak_blocks, layout.b()),
        wall_ms,
        blocks: k * k,
    })
}

fn run_parallel<P, S>(provider: &P, sink: &mut S, meter: &Meter, threads: usize) -> Result<()>
where
    P: BlockProvider,
    S: BlockSink + Send,
{
    let k = provider.layout().k();
    let total = k * k;
    let next = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let sink = Mutex::new(sink);
    let first_error: Mutex<Option<Error>> = Mutex::new(None);

    thread::scope(|scope| {
        for _ in 0..threads.min(total) {
            scope.spawn(|| loop {
                if failed.load(Ordering::SeqCst) {
                    return;
                }
                let idx = next.fetch_add(1, Ordering::SeqCst);
                if idx >= total {
                    return;
                }
                let (alpha, beta) = (idx / k + 1, idx % k + 1);
                let res = invert_block(provider, meter, alpha, beta).and_then(|blk| {
                    let mut sink = sink.lock().unwrap_or_else(|e| e.into_inner());
                    sink.accept(alpha, beta, &blk)
                });
                if let Err(e) = res {
                    failed.store(true, Ordering::SeqCst);
                    first_error.lock().unwrap_or_else(|e| e.into_inner()).get_or_insert(e);
                    return;
                }
            });
        }
    });

    match first_error.into_inner().unwrap_or_else(|e| e.into_inner()) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
