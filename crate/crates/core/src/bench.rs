//! Timing sweeps comparing block recursive inversion against the dense
//! LU baseline.

use crate::baseline::{lu_invert_timed, DenseMatrix};
use crate::engine::{invert_full, NullSink};
use crate::error::{Error, Result};
use crate::instrument::{BenchRecord, Method};
use crate::provider::{memory_provider, BlockLayout, BlockProvider};

/// Times one full inversion; blocks are computed and discarded.
pub fn bench_bri(provider: &impl BlockProvider, seed: u64) -> Result<BenchRecord> {
    let mut sink = NullSink::default();
    let summary = invert_full(provider, &mut sink)?;
    Ok(BenchRecord {
        method: Method::Bri,
        m: summary.layout.m(),
        k: summary.layout.k(),
        wall_ms: summary.wall_ms,
        peak_bytes: summary.peak_bytes,
        counters: summary.counters,
        seed,
    })
}

pub fn bench_lu(matrix: &DenseMatrix, seed: u64) -> Result<BenchRecord> {
    lu_invert_timed(matrix, seed).map(|(_, rec)| rec)
}

/// For each repeat: one BRI record per k (in list order), then one LU
/// record.
pub fn sweep(matrix: &DenseMatrix, k_list: &[usize], repeat: usize, seed: u64) -> Result<Vec<BenchRecord>> {
    let m = matrix.order();
    for &k in k_list {
        BlockLayout::new(m, k)?;
    }
    let mut out = Vec::with_capacity(repeat * (k_list.len() + 1));
    for _ in 0..repeat {
        for &k in k_list {
            let provider = memory_provider(m, matrix.data().to_vec(), k)?;
            out.push(bench_bri(&provider, seed)?);
        }
        out.push(bench_lu(matrix, seed)?);
    }
    Ok(out)
}

/// Median of `values`; the mean of the middle pair for even lengths.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Median wall time and peak bytes per (method, k), in first-seen order.
#[derive(Clone, Debug, PartialEq)]
pub struct MedianRow {
    pub method: Method,
    pub m: usize,
    pub k: usize,
    pub wall_ms: f64,
    pub peak_bytes: u64,
    pub runs: usize,
}

pub fn medians(records: &[BenchRecord]) -> Vec<MedianRow> {
    let mut keys: Vec<(Method, usize, usize)> = Vec::new();
    for r in records {
        let key = (r.method, r.m, r.k);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(method, m, k)| {
            let group: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| (r.method, r.m, r.k) == (method, m, k))
                .collect();
            let mut walls: Vec<f64> = group.iter().map(|r| r.wall_ms).collect();
            let mut peaks: Vec<f64> = group.iter().map(|r| r.peak_bytes as f64).collect();
            MedianRow {
                method,
                m,
                k,
                wall_ms: median(&mut walls).expect("non-empty group"),
                peak_bytes: median(&mut peaks).expect("non-empty group") as u64,
                runs: group.len(),
            }
        })
        .collect()
}

/// Parses a comma-separated list of block counts such as `2,4,8`.
pub fn parse_k_list(s: &str) -> Result<Vec<usize>> {
    let list = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<usize>()
                .ok()
                .filter(|&k| k >= 2)
                .ok_or_else(|| Error::InvalidInput(format!("bad block count {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if list.is_empty() {
        return Err(Error::InvalidInput("empty k list".into()));
    }
    Ok(list)
}
