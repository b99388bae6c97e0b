use std::fmt;
use std::fs::File;
use std::io::{self as stdio, Write};
use std::path::Path;

use bri::baseline::lu_invert_timed;
use bri::bench::{medians, parse_k_list, sweep, MedianRow};
use bri::generate::{lssvm_spec, randn, randn_shifted, spd};
use bri::io::{self, write_bench_csv, InverseFileSink};
use bri::{
    file_provider, invert_full_with, lu_invert_full, BlockLayout, BlockProvider, DenseMatrix, DenseSink, Error,
    InvertOptions, Meter,
};
use serde_json::json;

use crate::{BenchArgs, GenArgs, InvertArgs, InvertBlockArgs, Kind, MethodArg, VerifyArgs};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verify(String),
    Core(Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Core(Error::SingularPivot(_) | Error::SingularBlock { .. } | Error::SingularMatrix { .. }) => 2,
            Failure::Usage(_) | Failure::Core(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) | Failure::Verify(msg) => f.write_str(msg),
            Failure::Core(Error::SingularPivot(path)) => write!(f, "singular pivot at {path}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<stdio::Error> for Failure {
    fn from(e: stdio::Error) -> Self {
        Failure::Core(e.into())
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Failure::Usage(msg.into()))
}

/// Reads only the header and checks `k` against the matrix order.
fn checked_layout(input: &Path, k: usize) -> Result<BlockLayout> {
    if k < 2 {
        return usage(format!("--k must be at least 2, got {k}"));
    }
    let m = io::read_header(input)?.m;
    let m = usize::try_from(m).map_err(|_| Failure::Usage(format!("matrix order {m} does not fit in memory")))?;
    if k > m {
        return usage(format!("--k {k} exceeds the matrix order {m}"));
    }
    Ok(BlockLayout::new(m, k)?)
}

fn emit(json: bool, value: serde_json::Value, text: impl FnOnce() -> String) {
    if json {
        println!("{value}");
    } else {
        println!("{}", text());
    }
}

pub fn gen(a: GenArgs, json: bool) -> Result<()> {
    let matrix = match a.kind {
        Kind::Randn | Kind::Spd => {
            if a.n.is_some() {
                return usage("--n applies to --kind lssvm; use --m");
            }
            let m = match a.m {
                Some(m) if m > 0 => m,
                _ => return usage("--m must be a positive integer"),
            };
            match (a.kind, a.no_shift) {
                (Kind::Spd, true) => return usage("--no-shift applies to --kind randn"),
                (Kind::Spd, false) => spd(m, a.seed),
                (_, true) => randn(m, a.seed),
                (_, false) => randn_shifted(m, a.seed),
            }
        }
        Kind::Lssvm => {
            if a.m.is_some() {
                return usage("--kind lssvm takes --n (order is n + 1)");
            }
            let Some(n) = a.n.filter(|&n| n > 0) else {
                return usage("--n must be a positive integer");
            };
            if a.dim == 0 {
                return usage("--dim must be positive");
            }
            let spec = lssvm_spec(n, a.dim, a.gamma, a.sigma, a.seed);
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            DenseMatrix::from_fn(spec.order(), |i, j| spec.element(i, j))
        }
    };
    io::write_matrix(&a.out, &matrix)?;
    emit(
        json,
        json!({ "out": a.out, "m": matrix.order(), "seed": a.seed }),
        || {
            format!(
                "wrote {}×{} matrix to {}",
                matrix.order(),
                matrix.order(),
                a.out.display()
            )
        },
    );
    Ok(())
}

pub fn invert(a: InvertArgs, json: bool) -> Result<()> {
    if a.threads == 0 {
        return usage("--threads must be at least 1");
    }
    match a.method {
        MethodArg::Lu => {
            if a.k.is_some() {
                return usage("--k applies to --method bri");
            }
            let x = io::read_matrix(&a.input)?;
            let (z, rec) = lu_invert_timed(&x, a.seed)?;
            io::write_matrix(&a.out, &z)?;
            emit(json, serde_json::to_value(&rec).expect("record serializes"), || {
                format!(
                    "lu m={} wall_ms={:.3} peak_bytes={}",
                    rec.m, rec.wall_ms, rec.peak_bytes
                )
            });
        }
        MethodArg::Bri => {
            let Some(k) = a.k else {
                return usage("--method bri requires --k");
            };
            let layout = checked_layout(&a.input, k)?;
            let provider = file_provider(&a.input, k)?;
            let mut sink = InverseFileSink::create(&a.out, layout)?;
            let summary = invert_full_with(&provider, &mut sink, &InvertOptions { threads: a.threads })?;
            sink.finish()?;
            let c = summary.counters;
            emit(
                json,
                json!({
                    "method": "bri",
                    "m": layout.m(),
                    "k": k,
                    "b": layout.b(),
                    "l": layout.l(),
                    "wall_ms": summary.wall_ms,
                    "peak_blocks": summary.peak_blocks,
                    "peak_bytes": summary.peak_bytes,
                    "counters": c,
                    "threads": a.threads,
                }),
                || {
                    format!(
                        "bri m={} k={} b={} wall_ms={:.3} peak_blocks={} peak_bytes={} \
                         inversions={} multiplications={} subtractions={} schur_nodes={}",
                        layout.m(),
                        k,
                        layout.b(),
                        summary.wall_ms,
                        summary.peak_blocks,
                        summary.peak_bytes,
                        c.block_inversions,
                        c.block_multiplications,
                        c.block_subtractions,
                        c.schur_nodes
                    )
                },
            );
        }
    }
    Ok(())
}

fn compute_block(a: &InvertBlockArgs) -> Result<(BlockLayout, bri::Block, usize)> {
    let layout = checked_layout(&a.input, a.k)?;
    for (name, v) in [("--row", a.row), ("--col", a.col)] {
        if v == 0 || v > a.k {
            return usage(format!("{name} {v} is outside 1..={}", a.k));
        }
    }
    let provider = file_provider(&a.input, a.k)?;
    let meter = Meter::new();
    let (blk, peak) = meter
        .gauge()
        .scope(|| bri::invert_block(&provider, &meter, a.row, a.col));
    Ok((layout, blk?, peak))
}

pub fn invert_block(a: InvertBlockArgs, json: bool) -> Result<()> {
    let (layout, blk, peak) = compute_block(&a)?;
    let b = blk.order();
    io::write_matrix(&a.out, &DenseMatrix::from_vec(b, blk.into_vec())?)?;
    let bound = 2 * a.k + 4;
    emit(
        json,
        json!({ "row": a.row, "col": a.col, "k": a.k, "b": layout.b(), "peak_blocks": peak, "bound": bound }),
        || {
            format!(
                "N({},{}) order {b}: peak {peak} live blocks (bound {bound})",
                a.row, a.col
            )
        },
    );
    Ok(())
}

/// Largest |z − o| with its position, and that value relative to ‖o‖_max.
fn worst_entry(z: &DenseMatrix, oracle: &DenseMatrix) -> (usize, usize, f64, f64) {
    let m = z.order();
    let mut worst = (0, 0, 0.0f64);
    for i in 0..m {
        for j in 0..m {
            let d = (z.get(i, j) - oracle.get(i, j)).abs();
            if d > worst.2 || d.is_nan() {
                worst = (i, j, d);
                if d.is_nan() {
                    break;
                }
            }
        }
    }
    let scale = oracle.max_abs();
    let rel = if scale > 0.0 { worst.2 / scale } else { worst.2 };
    (worst.0, worst.1, worst.2, rel)
}

pub fn verify(a: VerifyArgs, json: bool) -> Result<()> {
    if a.tol.is_nan() || a.tol < 0.0 {
        return usage("--tol must be non-negative");
    }
    let layout = checked_layout(&a.input, a.k)?;
    if let Some(inv) = &a.inverse {
        let h = io::read_header(inv)?;
        if h.m != layout.m() as u64 {
            return usage(format!("inverse has order {}, input has {}", h.m, layout.m()));
        }
    }
    let x = io::read_matrix(&a.input)?;
    let oracle = lu_invert_full(&x)?;
    let z = match &a.inverse {
        Some(path) => io::read_matrix(path)?,
        None => {
            let provider = file_provider(&a.input, a.k)?;
            let mut sink = DenseSink::new(provider.layout());
            invert_full_with(&provider, &mut sink, &InvertOptions::default())?;
            sink.finish()?
        }
    };
    let (i, j, abs, rel) = worst_entry(&z, &oracle);
    let pass = rel <= a.tol;
    emit(
        json,
        json!({
            "pass": pass,
            "max_rel_error": rel,
            "max_abs_error": abs,
            "worst": [i + 1, j + 1],
            "tol": a.tol,
        }),
        || {
            format!(
                "{} max relative error {rel:.3e} (abs {abs:.3e}) at ({}, {}), tol {:.1e}",
                if pass { "PASS" } else { "FAIL" },
                i + 1,
                j + 1,
                a.tol
            )
        },
    );
    if pass {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "error {rel:.3e} at ({}, {}) exceeds {:.1e}",
            i + 1,
            j + 1,
            a.tol
        )))
    }
}

fn median_json(r: &MedianRow) -> serde_json::Value {
    json!({
        "method": r.method.as_str(),
        "m": r.m,
        "k": r.k,
        "wall_ms": r.wall_ms,
        "peak_bytes": r.peak_bytes,
        "runs": r.runs,
    })
}

pub fn bench(a: BenchArgs, json: bool) -> Result<()> {
    let k_list = parse_k_list(&a.k_list).map_err(|e| Failure::Usage(e.to_string()))?;
    if a.repeat == 0 {
        return usage("--repeat must be at least 1");
    }
    let m = match (&a.input, a.m) {
        (Some(_), Some(_)) => return usage("give either --in or --m, not both"),
        (None, None) => return usage("bench needs --in or --m"),
        (Some(path), None) => io::read_header(path)?.m as usize,
        (None, Some(m)) => m,
    };
    if let Some(&k) = k_list.iter().find(|&&k| k > m) {
        return usage(format!("k={k} exceeds the matrix order {m}"));
    }
    let matrix = match &a.input {
        Some(path) => io::read_matrix(path)?,
        None => randn_shifted(m, a.seed),
    };
    let records = sweep(&matrix, &k_list, a.repeat, a.seed)?;
    match &a.csv {
        Some(path) => write_bench_csv(File::create(path)?, &records)?,
        None => write_bench_csv(stdio::stdout().lock(), &records)?,
    }
    let rows = medians(&records);
    let mut report = String::new();
    for r in &rows {
        report.push_str(&format!(
            "median {} m={} k={} wall_ms={:.3} peak_bytes={} runs={}\n",
            r.method.as_str(),
            r.m,
            r.k,
            r.wall_ms,
            r.peak_bytes,
            r.runs
        ));
    }
    let value = serde_json::Value::Array(rows.iter().map(median_json).collect());
    if a.csv.is_some() {
        emit(json, value, || report.trim_end().to_string());
    } else {
        let mut err = stdio::stderr().lock();
        if json {
            writeln!(err, "{value}")?;
        } else {
            write!(err, "{report}")?;
        }
    }
    Ok(())
}
