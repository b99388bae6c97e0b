//! BRIM matrix files, the trimming inverse sink, and CSV bench reports.
//!
//! BRIM layout (all little-endian):
//!
//! | bytes  | content                         |
//! |--------|---------------------------------|
//! | 0..4   | magic `BRIM`                    |
//! | 4..8   | version, u32 = 1                |
//! | 8..16  | order m, u64                    |
//! | 16     | dtype tag, 1 = f64              |
//! | 17..24 | reserved, zero                  |
//! | 24..   | m·m f64 values, row-major       |

use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baseline::DenseMatrix;
use crate::engine::BlockSink;
use crate::error::{Error, Result};
use crate::instrument::{BenchRecord, Method, OpCounters};
use crate::linalg::Block;
use crate::provider::BlockLayout;

pub const MAGIC: [u8; 4] = *b"BRIM";
pub const VERSION: u32 = 1;
pub const DTYPE_F64: u8 = 1;
pub const HEADER_LEN: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BrimHeader {
    pub m: u64,
}

impl BrimHeader {
    pub fn new(m: u64) -> Self {
        BrimHeader { m }
    }

    pub fn encode(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAGIC);
        out[4..8].copy_from_slice(&VERSION.to_le_bytes());
        out[8..16].copy_from_slice(&self.m.to_le_bytes());
        out[16] = DTYPE_F64;
        out
    }

    /// Parses the first 24 bytes of `bytes`.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!(
                "header needs {HEADER_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let m = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
        if m == 0 {
            return Err(Error::Format("matrix order is zero".into()));
        }
        if bytes[16] != DTYPE_F64 {
            return Err(Error::Format(format!("unsupported dtype tag {}", bytes[16])));
        }
        if bytes[17..24].iter().any(|&b| b != 0) {
            return Err(Error::Format("reserved header bytes are not zero".into()));
        }
        Ok(BrimHeader { m })
    }

    pub fn read_from<R: Read>(reader: &mut R) -> Result<Self> {
        let mut buf = [0u8; HEADER_LEN];
        reader.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => Error::Format("file shorter than header".into()),
            _ => Error::io_at(0, e),
        })?;
        BrimHeader::parse(&buf)
    }

    /// Total file length implied by the header, if it fits in a u64.
    pub fn file_len(&self) -> Option<u64> {
        self.m
            .checked_mul(self.m)
            .and_then(|n| n.checked_mul(8))
            .and_then(|n| n.checked_add(HEADER_LEN as u64))
    }

    pub fn check_len(&self, len: u64) -> Result<()> {
        match self.file_len() {
            Some(expected) if expected == len => Ok(()),
            Some(expected) => Err(Error::Format(format!(
                "expected {expected} bytes for m = {}, found {len}",
                self.m
            ))),
            None => Err(Error::Format(format!("matrix order {} overflows", self.m))),
        }
    }
}

/// Serializes a row-major m×m matrix to BRIM bytes.
pub fn encode_matrix(m: usize, data: &[f64]) -> Vec<u8> {
    assert_eq!(data.len(), m * m);
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * data.len());
    out.extend_from_slice(&BrimHeader::new(m as u64).encode());
    for v in data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses a complete BRIM byte image.
pub fn decode_matrix(bytes: &[u8]) -> Result<DenseMatrix> {
    let header = BrimHeader::parse(bytes)?;
    header.check_len(bytes.len() as u64)?;
    let data = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    DenseMatrix::from_vec(header.m as usize, data)
}

pub fn write_matrix(path: impl AsRef<Path>, matrix: &DenseMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&BrimHeader::new(matrix.order() as u64).encode())?;
    for v in matrix.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_header(path: impl AsRef<Path>) -> Result<BrimHeader> {
    let mut f = File::open(path)?;
    let header = BrimHeader::read_from(&mut f)?;
    header.check_len(f.metadata()?.len())?;
    Ok(header)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let file = File::open(path)?;
    let len = file.metadata()?.len();
    let mut r = BufReader::new(file);
    let header = BrimHeader::read_from(&mut r)?;
    header.check_len(len)?;
    let m = header.m as usize;
    let mut data = vec![0.0; m * m];
    let mut buf = [0u8; 8];
    for (idx, v) in data.iter_mut().enumerate() {
        r.read_exact(&mut buf)
            .map_err(|e| Error::io_at((HEADER_LEN + 8 * idx) as u64, e))?;
        *v = f64::from_le_bytes(buf);
    }
    DenseMatrix::from_vec(m, data)
}

/// Writes inverse blocks straight into a BRIM file of order m, dropping
/// padding rows and columns.
///
/// Output goes to `<path>.partial` and is renamed to `path` by
/// [`InverseFileSink::finish`]; an aborted run leaves the `.partial` file
/// behind as the marker of incomplete output.
pub struct InverseFileSink {
    file: File,
    layout: BlockLayout,
    received: Vec<bool>,
    partial: PathBuf,
    target: PathBuf,
}

impl InverseFileSink {
    pub fn create(path: impl AsRef<Path>, layout: BlockLayout) -> Result<Self> {
        let target = path.as_ref().to_path_buf();
        let mut partial = target.clone().into_os_string();
        partial.push(".partial");
        let partial = PathBuf::from(partial);
        let mut file = OpenOptions::new()
            .create(true)
            .write(true)
            .truncate(true)
            .open(&partial)?;
        let header = BrimHeader::new(layout.m() as u64);
        file.write_all(&header.encode())?;
        file.set_len(header.file_len().expect("m fits in memory"))?;
        Ok(InverseFileSink {
            file,
            layout,
            received: vec![false; layout.k() * layout.k()],
            partial,
            target,
        })
    }

    pub fn partial_path(&self) -> &Path {
        &self.partial
    }

    pub fn received(&self) -> usize {
        self.received.iter().filter(|&&r| r).count()
    }

    /// Checks that all k² blocks arrived, then publishes the file.
    pub fn finish(mut self) -> Result<PathBuf> {
        let expected = self.received.len();
        let received = self.received();
        if received != expected {
            return Err(Error::MissingBlocks { received, expected });
        }
        self.file.flush()?;
        self.file.sync_all()?;
        fs::rename(&self.partial, &self.target)?;
        Ok(self.target)
    }
}

impl BlockSink for InverseFileSink {
    fn accept(&mut self, alpha: usize, beta: usize, block: &Block) -> Result<()> {
        let layout = self.layout;
        layout.check_index(alpha, beta)?;
        if block.order() != layout.b() {
            return Err(Error::DimensionMismatch {
                left: block.order(),
                right: layout.b(),
            });
        }
        let m = layout.m();
        let rows = layout.span(alpha);
        let cols = layout.span(beta);
        let width = cols.end.min(m).saturating_sub(cols.start);
        if width > 0 {
            let mut bytes = Vec::with_capacity(8 * width);
            for i in rows.start..rows.end.min(m) {
                bytes.clear();
                for v in &block.row(i - rows.start)[..width] {
                    bytes.extend_from_slice(&v.to_le_bytes());
                }
                let offset = (HEADER_LEN + 8 * (i * m + cols.start)) as u64;
                self.file
                    .seek(SeekFrom::Start(offset))
                    .and_then(|_| self.file.write_all(&bytes))
                    .map_err(|e| Error::io_at(offset, e))?;
            }
        }
        self.received[(alpha - 1) * layout.k() + (beta - 1)] = true;
        Ok(())
    }
}

/// One CSV row of a bench report, in column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvBenchRow {
    pub method: Method,
    pub m: usize,
    pub k: usize,
    pub wall_ms: f64,
    pub peak_bytes: u64,
    pub n_block_inv: u64,
    pub n_block_mul: u64,
    pub seed: u64,
}

pub const CSV_COLUMNS: [&str; 8] = [
    "method",
    "m",
    "k",
    "wall_ms",
    "peak_bytes",
    "n_block_inv",
    "n_block_mul",
    "seed",
];

impl From<&BenchRecord> for CsvBenchRow {
    fn from(r: &BenchRecord) -> Self {
        CsvBenchRow {
            method: r.method,
            m: r.m,
            k: r.k,
            wall_ms: r.wall_ms,
            peak_bytes: r.peak_bytes,
            n_block_inv: r.counters.block_inversions,
            n_block_mul: r.counters.block_multiplications,
            seed: r.seed,
        }
    }
}

impl CsvBenchRow {
    /// Bench record with the counters the CSV carries; subtractions and
    /// node counts are not part of the report.
    pub fn to_record(&self) -> BenchRecord {
        BenchRecord {
            method: self.method,
            m: self.m,
            k: self.k,
            wall_ms: self.wall_ms,
            peak_bytes: self.peak_bytes,
            counters: OpCounters {
                block_inversions: self.n_block_inv,
                block_multiplications: self.n_block_mul,
                ..OpCounters::default()
            },
            seed: self.seed,
        }
    }
}

/// Writes a header row and one row per record.
pub fn write_bench_csv<W: Write>(writer: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.serialize(CsvBenchRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a bench report, requiring the exact column order.
pub fn read_bench_csv<R: Read>(reader: R) -> Result<Vec<CsvBenchRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Error::Format(format!(
            "unexpected csv header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
