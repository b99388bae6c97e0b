use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::ops::Range;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::MatrixSource;
use crate::error::{Error, Result};
use crate::io::{BrimHeader, HEADER_LEN};

/// BRIM matrix read by seeking to each row segment.
///
/// Only one row segment is buffered at a time. Seeks are serialized behind a
/// mutex so concurrent fetches from several threads are safe.
#[derive(Debug)]
pub struct FileSource<R> {
    header: BrimHeader,
    reader: Mutex<R>,
    peak_buffer: AtomicUsize,
}

impl FileSource<File> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        FileSource::from_reader(File::open(path)?)
    }
}

impl<R: Read + Seek> FileSource<R> {
    /// Validates the header and the body length.
    pub fn from_reader(mut reader: R) -> Result<Self> {
        let header = BrimHeader::read_from(&mut reader)?;
        let len = reader.seek(SeekFrom::End(0))?;
        header.check_len(len)?;
        Ok(FileSource {
            header,
            reader: Mutex::new(reader),
            peak_buffer: AtomicUsize::new(0),
        })
    }

    pub fn header(&self) -> &BrimHeader {
        &self.header
    }

    /// Largest number of `f64` elements this source buffered at once.
    pub fn peak_buffer_elements(&self) -> usize {
        self.peak_buffer.load(Ordering::Relaxed)
    }
}

impl<R: Read + Seek + Send> MatrixSource for FileSource<R> {
    fn order(&self) -> usize {
        self.header.m as usize
    }

    fn fill(&self, rows: Range<usize>, cols: Range<usize>, out: &mut [f64]) -> Result<()> {
        let m = self.order() as u64;
        let w = cols.len();
        let mut bytes = vec![0u8; 8 * w];
        self.peak_buffer.fetch_max(w, Ordering::Relaxed);
        let mut reader = self.reader.lock().unwrap_or_else(|e| e.into_inner());
        for (r, i) in rows.enumerate() {
            let offset = HEADER_LEN as u64 + 8 * (i as u64 * m + cols.start as u64);
            reader
                .seek(SeekFrom::Start(offset))
                .map_err(|e| Error::io_at(offset, e))?;
            reader.read_exact(&mut bytes).map_err(|e| Error::io_at(offset, e))?;
            for (dst, chunk) in out[r * w..(r + 1) * w].iter_mut().zip(bytes.chunks_exact(8)) {
                *dst = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
            }
        }
        Ok(())
    }
}
