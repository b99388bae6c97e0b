#![no_main]

use std::io::Cursor;

use bri::provider::{Augmented, FileSource};
use bri::{BlockProvider, Meter};
use libfuzzer_sys::fuzz_target;

// First byte picks k; the rest is the file image.
fuzz_target!(|data: &[u8]| {
    let Some((&k, file)) = data.split_first() else { return };
    let Ok(src) = FileSource::from_reader(Cursor::new(file.to_vec())) else {
        return;
    };
    if src.header().m > 64 {
        return;
    }
    let Ok(p) = Augmented::new(src, 2 + k as usize % 6) else {
        return;
    };
    let k = p.layout().k();
    let meter = Meter::new();
    for alpha in 1..=k {
        let _ = p.fetch(&meter, alpha, k + 1 - alpha);
    }
});
