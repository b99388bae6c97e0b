#![no_main]

use bri::io::read_bench_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_bench_csv(data);
});
