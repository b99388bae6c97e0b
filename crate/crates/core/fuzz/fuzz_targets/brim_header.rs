#![no_main]

use bri::io::BrimHeader;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(h) = BrimHeader::parse(data) {
        assert_eq!(BrimHeader::parse(&h.encode()).unwrap(), h);
        let _ = h.file_len();
    }
});
