#![no_main]

use libfuzzer_sys::fuzz_target;
use nsenergy::snapshot::{decode, encode};

fuzz_target!(|data: &[u8]| {
    // anything that decodes must re-encode to the same bytes
    if let Ok(snap) = decode(data) {
        assert_eq!(encode(&snap), data);
    }
});
