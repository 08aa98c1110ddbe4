#![no_main]

use libfuzzer_sys::fuzz_target;
use nsenergy::exponent_calculus::{holder_conjugate, Exponent};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(q) = text.parse::<Exponent>() {
        assert_eq!(q.to_string().parse::<Exponent>().unwrap(), q);
        assert_eq!(holder_conjugate(&holder_conjugate(&q)), q);
    }
});
