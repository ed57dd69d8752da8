#![no_main]

use libfuzzer_sys::fuzz_target;
use pdisc::format::{parse_weights, write_weights};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(w) = parse_weights(text) {
            let again = parse_weights(&write_weights(&w)).expect("round trip must reparse");
            assert_eq!(w.as_slice(), again.as_slice());
        }
    }
});
