#![no_main]

use libfuzzer_sys::fuzz_target;
use pdisc::format::{parse_point_set, write_any_point_set};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(set) = parse_point_set(text) {
            let out = write_any_point_set(&set);
            let again = parse_point_set(&out).expect("serialized form must reparse");
            assert_eq!(set, again, "round trip must reproduce the set");
        }
    }
});
