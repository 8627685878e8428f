#![no_main]

use std::path::Path;

use est_core::corpus::{fused_csv, parse_fused};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let path = Path::new("fused.csv");
    if let Ok(records) = parse_fused(data, path) {
        let written = fused_csv(&records);
        let again = parse_fused(written.as_bytes(), path).expect("written records parse");
        assert_eq!(again, records);
    }
});
