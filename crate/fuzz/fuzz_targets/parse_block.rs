#![no_main]

use std::path::Path;

use est_core::corpus::{block_csv, parse_block};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let path = Path::new("aux.csv");
    if let Ok(block) = parse_block(data, path, "aux") {
        assert!(block
            .rows()
            .all(|(_, row)| row.iter().all(|v| v.is_finite())));
        let written = block_csv(&block);
        let again = parse_block(written.as_bytes(), path, "aux").expect("written block parses");
        assert_eq!(again, block);
    }
});
