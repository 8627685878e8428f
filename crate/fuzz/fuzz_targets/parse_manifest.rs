#![no_main]

use std::path::Path;

use est_core::corpus::{manifest_csv, parse_manifest};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let path = Path::new("manifest.csv");
    if let Ok(manifest) = parse_manifest(data, path) {
        let written = manifest_csv(&manifest);
        let again = parse_manifest(written.as_bytes(), path).expect("written manifest parses");
        assert_eq!(again, manifest);
    }
});
