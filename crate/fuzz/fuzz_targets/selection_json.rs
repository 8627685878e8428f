#![no_main]

use est_core::fusion::SelectionMask;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(mask) = SelectionMask::from_json(s) {
        let row = vec![1.0; mask.dimension()];
        assert_eq!(mask.apply(&row).len(), mask.k());
    }
});
