#![no_main]

use est_core::emotion::parse_state;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(state) = parse_state(s) {
        // accepted labels are exactly the canonical names, in any case
        assert!(state.name().eq_ignore_ascii_case(s));
        assert_eq!(parse_state(state.name()).unwrap(), state);
    }
});
