#![no_main]

use est_core::synth::SynthConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(config) = serde_json::from_str::<SynthConfig>(s) {
        let _ = config.validate();
    }
});
