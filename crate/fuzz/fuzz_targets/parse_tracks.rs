#![no_main]

use std::path::Path;

use est_core::corpus::{parse_tracks, tracks_csv};
use est_core::emotion::Modality;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let path = Path::new("tracks.csv");
    for modality in [Modality::Visual, Modality::Audio] {
        if let Ok(tracks) = parse_tracks(data, path, modality) {
            let written = tracks_csv(tracks.values(), modality);
            let again =
                parse_tracks(written.as_bytes(), path, modality).expect("written tracks parse");
            assert_eq!(again, tracks);
        }
    }
});
