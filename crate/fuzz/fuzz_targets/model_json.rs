#![no_main]

use est_core::learners::TrainedModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(model) = TrainedModel::from_json(s) {
        if model.n_features > 1 << 16 {
            return;
        }
        // scoring a loaded model must not panic on a well-sized input
        let _ = model.decision_score(&vec![0.5; model.n_features]);
        let again = TrainedModel::from_json(&model.to_json().unwrap()).expect("round trip");
        assert_eq!(again.n_features, model.n_features);
    }
});
