#![no_main]

use libfuzzer_sys::fuzz_target;
use trotter_dixmier::harness::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = ExperimentConfig::from_toml_str(text) {
        // Validation builds the operators; keep dimensions small enough to stay fast.
        if config.operator_a.dim() <= 32 && config.operator_b.dim() <= 32 {
            let _ = config.resolve();
        }
        if let Ok(serialized) = config.to_toml_string() {
            let back =
                ExperimentConfig::from_toml_str(&serialized).expect("serialized configs parse");
            // NaN fields compare unequal to themselves; compare the text instead.
            assert_eq!(back.to_toml_string().ok(), Some(serialized));
        }
    }
});
