//! Experiment config deserialization and validation: no panics, and every
//! accepted config must survive a JSON round trip unchanged.

#![no_main]

use kravchuk::experiment::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = serde_json::from_str::<ExperimentConfig>(text) else { return };
    if config.validate().is_err() {
        return;
    }
    let json = serde_json::to_string(&config).expect("validated configs serialize");
    let again: ExperimentConfig = serde_json::from_str(&json).expect("own output must parse");
    assert_eq!(config, again);
});
