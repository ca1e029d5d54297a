#![no_main]
use libfuzzer_sys::fuzz_target;
use robust_pcsp_cli::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let _ = serde_json::from_slice::<ExperimentConfig>(data);
});
