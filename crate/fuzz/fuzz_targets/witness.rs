#![no_main]
use gap_at::parse_sidecar;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = parse_sidecar(data) {
        let bytes = s.to_json();
        let s2 = parse_sidecar(&bytes).expect("serialized sidecar must parse");
        assert_eq!(s2.to_json(), bytes);
    }
});
