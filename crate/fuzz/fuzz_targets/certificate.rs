#![no_main]
use libfuzzer_sys::fuzz_target;
use separation::{parse_certificates, serialize_certificates};

fuzz_target!(|data: &[u8]| {
    if let Ok(recs) = parse_certificates(data) {
        let bytes = serialize_certificates(&recs);
        let again = parse_certificates(&bytes).expect("serialized certificates must parse");
        assert_eq!(serialize_certificates(&again), bytes);
    }
});
