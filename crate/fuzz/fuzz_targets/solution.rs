#![no_main]
use basic_sdp::{parse_solution, serialize_solution};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = parse_solution(data) {
        let bytes = serialize_solution(&s);
        let s2 = parse_solution(&bytes).expect("serialized solution must parse");
        assert_eq!(serialize_solution(&s2), bytes);
    }
});
