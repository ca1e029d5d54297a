#![no_main]
use libfuzzer_sys::fuzz_target;
use pcsp_core::io::{parse_instance, serialize_instance};

fuzz_target!(|data: &[u8]| {
    if let Ok((t, i)) = parse_instance(data) {
        let bytes = serialize_instance(&t, &i);
        let (t2, i2) = parse_instance(&bytes).expect("serialized instance must parse");
        assert_eq!(serialize_instance(&t2, &i2), bytes);
    }
});
