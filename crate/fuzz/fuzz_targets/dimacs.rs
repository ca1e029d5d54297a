#![no_main]
use libfuzzer_sys::fuzz_target;
use pcsp_core::dimacs::parse_dimacs_2sat;
use pcsp_core::io::{parse_instance, serialize_instance};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((t, i)) = parse_dimacs_2sat(text) {
        // Whatever DIMACS accepts must also be a valid JSON instance.
        let bytes = serialize_instance(&t, &i);
        parse_instance(&bytes).expect("converted instance must parse");
    }
});
