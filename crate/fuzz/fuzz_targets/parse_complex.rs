#![no_main]

use libfuzzer_sys::fuzz_target;
use rotgen_core::verify::{parse_complex, parse_complex_list, ComplexSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(z) = parse_complex(text) {
        assert!(z.is_finite());
        assert_eq!(parse_complex(&ComplexSpec(z).to_string()).unwrap(), z);
    }
    let _ = parse_complex_list(text);
});
