#![no_main]

use libfuzzer_sys::fuzz_target;
use rotgen_core::verify::{FieldSpec, MAX_FIELD_DEGREE};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(shape) = text.parse::<FieldSpec>() {
        assert!(shape.x.max(shape.y).max(shape.z) <= MAX_FIELD_DEGREE);
    }
});
