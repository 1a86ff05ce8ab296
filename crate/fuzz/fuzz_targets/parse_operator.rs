#![no_main]

use libfuzzer_sys::fuzz_target;
use rotgen_core::symop::parse_operator;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(op) = parse_operator(text) {
        // the canonical printer's output must parse back to the same operator
        let printed = op.to_string();
        let again = parse_operator(&printed).expect("printed form parses");
        assert_eq!(again, op, "{printed}");
    }
});
