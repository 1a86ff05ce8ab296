#![no_main]

use libfuzzer_sys::fuzz_target;
use rotgen_core::verify::SuiteConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = SuiteConfig::from_json_str(text) {
        let printed = serde_json::to_string(&config).expect("serializes");
        assert_eq!(SuiteConfig::from_json_str(&printed).expect("round trip"), config);
    }
});
