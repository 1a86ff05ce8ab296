#![no_main]

use libfuzzer_sys::fuzz_target;
use rotgen_core::gridops::{read_field_csv, write_field_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(u) = read_field_csv(data) {
        let mut out = Vec::new();
        write_field_csv(&u, &mut out).expect("write succeeds");
        let back = read_field_csv(out.as_slice()).expect("round trip");
        assert_eq!(back.grid, u.grid);
        assert_eq!(back.values, u.values);
    }
});
