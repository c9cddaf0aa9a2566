#![no_main]

use libfuzzer_sys::fuzz_target;
use waveguide_inverse::invert::{format_spec_json, parse_spec_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(est) = parse_spec_json(text) {
        let _ = est.spectral_function().expect("validated estimate yields ρ");
        assert_eq!(parse_spec_json(&format_spec_json(&est)).unwrap(), est);
    }
});
