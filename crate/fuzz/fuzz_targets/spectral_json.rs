#![no_main]

use libfuzzer_sys::fuzz_target;
use waveguide_inverse::model::io::{format_spectral_json, parse_spectral_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sd) = parse_spectral_json(text) {
        assert_eq!(parse_spectral_json(&format_spectral_json(&sd)).unwrap(), sd);
    }
});
