#![no_main]

use libfuzzer_sys::fuzz_target;
use waveguide_inverse::model::io::{format_eigen_json, parse_eigen_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_eigen_json(text) {
        assert_eq!(parse_eigen_json(&format_eigen_json(&file)).unwrap(), file);
    }
});
