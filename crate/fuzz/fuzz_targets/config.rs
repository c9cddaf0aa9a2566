#![no_main]

use libfuzzer_sys::fuzz_target;
use waveguide_inverse::cli::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(map) = parse_config(text) {
        let back: String = map.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        assert_eq!(parse_config(&back).unwrap(), map);
    }
});
