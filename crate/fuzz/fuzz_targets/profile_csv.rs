#![no_main]

use libfuzzer_sys::fuzz_target;
use waveguide_inverse::model::io::{format_profile_csv, parse_profile_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_profile_csv(text) {
        let again = parse_profile_csv(&format_profile_csv(&p)).expect("formatted profile must parse");
        assert_eq!(again, p);
    }
});
