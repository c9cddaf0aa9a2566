#![no_main]

use libfuzzer_sys::fuzz_target;
use waveguide_inverse::model::io::{format_curve_csv, parse_curve_csv};
use waveguide_inverse::model::CurveKind;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_curve_csv(text, CurveKind::G_of_lambda) {
        assert_eq!(parse_curve_csv(&format_curve_csv(&c), CurveKind::g_of_r).unwrap(), c);
    }
});
