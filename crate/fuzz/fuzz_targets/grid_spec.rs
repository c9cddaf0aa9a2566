#![no_main]

use libfuzzer_sys::fuzz_target;
use waveguide_inverse::cli::GridSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = GridSpec::parse(text) {
        let pts = spec.points();
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|x| x.is_finite()));
    }
});
