#![no_main]

use libfuzzer_sys::fuzz_target;
use two_elliptic::spectrum::CurveLabel;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(label) = text.parse::<CurveLabel>() {
            let back: CurveLabel = label.to_string().parse().unwrap();
            assert_eq!(back, label);
        }
    }
});
