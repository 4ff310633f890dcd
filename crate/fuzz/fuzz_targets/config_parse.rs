#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = two_elliptic_cli::parse_config(text, false);
        let _ = two_elliptic_cli::parse_config(text, true);
    }
});
