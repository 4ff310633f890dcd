#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = two_elliptic::export::read_eigen_csv(data) {
        assert!(rows.windows(2).all(|w| w[0].theta <= w[1].theta));
    }
});
