#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = two_elliptic::export::read_grid_csv(data);
});
