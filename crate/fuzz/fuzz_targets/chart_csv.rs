#![no_main]

use libfuzzer_sys::fuzz_target;
use two_elliptic::export::{read_chart_csv, write_curves_csv, Header};

fuzz_target!(|data: &[u8]| {
    if let Ok(curves) = read_chart_csv(data) {
        for c in &curves {
            assert!(c.points.windows(2).all(|w| w[0].0 < w[1].0));
        }
        // Accepted input must survive a write/read cycle.
        if let Some(c) = curves.first() {
            let a2 = c.alpha * c.alpha;
            let mut buf = Vec::new();
            write_curves_csv(&mut buf, &Header::new(), a2, std::slice::from_ref(c)).unwrap();
            let back = read_chart_csv(buf.as_slice()).unwrap();
            assert_eq!(back[0].points, c.points);
        }
    }
});
