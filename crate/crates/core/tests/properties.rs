use approx::assert_relative_eq;
use proptest::prelude::*;

use two_elliptic::discriminant;
use two_elliptic::export::{self, Header};
use two_elliptic::spectrum::{self, Branch, CharacteristicCurve, CurveLabel, Parity};

fn label_strategy(max_twice: u32) -> impl Strategy<Value = CurveLabel> {
    (0..=max_twice, prop::bool::ANY).prop_filter_map("no odd n = 0", |(t, odd)| {
        CurveLabel::new(t, if odd { Parity::Odd } else { Parity::Even }).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn routes_agree(lambda in -5.0..25.0f64, q1 in 0.0..6.0f64, alpha in 0.3..3.0f64) {
        let m = discriminant::discriminant_monodromy(lambda, q1, alpha, 1e-12).unwrap();
        let c = discriminant::discriminant_closed_form(lambda, q1, alpha, 1e-12).unwrap();
        let h = discriminant::discriminant_half_turn(lambda, q1, alpha, 1e-12).unwrap();
        let scale = m.abs().max(1.0);
        prop_assert!((m - c).abs() < 1e-9 * scale);
        prop_assert!((m - h).abs() < 1e-9 * scale);
    }

    // Shifting θ by π swaps the patches: (λ, q1, α) ↦ (λ, α² q1, 1/α). Parity
    // about 0 becomes parity about π, which flips on the antiperiodic branch.
    #[test]
    fn exchange_maps_curves(label in label_strategy(8), q1 in 0.0..8.0f64, alpha in 0.3..2.5f64) {
        let l = spectrum::solve_label(label, q1, alpha, 1e-11).unwrap();
        let image = match label.branch() {
            Branch::Plus => label,
            Branch::Minus => {
                let p = match label.parity() {
                    Parity::Even => Parity::Odd,
                    Parity::Odd => Parity::Even,
                };
                CurveLabel::new(label.twice_index(), p).unwrap()
            }
        };
        let m = spectrum::solve_label(image, alpha * alpha * q1, 1.0 / alpha, 1e-11).unwrap();
        prop_assert!((l - m).abs() < 1e-8 * l.abs().max(1.0), "{} vs {}", l, m);
    }

    #[test]
    fn scan_agrees_with_labels(q1 in 0.0..6.0f64, alpha in 0.3..2.5f64) {
        let tol = 1e-10;
        let ev = spectrum::eigenvalues_at(q1, alpha, 12.0, tol).unwrap();
        prop_assert!(ev.windows(2).all(|w| w[0].lambda <= w[1].lambda));
        // |dD/dλ| is huge on deep curves, so test for a sign change across a
        // small bracket (or a touch at the root) rather than a residual.
        let gap = |l: f64, beta: f64| discriminant::discriminant_half_turn(l, q1, alpha, 1e-12).unwrap() - beta;
        for e in &ev {
            let beta = e.branch.beta();
            let h = 10.0 * tol * e.lambda.abs().max(1.0);
            let crosses = gap(e.lambda - h, beta) * gap(e.lambda + h, beta) <= 0.0;
            prop_assert!(crosses || gap(e.lambda, beta).abs() < 1e-6, "{:?}", e);
        }
        for label in CurveLabel::first(4) {
            let l = spectrum::solve_label(label, q1, alpha, tol).unwrap();
            if l < 12.0 - 1e-6 {
                let hit = ev.iter().any(|e| e.branch == label.branch() && (e.lambda - l).abs() < 10.0 * tol * l.abs().max(1.0));
                prop_assert!(hit, "{} at {} missing", label, l);
            }
        }
    }

    #[test]
    fn curves_are_ordered_within_a_class(q1 in 0.0..8.0f64, alpha in 0.3..2.5f64) {
        for parity in [Parity::Even, Parity::Odd] {
            for start in [1u32, 2] {
                let values: Vec<f64> = (0..4)
                    .map(|k| start + 2 * k)
                    .filter_map(|t| CurveLabel::new(t, parity).ok())
                    .map(|l| spectrum::solve_label(l, q1, alpha, 1e-10).unwrap())
                    .collect();
                prop_assert!(values.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn label_text_round_trip(label in label_strategy(400)) {
        let back: CurveLabel = label.to_string().parse().unwrap();
        prop_assert_eq!(back, label);
        let (n, d) = label.fraction();
        assert_relative_eq!(n as f64 / d as f64, label.index());
    }

    #[test]
    fn chart_csv_round_trip(points in prop::collection::vec((0.0..1e3f64, -1e3..1e3f64), 1..40), label in label_strategy(20), a2 in 0.01..10.0f64) {
        let mut pts = points;
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        let curve = CharacteristicCurve { label, alpha: a2.sqrt(), points: pts };
        let mut buf = Vec::new();
        export::write_curves_csv(&mut buf, &Header::new(), a2, std::slice::from_ref(&curve)).unwrap();
        let back = export::read_chart_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(&back[0].points, &curve.points);
        prop_assert_eq!(back[0].label, label);
    }
}

#[test]
fn classify_matches_discriminant() {
    for &(lambda, q1, alpha) in &[(0.5, 0.0, 0.5), (-1.0, 0.0, 0.5), (3.0, 2.0, 0.7), (-4.0, 5.0, 1.3)] {
        let d = discriminant::discriminant_monodromy(lambda, q1, alpha, 1e-12).unwrap();
        let v = spectrum::classify(lambda, q1, alpha, 1e-7).unwrap();
        let expect = if d.abs() < 1.0 - 1e-7 {
            spectrum::StabilityVerdict::Stable
        } else {
            spectrum::StabilityVerdict::Unstable
        };
        assert_eq!(v, expect);
    }
}

#[test]
fn chart_is_deterministic() {
    let a = spectrum::chart(0.5, 4.0, 4, 40, 1e-9, true).unwrap();
    let b = spectrum::chart(0.5, 4.0, 4, 40, 1e-9, true).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.curves.len(), 7);
    let overlay = a.overlay.unwrap();
    assert!(overlay.iter().all(|c| c.label.branch() == Branch::Plus));
    for c in &a.curves {
        assert_eq!(c.curve.points[0], (0.0, c.curve.label.start_lambda()));
        assert_eq!(spectrum::continuity_violations(&c.curve), 0);
    }
}
