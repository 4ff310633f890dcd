//! End-to-end acceptance checks. Each test prints one `criterion N: PASS|FAIL`
//! line with the measured figures before asserting.
//!
//! Run with `cargo test -p two-elliptic --test acceptance -- --nocapture`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use two_elliptic::discriminant::{self, Route};
use two_elliptic::eigenfun::{self, AngularEigenfunction};
use two_elliptic::geometry::{self, AngularCoord, Region, SystemConfig};
use two_elliptic::hill::{self, State2};
use two_elliptic::oracle::{self, MathieuKind};
use two_elliptic::spectrum::{self, Branch, CurveLabel, Parity};

const ALPHA_SQ: [f64; 4] = [0.0625, 0.25, 0.90625, 2.0];

fn report(n: u32, ok: bool, detail: String) {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

#[test]
fn criterion_1_zero_q_spectrum() {
    let start = Instant::now();
    let expect = [0.0, 0.25, 1.0, 2.25, 4.0, 6.25, 9.0, 12.25, 16.0];
    let mut worst: f64 = 0.0;
    let mut shape_ok = true;
    for a2 in ALPHA_SQ {
        let ev = spectrum::eigenvalues_at(0.0, a2.sqrt(), 16.5, 1e-10).unwrap();
        shape_ok &= ev.len() == expect.len();
        for (i, (e, x)) in ev.iter().zip(expect).enumerate() {
            worst = worst.max((e.lambda - x).abs());
            let want = if i % 2 == 0 { Branch::Plus } else { Branch::Minus };
            shape_ok &= e.branch == want;
        }
    }
    let elapsed = start.elapsed();
    let ok = shape_ok && worst < 1e-8 && within(elapsed, 5);
    report(1, ok, format!("max error {worst:.2e}, branches alternate: {shape_ok}, {elapsed:.2?}"));
    assert!(ok);
}

#[test]
fn criterion_2_unit_alpha_reduces_to_mathieu() {
    let start = Instant::now();
    let grid = spectrum::uniform_grid(10.0, 200);
    let checkpoints = [1.0, 5.0, 10.0];
    let mut worst: f64 = 0.0;
    let mut lost = 0;
    let labels = CurveLabel::first(9);
    for &label in &labels {
        match spectrum::trace_curve(label, 1.0, &grid, 1e-10) {
            Ok(curve) => {
                for &q in &checkpoints {
                    let &(_, lambda) = curve.points.iter().find(|p| p.0 == q).expect("grid point on curve");
                    let reference = spectrum::mathieu_reference(label, q).unwrap();
                    worst = worst.max((lambda - reference).abs());
                }
            }
            Err(e) => {
                println!("  {label}: {e}");
                lost += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = lost == 0 && worst < 1e-6 && within(elapsed, 60);
    report(
        2,
        ok,
        format!("{} curves, {lost} lost, max |λ - oracle| {worst:.2e}, {elapsed:.2?}", labels.len()),
    );
    assert!(ok);
}

#[test]
fn criterion_3_closed_form_matches_monodromy() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut worst_at = (0.0, 0.0, 0.0);
    let mut failures = 0;
    for _ in 0..1000 {
        let lambda = rng.gen_range(-5.0..25.0);
        let q1 = rng.gen_range(0.0..10.0);
        let alpha = rng.gen_range(0.2..5.0);
        let m = discriminant::sample(lambda, q1, alpha, Route::Monodromy, 1e-12).unwrap().value;
        let c = discriminant::sample(lambda, q1, alpha, Route::ClosedForm, 1e-12).unwrap().value;
        let gap = (m - c).abs() / m.abs().max(1.0);
        if gap >= 1e-9 {
            failures += 1;
        }
        if gap > worst {
            worst = gap;
            worst_at = (lambda, q1, alpha);
        }
    }
    let elapsed = start.elapsed();
    let ok = failures == 0 && within(elapsed, 60);
    report(
        3,
        ok,
        format!(
            "max |Δ|/max(1,|D|) {worst:.2e} at (λ, q1, α) = ({:.3}, {:.3}, {:.3}), {failures} failures, {elapsed:.2?}",
            worst_at.0, worst_at.1, worst_at.2
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_half_exchange_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let lambda = rng.gen_range(-5.0..25.0);
        let q1 = rng.gen_range(0.0..10.0);
        let alpha = rng.gen_range(0.2..5.0);
        let d = discriminant::discriminant_monodromy(lambda, q1, alpha, 1e-12).unwrap();
        let e = discriminant::discriminant_monodromy(lambda, alpha * alpha * q1, 1.0 / alpha, 1e-12).unwrap();
        worst = worst.max((d - e).abs() / d.abs().max(1.0));
    }
    let ok = worst < 1e-9;
    report(4, ok, format!("max |Δ|/max(1,|D|) {worst:.2e} over 500 samples"));
    assert!(ok);
}

const SWEEP_TOL: f64 = 1e-12;

#[test]
fn criterion_5_symplectic_invariants() {
    let mut worst_det: f64 = 0.0;
    let mut worst_w: f64 = 0.0;
    let spans = [(-FRAC_PI_2, FRAC_PI_2), (FRAC_PI_2, 3.0 * FRAC_PI_2), (0.0, PI), (0.3, -2.1)];
    for i in 0..=10 {
        let lambda = -5.0 + 2.5 * i as f64;
        for j in 0..=5 {
            let q = 2.0 * j as f64;
            for &(a, b) in &spans {
                let p = hill::propagate(lambda, q, a, b, SWEEP_TOL).unwrap();
                let e = p.entries;
                let scale = (e[0][0] * e[1][1]).abs() + (e[0][1] * e[1][0]).abs();
                worst_det = worst_det.max((p.det() - 1.0).abs() / scale.max(1.0));
            }
            let points = [0.4, 1.1, 2.5, 4.0];
            let c = hill::transport_to_points(lambda, q, State2::new(1.0, 0.0, 0.0), &points, SWEEP_TOL).unwrap();
            let s = hill::transport_to_points(lambda, q, State2::new(0.0, 1.0, 0.0), &points, SWEEP_TOL).unwrap();
            for (c, s) in c.iter().zip(&s) {
                // Relative to the size of the two products that cancel.
                let scale = (c.value * s.slope).abs() + (c.slope * s.value).abs();
                worst_w = worst_w.max((hill::wronskian(c, s) - 1.0).abs() / scale.max(1.0));
            }
        }
    }
    let ok = worst_det < 1e-9 && worst_w < 1e-9;
    report(5, ok, format!("max relative |det P - 1| {worst_det:.2e}, max relative Wronskian drift {worst_w:.2e}"));
    assert!(ok);
}

#[test]
fn criterion_6_stability_charts() {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for a2 in ALPHA_SQ {
        let alpha = a2.sqrt();
        let chart = spectrum::chart(alpha, 10.0, 9, spectrum::DEFAULT_Q_STEPS, CHART_ROOT_TOL, false).unwrap();
        let mut violations = 0;
        let mut lost = 0;
        let mut worst: f64 = 0.0;
        let mut minus_complete = 0;
        for c in &chart.curves {
            if c.error.is_some() {
                lost += 1;
            }
            violations += spectrum::continuity_violations(&c.curve);
            let beta = c.curve.label.branch().beta();
            for &(q, lambda) in &c.curve.points {
                let d = discriminant::discriminant_half_turn(lambda, q, alpha, 1e-13).unwrap();
                worst = worst.max((d - beta).abs());
            }
            if c.curve.label.branch() == Branch::Minus && c.curve.points.last().map(|p| p.0) == Some(10.0) {
                minus_complete += 1;
            }
        }
        let good = lost == 0 && violations == 0 && worst < 1e-7 && minus_complete == 8;
        ok &= good;
        lines.push(format!(
            "α²={a2}: {} curves, {lost} lost, {violations} jumps, max |D∓1| {worst:.1e}, {minus_complete} half-integer curves to q1=10",
            chart.curves.len()
        ));
    }
    let elapsed = start.elapsed();
    ok &= within(elapsed, 600);
    report(6, ok, format!("{}; {elapsed:.2?}", lines.join("; ")));
    assert!(ok);
}

// On the deep ground curves at α² = 2, |dD/dλ| reaches 6e5, so |D ∓ 1| < 1e-7
// needs λ to about 1e-13.
const CHART_ROOT_TOL: f64 = 1e-12;

#[test]
fn criterion_7_eigenfunctions() {
    let q1 = 2.0;
    let alpha = 0.5;
    let mut worst_seam: f64 = 0.0;
    let mut worst_bloch: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;

    let plus: Vec<CurveLabel> = [(0, Parity::Even), (2, Parity::Even), (2, Parity::Odd), (4, Parity::Even), (4, Parity::Odd), (6, Parity::Even)]
        .iter()
        .map(|&(t, p)| CurveLabel::new(t, p).unwrap())
        .collect();
    let minus: Vec<CurveLabel> = [(1, Parity::Even), (1, Parity::Odd), (3, Parity::Even), (3, Parity::Odd)]
        .iter()
        .map(|&(t, p)| CurveLabel::new(t, p).unwrap())
        .collect();
    for family in [&plus, &minus] {
        let fs: Vec<AngularEigenfunction> = family
            .iter()
            .map(|&l| AngularEigenfunction::build(l, q1, alpha, 1e-12).unwrap())
            .collect();
        for (i, f) in fs.iter().enumerate() {
            worst_seam = worst_seam.max(f.seam_residual().unwrap());
            worst_bloch = worst_bloch.max(f.bloch_residual().unwrap());
            worst_norm = worst_norm.max((f.norm_sq().unwrap() - 1.0).abs());
            for g in &fs[i + 1..] {
                worst_orth = worst_orth.max(eigenfun::orthogonality_check(f, g, 128).unwrap().abs());
            }
        }
    }

    // α = 1 against the classical Fourier series (unit norm on [0, 2π]).
    let mut worst_oracle: f64 = 0.0;
    let thetas: Vec<f64> = (0..41).map(|i| -FRAC_PI_2 + 2.0 * PI * i as f64 / 40.0).collect();
    for &(twice, parity) in &[(0u32, Parity::Even), (2, Parity::Even), (2, Parity::Odd), (4, Parity::Even), (4, Parity::Odd), (6, Parity::Odd)] {
        let label = CurveLabel::new(twice, parity).unwrap();
        let f = AngularEigenfunction::build(label, q1, 1.0, 1e-12).unwrap();
        let kind = match parity {
            Parity::Even => MathieuKind::A,
            Parity::Odd => MathieuKind::B,
        };
        let order = twice / 2;
        let tab = f.tabulate(&thetas).unwrap();
        let reference: Vec<f64> = thetas
            .iter()
            .map(|&t| oracle::eval_ce_se(order, kind, q1, t, oracle::default_truncation(order, q1)).unwrap())
            .collect();
        let dot: f64 = tab.iter().zip(&reference).map(|(a, b)| a.value * b).sum();
        let sign = dot.signum();
        for (a, b) in tab.iter().zip(&reference) {
            worst_oracle = worst_oracle.max((sign * a.value - b).abs());
        }
    }

    let ok = worst_seam < 1e-8 && worst_bloch < 1e-8 && worst_norm < 1e-7 && worst_orth < 1e-6 && worst_oracle < 1e-6;
    report(
        7,
        ok,
        format!(
            "seam {worst_seam:.1e}, Bloch {worst_bloch:.1e}, norm {worst_norm:.1e}, overlap {worst_orth:.1e}, α=1 vs series {worst_oracle:.1e}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_geometry() {
    let mut seam_gap: f64 = 0.0;
    let mut coincide = true;
    let mut worst_orth: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for a2 in ALPHA_SQ {
        let cfg = SystemConfig::from_alpha_sq(1.3, a2, 1.0).unwrap();
        for i in 0..200 {
            let mu = 3.0 * i as f64 / 199.0;
            for seam in [FRAC_PI_2, 3.0 * FRAC_PI_2] {
                let right_theta = seam - PI * (seam > PI) as u8 as f64 * 2.0;
                let l = geometry::to_cartesian(AngularCoord::with_region(seam, Region::Left).unwrap(), mu, &cfg);
                let r = geometry::to_cartesian(AngularCoord::with_region(right_theta, Region::Right).unwrap(), mu, &cfg);
                let scale = cfg.f1() * mu.cosh();
                seam_gap = seam_gap.max(((l.0 - r.0).abs() + (l.1 - r.1).abs()) / scale);
            }
        }
        for _ in 0..100 {
            let region = if rng.gen_bool(0.5) { Region::Right } else { Region::Left };
            let base = match region {
                Region::Right => 0.0,
                Region::Left => PI,
            };
            let theta = base + rng.gen_range(-1.4..1.4);
            let mu = rng.gen_range(0.05..2.5);
            let c = AngularCoord::with_region(theta, region).unwrap();
            worst_orth = worst_orth.max(geometry::orthogonality_residual(c, mu, &cfg, 1e-4).unwrap());
        }
    }
    let unit = SystemConfig::new(1.3, 1.0, 1.0).unwrap();
    for i in 0..200 {
        let theta = -FRAC_PI_2 + PI * i as f64 / 199.0;
        let mu = 0.01 * i as f64;
        let r = geometry::to_cartesian(AngularCoord::with_region(theta, Region::Right).unwrap(), mu, &unit);
        let expect = (1.3 * mu.cosh() * theta.cos(), 1.3 * mu.sinh() * theta.sin());
        coincide &= r == expect;
    }
    let ok = seam_gap <= 4.0 * f64::EPSILON && worst_orth < 1e-6 && coincide;
    report(
        8,
        ok,
        format!("seam gap {seam_gap:.1e} (relative), orthogonality {worst_orth:.1e}, α=1 coincidence exact: {coincide}"),
    );
    assert!(ok);
}

#[test]
fn criterion_9_radial_reduction() {
    let mut worst_gap: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for &(lambda, q1, r0) in &[(1.0, 0.5, (1.0, 0.0)), (-3.0, 2.0, (0.0, 1.0)), (9.0, 1.0, (0.7, -0.4)), (4.0, 0.0, (1.0, 1.0))] {
        let r0 = State2::new(r0.0, r0.1, 0.0);
        let l = eigenfun::radial_solve(Region::Left, lambda, q1, 1.0, r0, 2.0, 2001, 1e-12).unwrap();
        let r = eigenfun::radial_solve(Region::Right, lambda, q1, 1.0, r0, 2.0, 2001, 1e-12).unwrap();
        for (a, b) in l.samples.iter().zip(&r.samples) {
            worst_gap = worst_gap.max((a.value - b.value).abs() / a.value.abs().max(1.0));
        }
        for alpha in [0.5, 1.0, 1.7] {
            for region in [Region::Left, Region::Right] {
                let s = eigenfun::radial_solve(region, lambda, q1, alpha, r0, 2.0, 2001, 1e-12).unwrap();
                worst_res = s.residuals().into_iter().fold(worst_res, f64::max);
            }
        }
    }
    let ok = worst_gap < 1e-9 && worst_res < 1e-7;
    report(9, ok, format!("right vs left at α=1 {worst_gap:.1e} (relative), ODE residual {worst_res:.1e}"));
    assert!(ok);
}
