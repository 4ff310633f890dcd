use std::fs;

use two_elliptic::export;
use two_elliptic::geometry::CoordLabel;
use two_elliptic_cli::{checks, CliError, parse_config, run_from_args, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("twoell").chain(args.iter().copied());
    let code = run_from_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn eigenvalues_at_zero_q_are_squares_of_half_integers() {
    let (code, out, _) = run(&["eigenvalues", "--alpha-sq", "0.0625", "--q1", "0", "--lambda-max", "16.5"]);
    assert_eq!(code, EXIT_OK);
    let rows = data_lines(&out);
    assert_eq!(rows.len(), 9);
    for (k, row) in rows.iter().enumerate() {
        let lambda: f64 = row.split(',').next().unwrap().parse().unwrap();
        let n = k as f64 / 2.0;
        assert!((lambda - n * n).abs() < 1e-8, "{row}");
        let parities = row.rsplit(',').next().unwrap();
        assert_eq!(parities, if k == 0 { "even" } else { "even;odd" });
    }
    assert!(out.contains("# command = eigenvalues"));
}

#[test]
fn chart_writes_curves_and_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chart.csv");
    let p = path.to_str().unwrap();
    let (code, _, err) = run(&["chart", "--alpha-sq", "0.25", "--q-max", "10", "--curves", "9", "--overlay-mathieu", "--output", p]);
    assert_eq!(code, EXIT_OK, "{err}");
    let curves = export::read_chart_csv(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(curves.len(), 17);
    for c in &curves {
        assert_eq!(c.points.first().unwrap().0, 0.0);
        assert!((c.points.last().unwrap().0 - 10.0).abs() < 1e-12);
    }
    let overlay = export::read_chart_csv(fs::File::open(dir.path().join("chart.csv.overlay")).unwrap()).unwrap();
    assert!(!overlay.is_empty());
}

#[test]
fn chart_output_is_deterministic() {
    let args = ["chart", "--alpha-sq", "0.5", "--q-max", "3", "--curves", "3", "--q-steps", "30"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(a, b);
}

#[test]
fn chart_json_round_trips() {
    let (code, out, _) = run(&["chart", "--alpha-sq", "2", "--q-max", "2", "--curves", "2", "--q-steps", "20", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let curves = export::read_chart_json(out.as_bytes()).unwrap();
    assert_eq!(curves.len(), 3);
}

#[test]
fn grid_has_both_families() {
    let (code, out, _) = run(&["grid", "--alpha-sq", "0.25", "--f1", "1"]);
    assert_eq!(code, EXIT_OK);
    let rows = export::read_grid_csv(out.as_bytes()).unwrap();
    assert!(rows.iter().any(|r| r.label == CoordLabel::Theta));
    assert!(rows.iter().any(|r| r.label == CoordLabel::Mu));
}

#[test]
fn eigenfunction_table_reads_back() {
    let (code, out, err) = run(&["eigenfunction", "--alpha-sq", "0.5", "--q1", "1", "--label", "3/2:odd", "--points", "33"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let rows = export::read_eigen_csv(out.as_bytes()).unwrap();
    assert_eq!(rows.len(), 33);
    assert!(out.contains(r#""n":"3/2""#) && out.contains(r#""parity":"odd""#));
}

#[test]
fn discriminant_routes_agree() {
    let (code, out, _) = run(&["discriminant", "--alpha-sq", "0.5", "--q1", "1", "--points", "5", "--route", "both"]);
    assert_eq!(code, EXIT_OK);
    let values: Vec<f64> = data_lines(&out).iter().map(|r| r.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 10);
    for pair in values.chunks(2) {
        assert!((pair[0] - pair[1]).abs() < 1e-9 * pair[0].abs().max(1.0));
    }
}

#[test]
fn validate_passes() {
    let (code, out, _) = run(&["validate", "--alpha-sq", "0.25"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(checks(2.0).unwrap().iter().all(|c| c.passed));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["chart"]).0, EXIT_USAGE);
    assert_eq!(run(&["chart", "--alpha-sq", "-1"]).0, EXIT_USAGE);
    assert_eq!(run(&["chart", "--alpha-sq", "0.5", "--tol", "1e-2"]).0, EXIT_USAGE);
    assert_eq!(run(&["chart", "--alpha-sq", "0.5", "--overlay-mathieu"]).0, EXIT_USAGE);
    assert_eq!(run(&["eigenfunction", "--alpha-sq", "0.5", "--label", "0:odd"]).0, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn numerical_failures_exit_with_two() {
    let lost = two_elliptic::Error::CurveLost { label: "1:even".into(), q1: 3.0, lambda: 2.0 };
    assert_eq!(CliError::from(lost).exit_code(), EXIT_NUMERICAL);
    let bad = two_elliptic::Error::Parse("x".into());
    assert_eq!(CliError::from(bad).exit_code(), EXIT_USAGE);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let toml_path = dir.path().join("run.toml");
    fs::write(&toml_path, "alpha_sq = 0.0625\nq1 = 0.0\nlambda_max = 16.5\n").unwrap();
    let t = toml_path.to_str().unwrap();
    let (code, out, _) = run(&["eigenvalues", "--config", t]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(data_lines(&out).len(), 9);
    let (code, out, _) = run(&["eigenvalues", "--config", t, "--lambda-max", "4.5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(data_lines(&out).len(), 5);

    let json_path = dir.path().join("run.json");
    fs::write(&json_path, r#"{"alpha_sq": 0.0625, "lambda_max": 1.5, "format": "json"}"#).unwrap();
    let (code, out, _) = run(&["eigenvalues", "--config", json_path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 3);

    assert!(parse_config("alpha_sq = 1\nbogus = 2\n", false).is_err());
    fs::write(&toml_path, "alpha_sq = \"wide\"\n").unwrap();
    assert_eq!(run(&["eigenvalues", "--config", t]).0, EXIT_USAGE);
}

#[test]
fn fuzz_seeds_are_accepted() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let seeds = |target: &str| -> Vec<Vec<u8>> {
        let mut v: Vec<_> = fs::read_dir(root.join(target)).unwrap().map(|e| e.unwrap().path()).collect();
        v.sort();
        v.iter().map(|p| fs::read(p).unwrap()).collect()
    };
    for s in seeds("chart_csv") {
        assert!(!export::read_chart_csv(s.as_slice()).unwrap().is_empty());
    }
    for s in seeds("chart_json") {
        assert!(!export::read_chart_json(s.as_slice()).unwrap().is_empty());
    }
    for s in seeds("grid_csv") {
        assert!(!export::read_grid_csv(s.as_slice()).unwrap().is_empty());
    }
    for s in seeds("eigen_csv") {
        assert!(!export::read_eigen_csv(s.as_slice()).unwrap().is_empty());
    }
    for s in seeds("curve_label") {
        std::str::from_utf8(&s).unwrap().parse::<two_elliptic::spectrum::CurveLabel>().unwrap();
    }
    let mut configs: Vec<_> = fs::read_dir(root.join("config_parse")).unwrap().map(|e| e.unwrap().path()).collect();
    configs.sort();
    for p in configs {
        let json = p.extension().is_some_and(|e| e == "json");
        parse_config(&fs::read_to_string(&p).unwrap(), json).unwrap();
    }
}
