//! `twoell`: stability charts, eigenvalue scans, eigenfunction tables,
//! coordinate grids and discriminant samples as reproducible files.
//!
//! Every option can also come from a TOML or JSON config file (`--config`);
//! flags given on the command line win. Exit codes: 0 success, 1 usage
//! error, 2 numerical failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use two_elliptic::discriminant::{self, Route};
use two_elliptic::eigenfun::{self, AngularEigenfunction};
use two_elliptic::export::{self, Header};
use two_elliptic::geometry::{self, SystemConfig};
use two_elliptic::spectrum::{self, CurveLabel, Parity, StabilityVerdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<two_elliptic::Error> for CliError {
    fn from(e: two_elliptic::Error) -> Self {
        use two_elliptic::Error as E;
        match e {
            E::InvalidParameter { .. } | E::InvalidTolerance(_) | E::Parse(_) | E::OffCurve { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteChoice {
    ClosedForm,
    Monodromy,
    Both,
}

#[derive(Debug, Parser)]
#[command(name = "twoell", version, about = "Two-elliptic coordinates: stability charts and eigenfunctions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace characteristic curves over [0, q-max].
    Chart(Opts),
    /// All characteristic values up to lambda-max at fixed q1.
    Eigenvalues(Opts),
    /// Tabulate one angular eigenfunction.
    Eigenfunction(Opts),
    /// Coordinate lines of the two-elliptic system.
    Grid(Opts),
    /// Sample the discriminant D(λ) at fixed q1.
    Discriminant(Opts),
    /// Run the built-in consistency checks.
    Validate(Opts),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Chart(_) => "chart",
            Command::Eigenvalues(_) => "eigenvalues",
            Command::Eigenfunction(_) => "eigenfunction",
            Command::Grid(_) => "grid",
            Command::Discriminant(_) => "discriminant",
            Command::Validate(_) => "validate",
        }
    }

    fn opts(&self) -> &Opts {
        match self {
            Command::Chart(o)
            | Command::Eigenvalues(o)
            | Command::Eigenfunction(o)
            | Command::Grid(o)
            | Command::Discriminant(o)
            | Command::Validate(o) => o,
        }
    }
}

/// Options shared by all subcommands; each uses the ones it needs. The same
/// keys (with underscores) are accepted in a config file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Opts {
    /// TOML or JSON file with default values for any of these options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Square of the scale coefficient α = f2/f1.
    #[arg(long)]
    pub alpha_sq: Option<f64>,
    #[arg(long)]
    pub q_max: Option<f64>,
    #[arg(long)]
    pub q1: Option<f64>,
    #[arg(long)]
    pub q_steps: Option<usize>,
    /// Number of indices n = 0, 1/2, 1, … to trace (both parities each).
    #[arg(long)]
    pub curves: Option<usize>,
    #[arg(long)]
    pub lambda_min: Option<f64>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// Curve label such as `3/2:odd` or `2:even`.
    #[arg(long)]
    pub label: Option<String>,
    /// Number of samples (θ points, λ points).
    #[arg(long)]
    pub points: Option<usize>,
    /// Root tolerance for characteristic values.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub f1: Option<f64>,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub n_mu: Option<usize>,
    #[arg(long)]
    pub mu_max: Option<f64>,
    #[arg(long, value_enum)]
    pub route: Option<RouteChoice>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the classical (α = 1) curves to `<output>.overlay`.
    #[arg(long)]
    #[serde(default)]
    pub overlay_mathieu: bool,
}

impl Opts {
    /// Fill every unset field of `self` from `base`.
    fn over(self, base: Opts) -> Opts {
        Opts {
            config: self.config,
            alpha_sq: self.alpha_sq.or(base.alpha_sq),
            q_max: self.q_max.or(base.q_max),
            q1: self.q1.or(base.q1),
            q_steps: self.q_steps.or(base.q_steps),
            curves: self.curves.or(base.curves),
            lambda_min: self.lambda_min.or(base.lambda_min),
            lambda_max: self.lambda_max.or(base.lambda_max),
            label: self.label.or(base.label),
            points: self.points.or(base.points),
            tol: self.tol.or(base.tol),
            f1: self.f1.or(base.f1),
            n_theta: self.n_theta.or(base.n_theta),
            n_mu: self.n_mu.or(base.n_mu),
            mu_max: self.mu_max.or(base.mu_max),
            route: self.route.or(base.route),
            format: self.format.or(base.format),
            output: self.output.or(base.output),
            overlay_mathieu: self.overlay_mathieu || base.overlay_mathieu,
        }
    }
}

/// Parse a config file body; `json` selects JSON, otherwise TOML.
pub fn parse_config(text: &str, json: bool) -> Result<Opts> {
    if json {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    } else {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }
}

fn load_config(path: &Path) -> Result<Opts> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    parse_config(&text, json)
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn positive(v: f64, flag: &str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{flag} must be positive and finite, got {v}")))
    }
}

fn non_negative(v: f64, flag: &str) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{flag} must be non-negative and finite, got {v}")))
    }
}

fn tolerance(v: Option<f64>) -> Result<f64> {
    let t = v.unwrap_or(spectrum::DEFAULT_ROOT_TOL);
    if t > 1e-14 && t < 1e-4 {
        Ok(t)
    } else {
        Err(CliError::Usage(format!("--tol must lie in (1e-14, 1e-4), got {t}")))
    }
}

fn io_err(path: &str, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{path}: {e}"))
}

/// Write through a closure to the output file or to `stdout`.
fn emit<F>(output: Option<&Path>, stdout: &mut dyn Write, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> two_elliptic::Result<()>,
{
    match output {
        Some(path) => {
            let name = path.display().to_string();
            let file = File::create(path).map_err(|e| io_err(&name, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush().map_err(|e| io_err(&name, e))
        }
        None => {
            body(stdout)?;
            stdout.flush().map_err(|e| io_err("stdout", e))
        }
    }
}

fn header_for(command: &str, o: &Opts) -> Header {
    let mut h = Header::new();
    h.set("command", command);
    let fields = serde_json::to_value(o).expect("options serialize");
    if let serde_json::Value::Object(map) = fields {
        for (k, v) in map {
            if k == "output" || v.is_null() || v == serde_json::Value::Bool(false) {
                continue;
            }
            let text = match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            h.set(&k, text);
        }
    }
    h
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    match run(&cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: &Command, stdout: &mut dyn Write) -> Result<()> {
    let flags = command.opts().clone();
    let base = match &flags.config {
        Some(p) => load_config(p)?,
        None => Opts::default(),
    };
    let o = flags.over(base);
    let header = header_for(command.name(), &o);
    let format = o.format.unwrap_or(Format::Csv);
    match command {
        Command::Chart(_) => chart(&o, &header, format, stdout),
        Command::Eigenvalues(_) => eigenvalues(&o, &header, format, stdout),
        Command::Eigenfunction(_) => eigenfunction(&o, &header, format, stdout),
        Command::Grid(_) => grid(&o, &header, format, stdout),
        Command::Discriminant(_) => discriminant_table(&o, &header, format, stdout),
        Command::Validate(_) => validate(&o, &header, format, stdout),
    }
}

fn overlay_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".overlay");
    PathBuf::from(s)
}

fn chart(o: &Opts, header: &Header, format: Format, stdout: &mut dyn Write) -> Result<()> {
    let alpha = positive(need(o.alpha_sq, "alpha-sq")?, "alpha-sq")?.sqrt();
    let q_max = positive(o.q_max.unwrap_or(10.0), "q-max")?;
    let n_curves = o.curves.unwrap_or(9);
    let q_steps = o.q_steps.unwrap_or(spectrum::DEFAULT_Q_STEPS);
    if n_curves == 0 || q_steps == 0 {
        return Err(CliError::Usage("--curves and --q-steps must be at least 1".into()));
    }
    let tol = tolerance(o.tol)?;
    if o.overlay_mathieu && o.output.is_none() {
        return Err(CliError::Usage("--overlay-mathieu needs --output".into()));
    }
    let chart = spectrum::chart(alpha, q_max, n_curves, q_steps, tol, o.overlay_mathieu)?;
    emit(o.output.as_deref(), stdout, |w| match format {
        Format::Csv => export::write_chart_csv(w, header, &chart),
        Format::Json => export::write_json(w, &export::chart_to_json(header, &chart)),
    })?;
    if let (Some(overlay), Some(out)) = (&chart.overlay, &o.output) {
        let mut h = header.clone();
        h.set("overlay", "classical Mathieu curves, alpha_sq = 1");
        emit(Some(&overlay_path(out)), stdout, |w| match format {
            Format::Csv => export::write_curves_csv(w, &h, 1.0, overlay),
            Format::Json => export::write_json(w, &export::curves_to_json(&h, 1.0, overlay)),
        })?;
    }
    let lost: Vec<String> = chart
        .curves
        .iter()
        .filter_map(|c| c.error.as_ref().map(|e| format!("{}: {e}", c.curve.label)))
        .collect();
    if lost.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("partial chart written; {}", lost.join("; "))))
    }
}

#[derive(Serialize)]
struct EigenvalueRow {
    lambda: f64,
    branch: String,
    parities: String,
}

#[derive(Serialize)]
struct EigenvaluesJson<'a> {
    alpha_sq: f64,
    q1: f64,
    eigenvalues: &'a [spectrum::Eigenvalue],
    meta: &'a Header,
}

fn write_csv_rows<W: Write + ?Sized, R: Serialize>(w: &mut W, header: &Header, columns: &[&str], rows: &[R]) -> two_elliptic::Result<()> {
    let io = |e: std::io::Error| two_elliptic::Error::Parse(format!("i/o: {e}"));
    for (k, v) in &header.0 {
        writeln!(w, "# {k} = {v}").map_err(io)?;
    }
    let mut out = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    let csv_err = |e: csv::Error| two_elliptic::Error::Parse(format!("csv: {e}"));
    out.write_record(columns).map_err(csv_err)?;
    for r in rows {
        out.serialize(r).map_err(csv_err)?;
    }
    out.flush().map_err(io)
}

fn eigenvalues(o: &Opts, header: &Header, format: Format, stdout: &mut dyn Write) -> Result<()> {
    let alpha_sq = positive(need(o.alpha_sq, "alpha-sq")?, "alpha-sq")?;
    let q1 = non_negative(o.q1.unwrap_or(0.0), "q1")?;
    let lambda_max = positive(need(o.lambda_max, "lambda-max")?, "lambda-max")?;
    let tol = tolerance(o.tol)?;
    let ev = spectrum::eigenvalues_at(q1, alpha_sq.sqrt(), lambda_max, tol)?;
    emit(o.output.as_deref(), stdout, |w| match format {
        Format::Csv => {
            let rows: Vec<EigenvalueRow> = ev
                .iter()
                .map(|e| EigenvalueRow {
                    lambda: e.lambda,
                    branch: e.branch.to_string(),
                    parities: {
                        let mut p: Vec<Parity> = e.parities.clone();
                        p.sort_by_key(|&x| x == Parity::Odd);
                        p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
                    },
                })
                .collect();
            write_csv_rows(w, header, &["lambda", "branch", "parities"], &rows)
        }
        Format::Json => export::write_json(
            w,
            &EigenvaluesJson {
                alpha_sq,
                q1,
                eigenvalues: &ev,
                meta: header,
            },
        ),
    })
}

fn eigenfunction(o: &Opts, header: &Header, format: Format, stdout: &mut dyn Write) -> Result<()> {
    let alpha = positive(need(o.alpha_sq, "alpha-sq")?, "alpha-sq")?.sqrt();
    let q1 = non_negative(o.q1.unwrap_or(0.0), "q1")?;
    let label: CurveLabel = need(o.label.clone(), "label")?.parse()?;
    let points = o.points.unwrap_or(201);
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let tol = tolerance(o.tol.or(Some(1e-12)))?;
    let f = AngularEigenfunction::build(label, q1, alpha, tol)?;
    let states = f.tabulate(&eigenfun::theta_grid(points))?;
    emit(o.output.as_deref(), stdout, |w| match format {
        Format::Csv => export::write_eigen_csv(w, header, &f, &states),
        Format::Json => export::write_json(w, &export::eigen_to_json(header, &f, &states)),
    })
}

fn grid(o: &Opts, header: &Header, format: Format, stdout: &mut dyn Write) -> Result<()> {
    let alpha_sq = positive(need(o.alpha_sq, "alpha-sq")?, "alpha-sq")?;
    let f1 = positive(o.f1.unwrap_or(1.0), "f1")?;
    let cfg = SystemConfig::from_alpha_sq(f1, alpha_sq, 0.0)?;
    let lines = geometry::grid(&cfg, o.n_theta.unwrap_or(24), o.n_mu.unwrap_or(10), o.mu_max.unwrap_or(2.0))?;
    emit(o.output.as_deref(), stdout, |w| match format {
        Format::Csv => export::write_grid_csv(w, header, &lines),
        Format::Json => export::write_json(
            w,
            &export::GridJson {
                lines: lines.clone(),
                meta: header.clone(),
            },
        ),
    })
}

#[derive(Serialize)]
struct DiscriminantRow {
    lambda: f64,
    q1: f64,
    alpha_sq: f64,
    value: f64,
    route: String,
    verdict: StabilityVerdict,
}

fn discriminant_table(o: &Opts, header: &Header, format: Format, stdout: &mut dyn Write) -> Result<()> {
    let alpha_sq = positive(need(o.alpha_sq, "alpha-sq")?, "alpha-sq")?;
    let alpha = alpha_sq.sqrt();
    let q1 = non_negative(o.q1.unwrap_or(0.0), "q1")?;
    let lo = o.lambda_min.unwrap_or(-5.0);
    let hi = o.lambda_max.unwrap_or(25.0);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Usage("need finite --lambda-min < --lambda-max".into()));
    }
    let n = o.points.unwrap_or(301);
    if n < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let routes: &[Route] = match o.route.unwrap_or(RouteChoice::Monodromy) {
        RouteChoice::ClosedForm => &[Route::ClosedForm],
        RouteChoice::Monodromy => &[Route::Monodromy],
        RouteChoice::Both => &[Route::Monodromy, Route::ClosedForm],
    };
    let mut rows = Vec::with_capacity(n * routes.len());
    for i in 0..n {
        let lambda = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        for &route in routes {
            let s = discriminant::sample(lambda, q1, alpha, route, 1e-12)?;
            rows.push(DiscriminantRow {
                lambda,
                q1,
                alpha_sq,
                value: s.value,
                route: route.to_string(),
                verdict: spectrum::classify(lambda, q1, alpha, 1e-9)?,
            });
        }
    }
    emit(o.output.as_deref(), stdout, |w| match format {
        Format::Csv => write_csv_rows(w, header, &["lambda", "q1", "alpha_sq", "value", "route", "verdict"], &rows),
        Format::Json => export::write_json(w, &serde_json::json!({ "samples": rows, "meta": header })),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub property: String,
    pub passed: bool,
    pub measured: f64,
    pub limit: f64,
}

/// Quick versions of the library's invariants at the configured `α²`.
pub fn checks(alpha_sq: f64) -> Result<Vec<CheckResult>> {
    let alpha = positive(alpha_sq, "alpha-sq")?.sqrt();
    let mut out = Vec::new();
    let mut push = |property: &str, measured: f64, limit: f64| {
        out.push(CheckResult {
            property: property.to_string(),
            passed: measured < limit,
            measured,
            limit,
        })
    };

    let expect = [0.0, 0.25, 1.0, 2.25, 4.0, 6.25, 9.0, 12.25, 16.0];
    let ev = spectrum::eigenvalues_at(0.0, alpha, 16.5, 1e-10)?;
    let err = if ev.len() == expect.len() {
        ev.iter().zip(expect).map(|(e, x)| (e.lambda - x).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    push("zero_q_spectrum", err, 1e-8);

    let mut route_gap: f64 = 0.0;
    let mut swap_gap: f64 = 0.0;
    for i in 0..25 {
        let lambda = -5.0 + 1.2 * i as f64;
        let q1 = 0.4 * i as f64;
        let m = discriminant::discriminant_monodromy(lambda, q1, alpha, 1e-12)?;
        let c = discriminant::discriminant_closed_form(lambda, q1, alpha, 1e-12)?;
        let s = discriminant::discriminant_monodromy(lambda, alpha * alpha * q1, 1.0 / alpha, 1e-12)?;
        route_gap = route_gap.max((m - c).abs() / m.abs().max(1.0));
        swap_gap = swap_gap.max((m - s).abs() / m.abs().max(1.0));
    }
    push("closed_form_vs_monodromy", route_gap, 1e-9);
    push("half_exchange_symmetry", swap_gap, 1e-9);

    let p = two_elliptic::hill::propagate(3.0, 4.0, 0.0, std::f64::consts::PI, 1e-12)?;
    push("propagator_determinant", (p.det() - 1.0).abs(), 1e-9);

    let mut oracle_gap: f64 = 0.0;
    for label in CurveLabel::first(5) {
        let l = spectrum::solve_label(label, 2.0, 1.0, 1e-11)?;
        oracle_gap = oracle_gap.max((l - spectrum::mathieu_reference(label, 2.0)?).abs());
    }
    push("unit_alpha_vs_mathieu", oracle_gap, 1e-6);

    let mut seam: f64 = 0.0;
    let mut norm: f64 = 0.0;
    for label in CurveLabel::first(3) {
        let f = AngularEigenfunction::build(label, 2.0, alpha, 1e-12)?;
        seam = seam.max(f.seam_residual()?).max(f.bloch_residual()?);
        norm = norm.max((f.norm_sq()? - 1.0).abs());
    }
    push("eigenfunction_matching", seam, 1e-8);
    push("eigenfunction_norm", norm, 1e-7);

    let chart = spectrum::chart(alpha, 5.0, 5, 100, 1e-10, false)?;
    let jumps: usize = chart
        .curves
        .iter()
        .map(|c| spectrum::continuity_violations(&c.curve) + c.error.is_some() as usize)
        .sum();
    push("chart_continuity", jumps as f64, 0.5);
    Ok(out)
}

fn validate(o: &Opts, header: &Header, format: Format, stdout: &mut dyn Write) -> Result<()> {
    let results = checks(o.alpha_sq.unwrap_or(0.25))?;
    emit(o.output.as_deref(), stdout, |w| match format {
        Format::Csv => write_csv_rows(w, header, &["property", "passed", "measured", "limit"], &results),
        Format::Json => export::write_json(w, &serde_json::json!({ "checks": results, "meta": header })),
    })?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.property.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("failed checks: {}", failed.join(", "))))
    }
}
