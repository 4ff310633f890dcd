//! Characteristic values `λ(q1)` on which `D = ±1`, and stability charts.
//!
//! The two-elliptic angular problem is symmetric under `θ ↦ -θ`, so every
//! periodic (`D = +1`) or antiperiodic (`D = -1`) eigenfunction can be taken
//! even or odd about `θ = 0`. Restricted to `[0, π]` each of the four
//! (branch, parity) classes is a regular Sturm-Liouville problem with
//! Neumann/Dirichlet ends, whose eigenvalues are simple and strictly ordered.
//! The Prüfer angles shot from both ends and compared at the seam `π/2` (where
//! the potential wells sit for `q1 > 0`) differ by an increasing function of
//! `λ`, and its `k`-th crossing of `kπ` marks the `k`-th eigenvalue of the
//! class. This gives every curve an unambiguous label and a bracket that
//! cannot fail, including at `q1 = 0` where `D ∓ 1` only touches zero.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discriminant::{self, check_params, LEFT_CENTER, RIGHT_CENTER, SEAM};
use crate::error::{check_tol, Error, Result};
use crate::hill::{self, State2};
use crate::oracle::{self, MathieuKind};
use crate::roots::brent;

/// Default root tolerance for characteristic values.
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;
/// Default number of q-steps of a chart.
pub const DEFAULT_Q_STEPS: usize = 200;
/// Floor of the continuity budget `|Δλ| ≤ max(5 |slope| Δq, 0.05)`.
pub const CONTINUITY_FLOOR: f64 = 0.05;
const MAX_HALVINGS: u32 = 16;
const MAX_EXPANSIONS: u32 = 8;

/// `D = +1` (periodic, integer exponent) or `D = -1` (antiperiodic,
/// half-integer exponent).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    /// The Bloch multiplier `β = e^{2πiK}`.
    pub fn beta(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

impl FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Branch::Plus),
            "-" | "minus" => Ok(Branch::Minus),
            other => Err(Error::Parse(format!("unknown branch `{other}`"))),
        }
    }
}

/// Symmetry about `θ = 0`: cosine-like or sine-like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" | "ce" | "cos" => Ok(Parity::Even),
            "odd" | "se" | "sin" => Ok(Parity::Odd),
            other => Err(Error::Parse(format!("unknown parity `{other}`"))),
        }
    }
}

/// Curve label: half-integer index `n` plus parity. The branch follows from
/// `n` (integer → `+`, half-integer → `-`), and the curve starts at `λ = n²`
/// when `q1 = 0`. `n = 0` exists only as an even curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveLabel {
    twice_index: u32,
    parity: Parity,
}

impl CurveLabel {
    pub fn new(twice_index: u32, parity: Parity) -> Result<Self> {
        if twice_index == 0 && parity == Parity::Odd {
            return Err(Error::InvalidParameter {
                name: "label",
                reason: "there is no odd curve with n = 0".into(),
            });
        }
        Ok(Self { twice_index, parity })
    }

    /// Label from `n` given as a float (`0, 0.5, 1, …`).
    pub fn from_index(n: f64, parity: Parity) -> Result<Self> {
        let twice = 2.0 * n;
        if !(twice >= 0.0 && twice.fract() == 0.0 && twice < u32::MAX as f64) {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("must be a non-negative multiple of 1/2, got {n}"),
            });
        }
        Self::new(twice as u32, parity)
    }

    pub fn twice_index(&self) -> u32 {
        self.twice_index
    }

    pub fn index(&self) -> f64 {
        self.twice_index as f64 / 2.0
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn branch(&self) -> Branch {
        if self.twice_index.is_multiple_of(2) {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }

    /// `λ` at `q1 = 0`.
    pub fn start_lambda(&self) -> f64 {
        let n = self.index();
        n * n
    }

    /// `n` as a reduced fraction `(numerator, denominator)`.
    pub fn fraction(&self) -> (u32, u32) {
        if self.twice_index.is_multiple_of(2) {
            (self.twice_index / 2, 1)
        } else {
            (self.twice_index, 2)
        }
    }

    /// `(Φ, Φ')` at `θ = π` and its Prüfer angle in `(0, π]`. Periodic
    /// functions keep their parity about `π`, antiperiodic ones swap it.
    fn end_condition(&self) -> (State2, f64) {
        let even_at_pi = (self.parity == Parity::Even) == (self.branch() == Branch::Plus);
        if even_at_pi {
            (State2::new(1.0, 0.0, LEFT_CENTER), FRAC_PI_2)
        } else {
            (State2::new(0.0, -1.0, LEFT_CENTER), PI)
        }
    }

    /// Position of this curve within its (branch, parity) class, counted
    /// from 0 upwards.
    fn class_index(&self) -> u32 {
        match (self.branch(), self.parity) {
            (Branch::Plus, Parity::Even) => self.twice_index / 2,
            (Branch::Plus, Parity::Odd) => self.twice_index / 2 - 1,
            (Branch::Minus, _) => self.twice_index / 2,
        }
    }

    fn from_class_index(branch: Branch, parity: Parity, k: u32) -> Self {
        let twice_index = match (branch, parity) {
            (Branch::Plus, Parity::Even) => 2 * k,
            (Branch::Plus, Parity::Odd) => 2 * k + 2,
            (Branch::Minus, _) => 2 * k + 1,
        };
        Self { twice_index, parity }
    }

    /// The curves whose indices are the first `count` values `0, 1/2, 1, …`,
    /// even member before odd.
    pub fn first(count: usize) -> Vec<CurveLabel> {
        let mut out = Vec::new();
        for twice in 0..count as u32 {
            out.push(CurveLabel {
                twice_index: twice,
                parity: Parity::Even,
            });
            if twice > 0 {
                out.push(CurveLabel {
                    twice_index: twice,
                    parity: Parity::Odd,
                });
            }
        }
        out
    }
}

impl fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fraction() {
            (n, 1) => write!(f, "{n}:{}", self.parity),
            (n, d) => write!(f, "{n}/{d}:{}", self.parity),
        }
    }
}

impl FromStr for CurveLabel {
    type Err = Error;
    /// `"3/2:odd"`, `"2:even"`, `"1.5:odd"`; parity defaults to even.
    fn from_str(s: &str) -> Result<Self> {
        let (n, parity) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), p.trim().parse()?),
            None => (s.trim(), Parity::Even),
        };
        let value = match n.split_once('/') {
            Some((num, den)) => {
                let num: u32 = num.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
                let den: u32 = den.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
                match den {
                    1 => num as f64,
                    2 => num as f64 / 2.0,
                    _ => return Err(Error::Parse(format!("denominator must be 1 or 2 in `{s}`"))),
                }
            }
            None => n.parse::<f64>().map_err(|_| Error::Parse(format!("bad index in `{s}`")))?,
        };
        CurveLabel::from_index(value, parity)
    }
}

/// A characteristic curve traced over a q-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicCurve {
    pub label: CurveLabel,
    pub alpha: f64,
    /// `(q1, λ)` pairs, strictly increasing in `q1`.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityVerdict {
    Stable,
    Unstable,
    Boundary,
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabilityVerdict::Stable => "stable",
            StabilityVerdict::Unstable => "unstable",
            StabilityVerdict::Boundary => "boundary",
        })
    }
}

/// A root of `D(λ) = ±1`. `parities` lists the eigenfunction classes it
/// carries; two entries mean the root is (numerically) double.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub branch: Branch,
    pub parities: Vec<Parity>,
}

/// Local error tolerance used by the integrator for a given root tolerance.
pub fn ode_tol(root_tol: f64) -> f64 {
    (root_tol * 1e-2).clamp(1e-13, 1e-10)
}

/// Prüfer mismatch at the seam for the class of `label`: the angle
/// `atan2(Φ, Φ')` carried from `θ = 0` (even: `(1, 0)`, odd: `(0, 1)`)
/// forward to `π/2`, minus the angle carried from `θ = π` backward to `π/2`.
/// It increases with `λ` and equals `kπ` on the `k`-th curve of the class.
pub fn seam_mismatch(lambda: f64, q1: f64, alpha: f64, label: CurveLabel, ode_tol: f64) -> Result<f64> {
    let q2 = alpha * alpha * q1;
    let (start, phase0) = match label.parity {
        Parity::Even => (State2::new(1.0, 0.0, RIGHT_CENTER), FRAC_PI_2),
        Parity::Odd => (State2::new(0.0, 1.0, RIGHT_CENTER), 0.0),
    };
    let (_, forward) = hill::transport_with_phase(lambda, q2, start, phase0, SEAM, ode_tol)?;
    let (end, end_phase) = label.end_condition();
    let (_, backward) = hill::transport_with_phase(lambda, q1, end, end_phase, SEAM, ode_tol)?;
    Ok(forward - backward)
}

/// Strict lower bound for every characteristic value: `min V = -2 max(q1, q2)`.
fn lambda_floor(q1: f64, alpha: f64) -> f64 {
    -2.0 * q1 * alpha.max(1.0).powi(2) - 1.0
}

/// Strict upper bound for the curve `label`: `n² + max V`.
fn lambda_ceiling(label: &CurveLabel, q1: f64, alpha: f64) -> f64 {
    label.start_lambda() + 2.0 * q1 * alpha.max(1.0).powi(2) + 1.0
}

struct Counter {
    label: CurveLabel,
    q1: f64,
    alpha: f64,
    ode_tol: f64,
}

impl Counter {
    fn eval(&self, lambda: f64) -> Result<f64> {
        Ok(seam_mismatch(lambda, self.q1, self.alpha, self.label, self.ode_tol)? - self.label.class_index() as f64 * PI)
    }
}

/// Characteristic value of `label` at `q1`, located anywhere between the
/// global bounds.
pub fn solve_label(label: CurveLabel, q1: f64, alpha: f64, tol: f64) -> Result<f64> {
    check_params(q1, alpha)?;
    check_tol(tol)?;
    let counter = Counter {
        label,
        q1,
        alpha,
        ode_tol: ode_tol(tol),
    };
    let lo = lambda_floor(q1, alpha);
    let mut hi = lambda_ceiling(&label, q1, alpha);
    let flo = counter.eval(lo)?;
    let mut fhi = counter.eval(hi)?;
    let mut guard = 0;
    while fhi <= 0.0 {
        hi = 2.0 * hi.abs() + 1.0;
        fhi = counter.eval(hi)?;
        guard += 1;
        if guard > 40 {
            return Err(Error::Bracket(format!("no upper bound for {label}")));
        }
    }
    brent(|l| counter.eval(l), lo, hi, flo, fhi, tol)
}

/// All roots of `D(λ) = ±1` in `[λ_floor, lambda_max]`, sorted; roots of the
/// same branch closer than `10·tol` are merged into one double root.
pub fn eigenvalues_at(q1: f64, alpha: f64, lambda_max: f64, tol: f64) -> Result<Vec<Eigenvalue>> {
    check_params(q1, alpha)?;
    check_tol(tol)?;
    if !(lambda_max.is_finite() && lambda_max > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda_max",
            reason: format!("must be positive, got {lambda_max}"),
        });
    }
    let otol = ode_tol(tol);
    let lo = lambda_floor(q1, alpha);
    let mut found: Vec<(f64, CurveLabel)> = Vec::new();
    for branch in [Branch::Plus, Branch::Minus] {
        for parity in [Parity::Even, Parity::Odd] {
            let probe = CurveLabel::from_class_index(branch, parity, 0);
            let top = seam_mismatch(lambda_max, q1, alpha, probe, otol)?;
            // Curves k = 0, 1, … with kπ strictly below the mismatch at lambda_max.
            let count = ((top / PI) - 1e-12).ceil().max(0.0) as u32;
            for k in 0..count {
                let label = CurveLabel::from_class_index(branch, parity, k);
                let counter = Counter {
                    label,
                    q1,
                    alpha,
                    ode_tol: otol,
                };
                let flo = counter.eval(lo)?;
                let fhi = top - k as f64 * PI;
                let lambda = brent(|l| counter.eval(l), lo, lambda_max, flo, fhi, tol)?;
                found.push((lambda, label));
            }
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut out: Vec<Eigenvalue> = Vec::new();
    for (lambda, label) in found {
        if let Some(last) = out.iter_mut().rev().find(|e| e.branch == label.branch()) {
            if (last.lambda - lambda).abs() <= 10.0 * tol * lambda.abs().max(1.0)
                && !last.parities.contains(&label.parity)
            {
                last.parities.push(label.parity);
                continue;
            }
        }
        out.push(Eigenvalue {
            lambda,
            branch: label.branch(),
            parities: vec![label.parity],
        });
    }
    Ok(out)
}

/// `|Δλ|` allowed between consecutive curve points.
pub fn continuity_budget(slope: f64, dq: f64) -> f64 {
    (5.0 * slope.abs() * dq).max(CONTINUITY_FLOOR)
}

/// Number of adjacent point pairs violating the continuity budget, with the
/// slope taken from the preceding interval (zero for the first one).
pub fn continuity_violations(curve: &CharacteristicCurve) -> usize {
    let mut slope = 0.0;
    let mut count = 0;
    for w in curve.points.windows(2) {
        let dq = w[1].0 - w[0].0;
        let dl = w[1].1 - w[0].1;
        if dl.abs() > continuity_budget(slope, dq) {
            count += 1;
        }
        slope = dl / dq;
    }
    count
}

fn validate_grid(q_grid: &[f64]) -> Result<()> {
    if q_grid.first() != Some(&0.0) {
        return Err(Error::InvalidParameter {
            name: "q_grid",
            reason: "must start at 0".into(),
        });
    }
    if q_grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) || !w[1].is_finite()) {
        return Err(Error::InvalidParameter {
            name: "q_grid",
            reason: "must be strictly increasing and finite".into(),
        });
    }
    Ok(())
}

/// Continuation of one curve. On failure the partial curve is returned with
/// the error.
pub fn trace_partial(
    label: CurveLabel,
    alpha: f64,
    q_grid: &[f64],
    tol: f64,
) -> (CharacteristicCurve, Option<Error>) {
    let mut curve = CharacteristicCurve {
        label,
        alpha,
        points: Vec::new(),
    };
    if let Err(e) = check_params(0.0, alpha).and_then(|_| check_tol(tol)).and_then(|_| validate_grid(q_grid)) {
        return (curve, Some(e));
    }
    let otol = ode_tol(tol);
    curve.points.push((0.0, label.start_lambda()));
    let mut slope = 0.0;
    let mut step_hint = f64::INFINITY;

    for &q_target in &q_grid[1..] {
        let mut halvings = 0;
        loop {
            let (q, lambda) = *curve.points.last().expect("non-empty");
            if q >= q_target {
                break;
            }
            let dq = (q_target - q).min(step_hint);
            let q_new = if dq >= q_target - q { q_target } else { q + dq };
            let dq = q_new - q;
            match continue_step(label, alpha, lambda, slope, q_new, dq, tol, otol) {
                Ok(Some(l_new)) => {
                    curve.points.push((q_new, l_new));
                    slope = (l_new - lambda) / dq;
                    // Let the step grow back after a successful refinement.
                    step_hint = 2.0 * dq;
                    halvings = 0;
                }
                Ok(None) => {
                    halvings += 1;
                    step_hint = 0.5 * dq;
                }
                Err(e) => {
                    if matches!(e, Error::Bracket(_)) {
                        halvings += 1;
                        step_hint = 0.5 * dq;
                    } else {
                        return (curve, Some(e));
                    }
                }
            }
            if halvings > MAX_HALVINGS {
                let (q, lambda) = *curve.points.last().expect("non-empty");
                return (
                    curve,
                    Some(Error::CurveLost {
                        label: label.to_string(),
                        q1: q,
                        lambda,
                    }),
                );
            }
        }
    }
    (curve, None)
}

/// Predict, bracket and refine one continuation step. `Ok(None)` asks the
/// caller to shorten the step (continuity budget exceeded).
#[allow(clippy::too_many_arguments)]
fn continue_step(
    label: CurveLabel,
    alpha: f64,
    lambda: f64,
    slope: f64,
    q_new: f64,
    dq: f64,
    tol: f64,
    otol: f64,
) -> Result<Option<f64>> {
    let counter = Counter {
        label,
        q1: q_new,
        alpha,
        ode_tol: otol,
    };
    let floor = lambda_floor(q_new, alpha);
    let ceiling = lambda_ceiling(&label, q_new, alpha);
    let pred = (lambda + slope * dq).clamp(floor, ceiling);
    let mut width = (2.0 * slope.abs() * dq).max(0.5 * CONTINUITY_FLOOR).max(10.0 * tol);
    let mut bracket = None;
    for _ in 0..MAX_EXPANSIONS {
        let lo = (pred - width).max(floor);
        let hi = (pred + width).min(ceiling);
        let flo = counter.eval(lo)?;
        let fhi = counter.eval(hi)?;
        if flo <= 0.0 && fhi >= 0.0 {
            bracket = Some((lo, hi, flo, fhi));
            break;
        }
        width *= 2.0;
    }
    let Some((lo, hi, flo, fhi)) = bracket else {
        return Err(Error::Bracket(format!("{label} near lambda = {pred} at q1 = {q_new}")));
    };
    let l_new = brent(|l| counter.eval(l), lo, hi, flo, fhi, tol)?;
    if (l_new - lambda).abs() > continuity_budget(slope, dq) {
        return Ok(None);
    }
    Ok(Some(l_new))
}

/// Trace `label` from `λ = n²` at `q1 = 0` across `q_grid`.
pub fn trace_curve(label: CurveLabel, alpha: f64, q_grid: &[f64], tol: f64) -> Result<CharacteristicCurve> {
    match trace_partial(label, alpha, q_grid, tol) {
        (curve, None) => Ok(curve),
        (_, Some(e)) => Err(e),
    }
}

/// Stable / unstable / boundary classification. `D` is evaluated over the
/// half turn `0 → π`, which stays accurate where the full-loop trace cancels.
pub fn classify(lambda: f64, q1: f64, alpha: f64, tol: f64) -> Result<StabilityVerdict> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be non-negative, got {tol}"),
        });
    }
    let d = discriminant::discriminant_half_turn(lambda, q1, alpha, hill::DEFAULT_TOL)?;
    Ok(if d.abs() < 1.0 - tol {
        StabilityVerdict::Stable
    } else if d.abs() > 1.0 + tol {
        StabilityVerdict::Unstable
    } else {
        StabilityVerdict::Boundary
    })
}

/// One traced curve of a chart; `error` is set when the curve was lost and
/// `curve` then holds the points up to the last good one.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCurve {
    pub curve: CharacteristicCurve,
    pub error: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub alpha: f64,
    pub q_grid: Vec<f64>,
    pub curves: Vec<ChartCurve>,
    /// Classical Mathieu curves (`α = 1`) from the recurrence oracle.
    pub overlay: Option<Vec<CharacteristicCurve>>,
}

/// `steps + 1` equally spaced values over `[0, q_max]`.
pub fn uniform_grid(q_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| q_max * i as f64 / steps as f64).collect()
}

/// Trace the first `n_curves` indices `0, 1/2, 1, …` (both parities for
/// `n > 0`) over `[0, q_max]`. Curves are traced in parallel; the result is
/// ordered by label.
pub fn chart(alpha: f64, q_max: f64, n_curves: usize, q_steps: usize, tol: f64, overlay: bool) -> Result<Chart> {
    check_params(0.0, alpha)?;
    check_tol(tol)?;
    if n_curves < 1 || q_steps < 1 || !(q_max.is_finite() && q_max > 0.0) {
        return Err(Error::InvalidParameter {
            name: "chart",
            reason: "need n_curves ≥ 1, q_steps ≥ 1 and q_max > 0".into(),
        });
    }
    let q_grid = uniform_grid(q_max, q_steps);
    let labels = CurveLabel::first(n_curves);
    let curves = labels
        .par_iter()
        .map(|&label| {
            let (curve, error) = trace_partial(label, alpha, &q_grid, tol);
            ChartCurve { curve, error }
        })
        .collect();
    let overlay = if overlay {
        Some(mathieu_overlay(&labels, &q_grid)?)
    } else {
        None
    };
    Ok(Chart {
        alpha,
        q_grid,
        curves,
        overlay,
    })
}

/// Classical `a_n(q)` (even) and `b_n(q)` (odd) curves for the integer
/// labels among `labels`.
pub fn mathieu_overlay(labels: &[CurveLabel], q_grid: &[f64]) -> Result<Vec<CharacteristicCurve>> {
    labels
        .iter()
        .filter(|l| l.branch() == Branch::Plus)
        .map(|&label| {
            let n = label.twice_index() / 2;
            let kind = match label.parity() {
                Parity::Even => MathieuKind::A,
                Parity::Odd => MathieuKind::B,
            };
            let points = q_grid
                .iter()
                .map(|&q| {
                    let v = oracle::char_value(n, kind, q, oracle::default_truncation(n, q))?;
                    Ok((q, v.value))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CharacteristicCurve {
                label,
                alpha: 1.0,
                points,
            })
        })
        .collect()
}

/// Oracle value for `label` at `α = 1`.
pub fn mathieu_reference(label: CurveLabel, q: f64) -> Result<f64> {
    let (order, kind) = match (label.branch(), label.parity()) {
        (Branch::Plus, Parity::Even) => (label.twice_index() / 2, MathieuKind::A),
        (Branch::Plus, Parity::Odd) => (label.twice_index() / 2, MathieuKind::B),
        (Branch::Minus, _) => ((label.twice_index() - 1) / 2, MathieuKind::HalfInteger),
    };
    Ok(oracle::char_value(order, kind, q, oracle::default_truncation(order, q))?.value)
}
