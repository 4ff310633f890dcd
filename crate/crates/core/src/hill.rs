//! Transport of solutions of the angular equation
//! `Φ'' + (λ - 2q cos 2θ) Φ = 0` within one region of constant `q`.
//!
//! A [`Propagator`] maps the state `(Φ, Φ')` at `interval.0` to the state at
//! `interval.1`. Because the equation has no first-derivative term the
//! propagator is unimodular, which the tests exploit heavily.

use serde::{Deserialize, Serialize};

use crate::error::{check_tol, Error, Result};
use crate::ode::{OdeOptions, Stepper};

/// Default local error tolerance for angular propagation.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A solution value and its derivative at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State2 {
    pub value: f64,
    pub slope: f64,
    pub at: f64,
}

impl State2 {
    pub fn new(value: f64, slope: f64, at: f64) -> Self {
        Self { value, slope, at }
    }

    /// Prüfer angle `atan2(value, slope)`.
    pub fn phase(&self) -> f64 {
        self.value.atan2(self.slope)
    }
}

/// Fundamental-matrix transport across `[interval.0, interval.1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    /// Column 0 is the image of `(1, 0)`, column 1 of `(0, 1)`.
    pub entries: [[f64; 2]; 2],
    pub interval: (f64, f64),
    pub lambda: f64,
    pub q: f64,
}

impl Propagator {
    pub fn identity(lambda: f64, q: f64, at: f64) -> Self {
        Self {
            entries: [[1.0, 0.0], [0.0, 1.0]],
            interval: (at, at),
            lambda,
            q,
        }
    }

    pub fn det(&self) -> f64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// `next ∘ self`: first `self`, then `next`. Parameters of the result are
    /// those of `next`; callers composing across regions only use the entries.
    pub fn then(&self, next: &Propagator) -> Propagator {
        Propagator {
            entries: mat_mul(&next.entries, &self.entries),
            interval: (self.interval.0, next.interval.1),
            lambda: next.lambda,
            q: next.q,
        }
    }
}

pub(crate) fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn options(lambda: f64, q: f64, tol: f64) -> OdeOptions {
    // Bound the step by the local oscillation length so the phase tracking
    // in `transport_with_phase` never skips a half turn.
    let omega = (lambda.abs() + 2.0 * q.abs()).max(1.0).sqrt();
    OdeOptions::new(tol).with_max_step((0.1f64).min(1.0 / omega))
}

fn check_inputs(lambda: f64, q: f64, from: f64, to: f64, tol: f64) -> Result<()> {
    check_tol(tol)?;
    for (name, v) in [("lambda", lambda), ("q", q), ("from", from), ("to", to)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must be finite, got {v}"),
            });
        }
    }
    Ok(())
}

/// Propagator of the angular equation with parameters `(lambda, q)` from
/// `from` to `to`.
pub fn propagate(lambda: f64, q: f64, from: f64, to: f64, tol: f64) -> Result<Propagator> {
    check_inputs(lambda, q, from, to, tol)?;
    let rhs = move |t: f64, y: &[f64; 4]| {
        let w = lambda - 2.0 * q * (2.0 * t).cos();
        [y[1], -w * y[0], y[3], -w * y[2]]
    };
    let y = Stepper::new(rhs, from, [1.0, 0.0, 0.0, 1.0], options(lambda, q, tol))
        .advance_to(to, |_, _| {})?;
    Ok(Propagator {
        entries: [[y[0], y[2]], [y[1], y[3]]],
        interval: (from, to),
        lambda,
        q,
    })
}

/// Transport `s` across `p`.
pub fn apply(p: &Propagator, s: State2) -> Result<State2> {
    let (start, end) = p.interval;
    if (s.at - start).abs() > 1e-12 * (1.0 + start.abs()) {
        return Err(Error::StateMismatch {
            expected: start,
            got: s.at,
        });
    }
    let m = &p.entries;
    Ok(State2 {
        value: m[0][0] * s.value + m[0][1] * s.slope,
        slope: m[1][0] * s.value + m[1][1] * s.slope,
        at: end,
    })
}

/// The initial-value fundamental pair based at `base`, evaluated at `eval_at`:
/// `c` starts from `(1, 0)` and `s` from `(0, 1)`.
pub fn fundamental_pair(
    lambda: f64,
    q: f64,
    base: f64,
    eval_at: f64,
    tol: f64,
) -> Result<(State2, State2)> {
    let p = propagate(lambda, q, base, eval_at, tol)?;
    let m = p.entries;
    Ok((
        State2::new(m[0][0], m[1][0], eval_at),
        State2::new(m[0][1], m[1][1], eval_at),
    ))
}

/// `c·s' - c'·s` for a pair evaluated at the same point.
pub fn wronskian(c: &State2, s: &State2) -> f64 {
    c.value * s.slope - c.slope * s.value
}

/// Transport a single state to each of `points`, which must be monotone
/// (all on one side of `start.at`, ordered away from it).
pub fn transport_to_points(
    lambda: f64,
    q: f64,
    start: State2,
    points: &[f64],
    tol: f64,
) -> Result<Vec<State2>> {
    check_inputs(lambda, q, start.at, start.at, tol)?;
    let rhs = move |t: f64, y: &[f64; 2]| [y[1], -(lambda - 2.0 * q * (2.0 * t).cos()) * y[0]];
    let mut st = Stepper::new(rhs, start.at, [start.value, start.slope], options(lambda, q, tol));
    let mut out = Vec::with_capacity(points.len());
    let mut prev = start.at;
    let mut dir = 0.0;
    for &p in points {
        let d = (p - prev).signum();
        if d != 0.0 {
            if dir != 0.0 && d != dir {
                return Err(Error::InvalidParameter {
                    name: "points",
                    reason: "must be ordered away from the start point".into(),
                });
            }
            dir = d;
        }
        let y = st.advance_to(p, |_, _| {})?;
        out.push(State2::new(y[0], y[1], p));
        prev = p;
    }
    Ok(out)
}

/// Transport `start` to `to` while tracking the continuous Prüfer angle
/// `atan2(Φ, Φ')`, starting from `start_phase` (which must be congruent to
/// `start.phase()` modulo 2π).
pub fn transport_with_phase(
    lambda: f64,
    q: f64,
    start: State2,
    start_phase: f64,
    to: f64,
    tol: f64,
) -> Result<(State2, f64)> {
    check_inputs(lambda, q, start.at, to, tol)?;
    let rhs = move |t: f64, y: &[f64; 2]| [y[1], -(lambda - 2.0 * q * (2.0 * t).cos()) * y[0]];
    let mut st = Stepper::new(rhs, start.at, [start.value, start.slope], options(lambda, q, tol));
    let mut phase = start_phase;
    let mut last = start.phase();
    let y = st.advance_to(to, |_, y| {
        let a = y[0].atan2(y[1]);
        let mut d = a - last;
        if d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        } else if d <= -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        phase += d;
        last = a;
    })?;
    Ok((State2::new(y[0], y[1], to), phase))
}
