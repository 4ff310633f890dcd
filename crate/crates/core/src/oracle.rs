//! Classical Mathieu characteristic values and functions from the
//! Fourier-coefficient recurrences.
//!
//! Everything here is matrix algebra on truncated symmetric tridiagonal
//! matrices; nothing touches the ODE integrator, so it serves as an
//! independent reference for the `α = 1` limit of the two-elliptic problem.
//!
//! Functions are normalized to unit L² norm on `[0, 2π]` and signed so that
//! the Fourier coefficient of the harmonic matching the order (`cos nθ` or
//! `sin nθ`) is positive.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum change allowed when the truncation is doubled.
pub const CONVERGENCE_TOL: f64 = 1e-10;

/// Recurrence family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MathieuKind {
    /// `a_n(q)`: even solutions `ce_n`.
    A,
    /// `b_n(q)`: odd solutions `se_n`, `n ≥ 1`.
    B,
    /// Characteristic exponent `ν = 1/2` (mod 1): solutions that change sign
    /// over `2π`. `order = m` selects the value that tends to `(m + 1/2)²`
    /// as `q → 0`. The even and odd members share these values.
    HalfInteger,
}

impl fmt::Display for MathieuKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MathieuKind::A => "a",
            MathieuKind::B => "b",
            MathieuKind::HalfInteger => "half",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MathieuCharValue {
    pub order: u32,
    pub kind: MathieuKind,
    pub q: f64,
    pub value: f64,
    pub truncation: usize,
}

/// Symmetric tridiagonal matrix `(diag, off)` with `off.len() == diag.len() - 1`.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (`k = 0` is the smallest), by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let n = self.diag.len();
        assert!(k < n, "eigenvalue index {k} out of range for size {n}");
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        lo -= 1.0;
        hi += 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.diag.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i + 1 == j {
                self.off[i]
            } else if j + 1 == i {
                self.off[j]
            } else {
                0.0
            }
        })
    }
}

/// How a recurrence class maps matrix rows to Fourier harmonics.
struct Class {
    matrix: Tridiagonal,
    /// Harmonic multiplying row `i` (possibly half-integer).
    harmonics: Vec<f64>,
    /// Row `i` multiplies `coef[i] * trig(harmonics[i] θ)`.
    weights: Vec<f64>,
    sine: bool,
    ordinal: usize,
    /// Row whose harmonic equals the order.
    lead_row: usize,
}

fn class_for(order: u32, kind: MathieuKind, q: f64, size: usize) -> Result<Class> {
    let n = order as usize;
    let sq2 = std::f64::consts::SQRT_2;
    let off = vec![q; size - 1];
    let class = match kind {
        MathieuKind::A if n.is_multiple_of(2) => {
            let mut off = off;
            off[0] = sq2 * q;
            let mut weights = vec![1.0; size];
            weights[0] = 1.0 / sq2;
            Class {
                matrix: Tridiagonal {
                    diag: (0..size).map(|j| (2.0 * j as f64).powi(2)).collect(),
                    off,
                },
                harmonics: (0..size).map(|j| 2.0 * j as f64).collect(),
                weights,
                sine: false,
                ordinal: n / 2,
                lead_row: n / 2,
            }
        }
        MathieuKind::A | MathieuKind::B if n % 2 == 1 => {
            let sign = if kind == MathieuKind::A { 1.0 } else { -1.0 };
            let mut diag: Vec<f64> = (0..size).map(|j| (2.0 * j as f64 + 1.0).powi(2)).collect();
            diag[0] += sign * q;
            Class {
                matrix: Tridiagonal { diag, off },
                harmonics: (0..size).map(|j| 2.0 * j as f64 + 1.0).collect(),
                weights: vec![1.0; size],
                sine: kind == MathieuKind::B,
                ordinal: (n - 1) / 2,
                lead_row: (n - 1) / 2,
            }
        }
        MathieuKind::B => {
            if n == 0 {
                return Err(Error::InvalidParameter {
                    name: "order",
                    reason: "b_0 does not exist".into(),
                });
            }
            Class {
                matrix: Tridiagonal {
                    diag: (0..size).map(|j| (2.0 * j as f64 + 2.0).powi(2)).collect(),
                    off,
                },
                harmonics: (0..size).map(|j| 2.0 * j as f64 + 2.0).collect(),
                weights: vec![1.0; size],
                sine: true,
                ordinal: n / 2 - 1,
                lead_row: n / 2 - 1,
            }
        }
        MathieuKind::HalfInteger => {
            // Bi-infinite chain ν + 2j with ν = 1/2, j = -half..=half.
            let half = size / 2;
            let len = 2 * half + 1;
            let harmonics: Vec<f64> = (0..len).map(|i| 0.5 + 2.0 * (i as f64 - half as f64)).collect();
            let lead = (n as f64) + 0.5;
            let lead_row = harmonics
                .iter()
                .position(|h| (h.abs() - lead).abs() < 1e-12)
                .expect("truncation covers the order");
            Class {
                matrix: Tridiagonal {
                    diag: harmonics.iter().map(|h| h * h).collect(),
                    off: vec![q; len - 1],
                },
                harmonics,
                weights: vec![1.0; len],
                sine: false,
                ordinal: n,
                lead_row,
            }
        }
        MathieuKind::A => unreachable!(),
    };
    Ok(class)
}

fn check_args(order: u32, q: f64, truncation: usize) -> Result<()> {
    if truncation < order as usize + 20 {
        return Err(Error::InvalidParameter {
            name: "truncation",
            reason: format!("must be at least order + 20 = {}", order + 20),
        });
    }
    if !q.is_finite() {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: "must be finite".into(),
        });
    }
    Ok(())
}

fn value_at(order: u32, kind: MathieuKind, q: f64, size: usize) -> Result<f64> {
    let c = class_for(order, kind, q, size)?;
    Ok(c.matrix.eigenvalue(c.ordinal))
}

/// Characteristic value of the requested family, checked against a doubled
/// truncation.
pub fn char_value(order: u32, kind: MathieuKind, q: f64, truncation: usize) -> Result<MathieuCharValue> {
    check_args(order, q, truncation)?;
    let value = value_at(order, kind, q, truncation)?;
    let check = value_at(order, kind, q, 2 * truncation)?;
    let change = (value - check).abs();
    if change > CONVERGENCE_TOL {
        return Err(Error::Convergence(change));
    }
    Ok(MathieuCharValue {
        order,
        kind,
        q,
        value,
        truncation,
    })
}

/// Truncation large enough for `q` up to a few hundred.
pub fn default_truncation(order: u32, q: f64) -> usize {
    (order as usize + 20).max(24 + (2.0 * q.abs().sqrt()) as usize)
}

/// Fourier-series representation of a classical Mathieu function.
#[derive(Debug, Clone)]
pub struct MathieuSeries {
    pub value: MathieuCharValue,
    harmonics: Vec<f64>,
    coeffs: Vec<f64>,
    sine: bool,
}

impl MathieuSeries {
    pub fn new(order: u32, kind: MathieuKind, q: f64, truncation: usize) -> Result<Self> {
        if kind == MathieuKind::HalfInteger {
            return Err(Error::InvalidParameter {
                name: "kind",
                reason: "series evaluation is provided for integer orders only".into(),
            });
        }
        let value = char_value(order, kind, q, truncation)?;
        let c = class_for(order, kind, q, truncation)?;
        let eig = SymmetricEigen::new(c.matrix.dense());
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - value.value).abs().total_cmp(&(b.1 - value.value).abs()))
            .expect("non-empty matrix");
        let v = eig.eigenvectors.column(idx);
        let sign = if v[c.lead_row] < 0.0 { -1.0 } else { 1.0 };
        let norm = std::f64::consts::PI.sqrt() * v.norm();
        let coeffs = (0..v.len()).map(|i| sign * v[i] * c.weights[i] / norm).collect();
        Ok(Self {
            value,
            harmonics: c.harmonics,
            coeffs,
            sine: c.sine,
        })
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.terms(theta).0
    }

    pub fn eval_derivative(&self, theta: f64) -> f64 {
        self.terms(theta).1
    }

    fn terms(&self, theta: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for (h, c) in self.harmonics.iter().zip(&self.coeffs) {
            let (s, co) = (h * theta).sin_cos();
            if self.sine {
                v += c * s;
                d += c * h * co;
            } else {
                v += c * co;
                d -= c * h * s;
            }
        }
        (v, d)
    }
}

/// `ce_n(θ, q)` (kind `A`) or `se_n(θ, q)` (kind `B`), unit norm on `[0, 2π]`.
pub fn eval_ce_se(order: u32, kind: MathieuKind, q: f64, theta: f64, truncation: usize) -> Result<f64> {
    Ok(MathieuSeries::new(order, kind, q, truncation)?.eval(theta))
}
