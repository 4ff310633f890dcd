//! Bloch discriminant `D(λ, q1, α) = cos 2πK` of the piecewise angular
//! equation over one full turn.
//!
//! Two routes are provided. The monodromy route multiplies the right-patch
//! propagator (`-π/2 → π/2`, parameter `q2 = α² q1`) by the left-patch
//! propagator (`π/2 → 3π/2`, parameter `q1`) and takes half the trace. The
//! closed-form route evaluates the expanded 4×4 determinant `F` from the
//! fundamental pairs of each patch and divides by `2·W(q1)·W(q2)`. The two
//! routes share no intermediate values.
//!
//! Fundamental pairs are initial-value pairs based at the centre of their
//! patch (`θ = 0` for the right patch, `θ = π` for the left one), so `ce` is
//! even and `se` odd about that centre. The compact `F` relies on this for
//! the right patch, where only values at `π/2` enter.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hill::{self, State2};

/// Centre of the right patch; base point of the `q2` pair.
pub const RIGHT_CENTER: f64 = 0.0;
/// Centre of the left patch; base point of the `q1` pair.
pub const LEFT_CENTER: f64 = PI;
/// Upper seam `θ = π/2`.
pub const SEAM: f64 = FRAC_PI_2;
/// Lower seam seen from the right patch.
pub const LOWER_SEAM: f64 = -FRAC_PI_2;
/// Lower seam seen from the left patch (`-π/2 + 2π`).
pub const LOOP_END: f64 = 3.0 * FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ClosedForm,
    Monodromy,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::ClosedForm => "closed_form",
            Route::Monodromy => "monodromy",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantSample {
    pub lambda: f64,
    pub q1: f64,
    pub alpha: f64,
    pub value: f64,
    pub route: Route,
}

impl DiscriminantSample {
    /// `|D| ≤ 1`: bounded Bloch solutions.
    pub fn is_stable(&self) -> bool {
        self.value.abs() <= 1.0
    }
}

pub(crate) fn check_params(q1: f64, alpha: f64) -> Result<()> {
    if !(q1.is_finite() && q1 >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "q1",
            reason: format!("must be non-negative and finite, got {q1}"),
        });
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("must be positive and finite, got {alpha}"),
        });
    }
    Ok(())
}

/// Full-turn monodromy matrix starting at the lower seam `θ = -π/2`.
pub fn loop_monodromy(lambda: f64, q1: f64, alpha: f64, tol: f64) -> Result<[[f64; 2]; 2]> {
    check_params(q1, alpha)?;
    let q2 = alpha * alpha * q1;
    let right = hill::propagate(lambda, q2, LOWER_SEAM, SEAM, tol)?;
    let left = hill::propagate(lambda, q1, SEAM, LOOP_END, tol)?;
    Ok(right.then(&left).entries)
}

pub fn discriminant_monodromy(lambda: f64, q1: f64, alpha: f64, tol: f64) -> Result<f64> {
    let m = loop_monodromy(lambda, q1, alpha, tol)?;
    Ok(0.5 * (m[0][0] + m[1][1]))
}

/// Values of the centre-based fundamental pairs at the seams.
#[derive(Debug, Clone, Copy)]
pub struct SeamValues {
    /// `q1` pair at `π/2`.
    pub left_at_seam: (State2, State2),
    /// `q1` pair at `3π/2`.
    pub left_at_end: (State2, State2),
    /// `q2` pair at `π/2`.
    pub right_at_seam: (State2, State2),
    /// `q2` pair at `-π/2`.
    pub right_at_lower: (State2, State2),
}

pub fn seam_values(lambda: f64, q1: f64, alpha: f64, tol: f64) -> Result<SeamValues> {
    check_params(q1, alpha)?;
    let q2 = alpha * alpha * q1;
    Ok(SeamValues {
        left_at_seam: hill::fundamental_pair(lambda, q1, LEFT_CENTER, SEAM, tol)?,
        left_at_end: hill::fundamental_pair(lambda, q1, LEFT_CENTER, LOOP_END, tol)?,
        right_at_seam: hill::fundamental_pair(lambda, q2, RIGHT_CENTER, SEAM, tol)?,
        right_at_lower: hill::fundamental_pair(lambda, q2, RIGHT_CENTER, LOWER_SEAM, tol)?,
    })
}

/// Ingredients of the closed-form discriminant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormParts {
    /// The expanded determinant `F(λ, q1, α² q1)`.
    pub f: f64,
    /// `ce'·se - ce·se'` of the `q1` pair, taken at its base point.
    pub wronskian_q1: f64,
    /// `ce'·se - ce·se'` of the `q2` pair, taken at its base point.
    pub wronskian_q2: f64,
    /// The same Wronskians recomputed from the propagated values at `π/2`.
    /// They agree with the base values up to cancellation error, which is
    /// large when the solutions grow strongly.
    pub seam_wronskian_q1: f64,
    pub seam_wronskian_q2: f64,
}

impl ClosedFormParts {
    pub fn discriminant(&self) -> f64 {
        self.f / (2.0 * self.wronskian_q1 * self.wronskian_q2)
    }
}

fn slope_first_wronskian(c: &State2, s: &State2) -> f64 {
    c.slope * s.value - c.value * s.slope
}

fn check_wronskian(values: &[(State2, State2)], expected: f64) -> Result<f64> {
    let w0 = slope_first_wronskian(&values[0].0, &values[0].1);
    for (c, s) in values {
        let w = slope_first_wronskian(c, s);
        let scale = (c.slope * s.value).abs() + (c.value * s.slope).abs();
        if (w - expected).abs() > 1e-6 * scale.max(1.0) {
            return Err(Error::WronskianDrift {
                first: expected,
                second: w,
            });
        }
    }
    Ok(w0)
}

/// `F` and the two Wronskians. Shorthand: `c11 = ce(π/2, q1)`,
/// `c31 = ce(3π/2, q1)`, `c12 = ce(π/2, q2)`, primes are θ-derivatives.
pub fn closed_form_parts(lambda: f64, q1: f64, alpha: f64, tol: f64) -> Result<ClosedFormParts> {
    check_params(q1, alpha)?;
    let q2 = alpha * alpha * q1;
    let (c1, s1) = hill::fundamental_pair(lambda, q1, LEFT_CENTER, SEAM, tol)?;
    let (c3, s3) = hill::fundamental_pair(lambda, q1, LEFT_CENTER, LOOP_END, tol)?;
    let (c2, s2) = hill::fundamental_pair(lambda, q2, RIGHT_CENTER, SEAM, tol)?;

    // The Wronskian is constant; its value at the base point is exact,
    // whereas recomputing it from large propagated values cancels badly.
    let base_q1 = slope_first_wronskian(&State2::new(1.0, 0.0, LEFT_CENTER), &State2::new(0.0, 1.0, LEFT_CENTER));
    let base_q2 = slope_first_wronskian(&State2::new(1.0, 0.0, RIGHT_CENTER), &State2::new(0.0, 1.0, RIGHT_CENTER));
    let seam_wronskian_q1 = check_wronskian(&[(c1, s1), (c3, s3)], base_q1)?;
    let seam_wronskian_q2 = check_wronskian(&[(c2, s2)], base_q2)?;

    let (c11, dc11, s11, ds11) = (c1.value, c1.slope, s1.value, s1.slope);
    let (c31, dc31, s31, ds31) = (c3.value, c3.slope, s3.value, s3.slope);
    let (c12, dc12, s12, ds12) = (c2.value, c2.slope, s2.value, s2.slope);

    let f = c31 * dc12 * s12 * ds11 + c11 * dc12 * s12 * ds31 - 2.0 * c31 * dc12 * s11 * ds12
        + 2.0 * c11 * dc12 * s31 * ds12
        + c31 * c12 * ds11 * ds12
        + c11 * c12 * ds31 * ds12
        - dc31 * (dc12 * s11 * s12 + c12 * (-2.0 * s12 * ds11 + s11 * ds12))
        - dc11 * (dc12 * s31 * s12 + c12 * (2.0 * s12 * ds31 + s31 * ds12));

    Ok(ClosedFormParts {
        f,
        wronskian_q1: base_q1,
        wronskian_q2: base_q2,
        seam_wronskian_q1,
        seam_wronskian_q2,
    })
}

pub fn discriminant_closed_form(lambda: f64, q1: f64, alpha: f64, tol: f64) -> Result<f64> {
    Ok(closed_form_parts(lambda, q1, alpha, tol)?.discriminant())
}

pub fn sample(lambda: f64, q1: f64, alpha: f64, route: Route, tol: f64) -> Result<DiscriminantSample> {
    let value = match route {
        Route::ClosedForm => discriminant_closed_form(lambda, q1, alpha, tol)?,
        Route::Monodromy => discriminant_monodromy(lambda, q1, alpha, tol)?,
    };
    Ok(DiscriminantSample {
        lambda,
        q1,
        alpha,
        value,
        route,
    })
}

/// The even (`c`) and odd (`s`) solutions about `θ = 0`, carried through the
/// right patch and across the seam to `θ = π`.
///
/// Reflection symmetry `θ ↦ -θ` gives `D = c·s' + c'·s`, hence
/// `D - 1 = 2 c'(π) s(π)` and `D + 1 = 2 c(π) s'(π)`; the four factors vanish
/// on the even/odd periodic and antiperiodic branches respectively.
pub fn half_turn(lambda: f64, q1: f64, alpha: f64, tol: f64) -> Result<(State2, State2)> {
    check_params(q1, alpha)?;
    let q2 = alpha * alpha * q1;
    let right = hill::propagate(lambda, q2, RIGHT_CENTER, SEAM, tol)?;
    let left = hill::propagate(lambda, q1, SEAM, LEFT_CENTER, tol)?;
    let m = right.then(&left).entries;
    Ok((
        State2::new(m[0][0], m[1][0], LEFT_CENTER),
        State2::new(m[0][1], m[1][1], LEFT_CENTER),
    ))
}

pub fn discriminant_half_turn(lambda: f64, q1: f64, alpha: f64, tol: f64) -> Result<f64> {
    let (c, s) = half_turn(lambda, q1, alpha, tol)?;
    Ok(c.value * s.slope + c.slope * s.value)
}

/// Matching matrix acting on `(A1, B1, A2, B2)`: rows 1–2 impose continuity
/// of `Φ, Φ'` at `π/2`, rows 3–4 the Bloch condition between `3π/2` and
/// `-π/2` with multiplier `beta`.
pub fn matching_matrix(lambda: f64, q1: f64, alpha: f64, beta: f64, tol: f64) -> Result<Matrix4<f64>> {
    if beta != 1.0 && beta != -1.0 {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("must be +1 or -1, got {beta}"),
        });
    }
    Ok(matching_from_values(&seam_values(lambda, q1, alpha, tol)?, beta))
}

pub(crate) fn matching_from_values(v: &SeamValues, beta: f64) -> Matrix4<f64> {
    let (c1, s1) = v.left_at_seam;
    let (c3, s3) = v.left_at_end;
    let (c2, s2) = v.right_at_seam;
    let (c2l, s2l) = v.right_at_lower;
    Matrix4::new(
        c1.value,
        s1.value,
        -c2.value,
        -s2.value,
        c1.slope,
        s1.slope,
        -c2.slope,
        -s2.slope,
        beta * c3.value,
        beta * s3.value,
        -c2l.value,
        -s2l.value,
        beta * c3.slope,
        beta * s3.slope,
        -c2l.slope,
        -s2l.slope,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-11;

    #[test]
    fn harmonic_limit_values() {
        for alpha in [0.5, 2.0] {
            let d = discriminant_monodromy(0.25, 0.0, alpha, TOL).unwrap();
            assert!((d + 1.0).abs() < 1e-9);
            let d = discriminant_monodromy(1.0, 0.0, alpha, TOL).unwrap();
            assert!((d - 1.0).abs() < 1e-9);
            let d = discriminant_closed_form(0.25, 0.0, alpha, TOL).unwrap();
            assert!((d + 1.0).abs() < 1e-9);
            let d = discriminant_closed_form(4.0, 0.0, alpha, TOL).unwrap();
            assert!((d - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn three_routes_agree() {
        for &(l, q, a) in &[(1.3, 2.0, 0.5), (-2.0, 0.7, 1.7), (7.5, 4.0, 0.3), (12.0, 9.0, 1.0)] {
            let m = discriminant_monodromy(l, q, a, TOL).unwrap();
            let c = discriminant_closed_form(l, q, a, TOL).unwrap();
            let h = discriminant_half_turn(l, q, a, TOL).unwrap();
            let scale = m.abs().max(1.0);
            assert!((m - c).abs() < 1e-9 * scale, "{l} {q} {a}: {m} vs {c}");
            assert!((m - h).abs() < 1e-9 * scale, "{l} {q} {a}: {m} vs {h}");
        }
    }

    #[test]
    fn wronskians_follow_sign_convention() {
        let p = closed_form_parts(3.0, 2.0, 0.5, TOL).unwrap();
        assert_eq!((p.wronskian_q1, p.wronskian_q2), (-1.0, -1.0));
        assert!((p.seam_wronskian_q1 + 1.0).abs() < 1e-9);
        assert!((p.seam_wronskian_q2 + 1.0).abs() < 1e-9);
    }

    #[test]
    fn matching_determinant_identity() {
        // det M = β² - 2βD + 1 for unimodular pairs.
        for &(l, q, a) in &[(0.9, 1.0, 0.5), (3.3, 2.5, 1.4)] {
            let d = discriminant_monodromy(l, q, a, TOL).unwrap();
            for beta in [1.0, -1.0] {
                let m = matching_matrix(l, q, a, beta, TOL).unwrap();
                let expect = 2.0 - 2.0 * beta * d;
                assert!((m.determinant() - expect).abs() < 1e-8 * expect.abs().max(1.0));
            }
        }
    }

    #[test]
    fn matching_matrix_examples() {
        let m = matching_matrix(0.0, 0.0, 0.5, 1.0, TOL).unwrap();
        assert!(m.determinant().abs() < 1e-10);
        let m = matching_matrix(0.5, 0.0, 0.5, 1.0, TOL).unwrap();
        assert!(m.determinant().abs() > 0.1);
        assert!(matching_matrix(0.5, 0.0, 0.5, 0.3, TOL).is_err());
    }

    #[test]
    fn double_root_touches_without_sign_change() {
        // At q1 = 0, λ = 1 is a double root of D - 1, so det M = 2(1 - D) ≥ 0 on both sides.
        let below = matching_matrix(0.95, 0.0, 0.5, 1.0, TOL).unwrap().determinant();
        let at = matching_matrix(1.0, 0.0, 0.5, 1.0, TOL).unwrap().determinant();
        let above = matching_matrix(1.05, 0.0, 0.5, 1.0, TOL).unwrap().determinant();
        assert!(below > 0.0 && above > 0.0 && at.abs() < 1e-9);
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(discriminant_monodromy(1.0, -1.0, 0.5, TOL).is_err());
        assert!(discriminant_closed_form(1.0, 1.0, 0.0, TOL).is_err());
    }
}
