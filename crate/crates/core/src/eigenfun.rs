//! Stitched angular eigenfunctions and the radial equations.
//!
//! On the left patch `Φ = A1·c1 + B1·s1` with `(c1, s1)` the `q1` pair based
//! at `θ = π`; on the right patch `Φ = A2·c2 + B2·s2` with the `q2` pair based
//! at `θ = 0`. So `(A1, B1)` is the state `(Φ, Φ')` at `π` and `(A2, B2)` the
//! state at `0`, and the four amplitudes span the null space of the matching
//! matrix.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::discriminant::{self, check_params, LEFT_CENTER, LOOP_END, LOWER_SEAM, RIGHT_CENTER, SEAM};
use crate::error::{check_tol, Error, Result};
use crate::geometry::{radial_metric, Region};
use crate::hill::{self, State2};
use crate::ode::{OdeOptions, Stepper};
use crate::quadrature;
use crate::spectrum::{self, Branch, CurveLabel, Parity};

/// Integrator tolerance for eigenfunction evaluation.
pub const EVAL_TOL: f64 = 1e-12;
/// A singular value below `DEGENERACY_RATIO · σ_max` counts as zero.
pub const DEGENERACY_RATIO: f64 = 1e-6;
const PANELS_PER_REGION: usize = 8;
const GL_ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenCoeffs {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl EigenCoeffs {
    fn from_vector(v: &Vector4<f64>) -> Self {
        Self {
            a1: v[0],
            b1: v[1],
            a2: v[2],
            b2: v[3],
        }
    }

    fn as_vector(&self) -> Vector4<f64> {
        Vector4::new(self.a1, self.b1, self.a2, self.b2)
    }

    fn scaled(&self, k: f64) -> Self {
        Self {
            a1: k * self.a1,
            b1: k * self.b1,
            a2: k * self.a2,
            b2: k * self.b2,
        }
    }

    /// `(Φ, Φ')` at `θ = π`.
    pub fn left_center(&self) -> State2 {
        State2::new(self.a1, self.b1, LEFT_CENTER)
    }

    /// `(Φ, Φ')` at `θ = 0`.
    pub fn right_center(&self) -> State2 {
        State2::new(self.a2, self.b2, RIGHT_CENTER)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularEigenfunction {
    pub lambda: f64,
    pub q1: f64,
    pub alpha: f64,
    pub label: CurveLabel,
    pub coeffs: EigenCoeffs,
}

impl AngularEigenfunction {
    /// Solve for the characteristic value of `label` at `q1` and build the
    /// eigenfunction on it.
    pub fn build(label: CurveLabel, q1: f64, alpha: f64, root_tol: f64) -> Result<Self> {
        let lambda = spectrum::solve_label(label, q1, alpha, root_tol)?;
        Self::at(label, lambda, q1, alpha, 1e-6)
    }

    /// Eigenfunction of `label` at a known characteristic value.
    pub fn at(label: CurveLabel, lambda: f64, q1: f64, alpha: f64, curve_tol: f64) -> Result<Self> {
        let coeffs = null_coeffs(lambda, q1, alpha, label.branch(), Some(label.parity()), curve_tol)?;
        Ok(Self {
            lambda,
            q1,
            alpha,
            label,
            coeffs,
        })
    }

    pub fn branch(&self) -> Branch {
        self.label.branch()
    }

    pub fn parity(&self) -> Parity {
        self.label.parity()
    }

    fn q2(&self) -> f64 {
        self.alpha * self.alpha * self.q1
    }

    /// `(Φ, Φ')` at `θ` within the given patch, propagated from the patch
    /// centre.
    pub fn state_on(&self, region: Region, theta: f64) -> Result<State2> {
        if !region.contains(theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("{theta} is outside the {region} region"),
            });
        }
        let (q, start) = match region {
            Region::Right => (self.q2(), self.coeffs.right_center()),
            Region::Left => (self.q1, self.coeffs.left_center()),
        };
        Ok(hill::transport_to_points(self.lambda, q, start, &[theta], EVAL_TOL)?[0])
    }

    /// Values on a sorted table of angles in `[-π/2, 3π/2]`.
    pub fn tabulate(&self, thetas: &[f64]) -> Result<Vec<State2>> {
        if thetas.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter {
                name: "thetas",
                reason: "must be sorted".into(),
            });
        }
        if let Some(&t) = thetas.iter().find(|t| !(LOWER_SEAM..=LOOP_END).contains(*t)) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("{t} is outside [-π/2, 3π/2]"),
            });
        }
        let q2 = self.q2();
        let mut out = vec![State2::new(0.0, 0.0, 0.0); thetas.len()];
        let spans: [(f64, f64, f64, State2, bool); 4] = [
            (LOWER_SEAM, RIGHT_CENTER, q2, self.coeffs.right_center(), true),
            (RIGHT_CENTER, SEAM, q2, self.coeffs.right_center(), false),
            (SEAM, LEFT_CENTER, self.q1, self.coeffs.left_center(), true),
            (LEFT_CENTER, LOOP_END, self.q1, self.coeffs.left_center(), false),
        ];
        for (k, &(lo, hi, q, start, backwards)) in spans.iter().enumerate() {
            // Half-open spans, the last one closed.
            let idx: Vec<usize> = (0..thetas.len())
                .filter(|&i| thetas[i] >= lo && (thetas[i] < hi || (k == 3 && thetas[i] <= hi)))
                .collect();
            let mut order = idx.clone();
            if backwards {
                order.reverse();
            }
            let points: Vec<f64> = order.iter().map(|&i| thetas[i]).collect();
            let states = hill::transport_to_points(self.lambda, q, start, &points, EVAL_TOL)?;
            for (i, s) in order.into_iter().zip(states) {
                out[i] = s;
            }
        }
        Ok(out)
    }

    /// Continuity residual `|ΔΦ| + |ΔΦ'|` at `θ = π/2`.
    pub fn seam_residual(&self) -> Result<f64> {
        let l = self.state_on(Region::Left, SEAM)?;
        let r = self.state_on(Region::Right, SEAM)?;
        Ok((l.value - r.value).abs() + (l.slope - r.slope).abs())
    }

    /// Bloch residual `|βΦ(3π/2) - Φ(-π/2)| + |βΦ'(3π/2) - Φ'(-π/2)|`.
    pub fn bloch_residual(&self) -> Result<f64> {
        let beta = self.branch().beta();
        let end = self.state_on(Region::Left, LOOP_END)?;
        let start = self.state_on(Region::Right, LOWER_SEAM)?;
        Ok((beta * end.value - start.value).abs() + (beta * end.slope - start.slope).abs())
    }

    /// `∫ Φ² dθ` over one period.
    pub fn norm_sq(&self) -> Result<f64> {
        orthogonality_check(self, self, PANELS_PER_REGION * GL_ORDER)
    }

    /// `|Φ'' + (λ - 2q cos 2θ)Φ|` with `Φ''` from a five-point stencil of
    /// step `h` around `theta` (which must stay inside one patch).
    pub fn ode_residual(&self, theta: f64, h: f64) -> Result<f64> {
        let region = if Region::Right.contains(theta - 2.0 * h) && Region::Right.contains(theta + 2.0 * h) {
            Region::Right
        } else if Region::Left.contains(theta - 2.0 * h) && Region::Left.contains(theta + 2.0 * h) {
            Region::Left
        } else {
            return Err(Error::DegeneratePoint(format!("stencil around {theta} crosses a seam")));
        };
        let q = match region {
            Region::Right => self.q2(),
            Region::Left => self.q1,
        };
        let v = |t: f64| self.state_on(region, t).map(|s| s.value);
        let d2 = (-v(theta + 2.0 * h)? + 16.0 * v(theta + h)? - 30.0 * v(theta)? + 16.0 * v(theta - h)?
            - v(theta - 2.0 * h)?)
            / (12.0 * h * h);
        let phi = v(theta)?;
        Ok((d2 + (self.lambda - 2.0 * q * (2.0 * theta).cos()) * phi).abs())
    }
}

/// `Φ` at `theta`, reduced into `[-π/2, 3π/2)`; seams are read from the
/// left patch at `π/2` and from the right patch at `-π/2`.
pub fn eval_angular(f: &AngularEigenfunction, theta: f64) -> Result<f64> {
    let c = crate::geometry::AngularCoord::new(theta)?;
    Ok(f.state_on(c.region(), c.theta())?.value)
}

fn nodes() -> (Vec<f64>, Vec<f64>) {
    nodes_with(PANELS_PER_REGION)
}

fn nodes_with(panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (mut x, mut w) = quadrature::composite(LOWER_SEAM, SEAM, panels, GL_ORDER);
    let (x2, w2) = quadrature::composite(SEAM, LOOP_END, panels, GL_ORDER);
    x.extend(x2);
    w.extend(w2);
    (x, w)
}

fn norm_of(lambda: f64, q1: f64, alpha: f64, label: CurveLabel, coeffs: EigenCoeffs) -> Result<f64> {
    let f = AngularEigenfunction {
        lambda,
        q1,
        alpha,
        label,
        coeffs,
    };
    let (x, w) = nodes();
    let vals = f.tabulate(&x)?;
    Ok(vals.iter().zip(&w).map(|(s, w)| w * s.value * s.value).sum::<f64>().sqrt())
}

/// Null direction of the matching matrix, normalised to unit `L²` norm over
/// `[-π/2, 3π/2]`. Even members have `Φ(0) > 0`, odd members `Φ'(0) > 0`.
///
/// With a two-dimensional null space (double root) `parity` selects the
/// member; without it the call fails with [`Error::Degenerate`].
pub fn null_coeffs(
    lambda: f64,
    q1: f64,
    alpha: f64,
    branch: Branch,
    parity: Option<Parity>,
    tol: f64,
) -> Result<EigenCoeffs> {
    check_params(q1, alpha)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    let beta = branch.beta();
    let d = discriminant::discriminant_half_turn(lambda, q1, alpha, EVAL_TOL)?;
    let residual = (d - beta).abs();
    if residual >= tol {
        return Err(Error::OffCurve { lambda, q1, residual });
    }
    let m: Matrix4<f64> = discriminant::matching_matrix(lambda, q1, alpha, beta, EVAL_TOL)?;
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let s_max = svd.singular_values[order[3]];
    let thresh = DEGENERACY_RATIO * s_max;
    let dir = |k: usize| -> Vector4<f64> { v_t.row(order[k]).transpose() };

    let v = if svd.singular_values[order[1]] < thresh {
        let Some(p) = parity else {
            return Err(Error::Degenerate);
        };
        // Combine the two null directions so that B2 = 0 (even) or A2 = 0 (odd).
        let (u, w) = (dir(0), dir(1));
        let k = match p {
            Parity::Even => 3,
            Parity::Odd => 2,
        };
        let (x, y) = (w[k], -u[k]);
        let v = u * x + w * y;
        if v.norm() == 0.0 {
            return Err(Error::Degenerate);
        }
        v.normalize()
    } else {
        let v = dir(0);
        let found = if v[2].abs() >= v[3].abs() {
            Parity::Even
        } else {
            Parity::Odd
        };
        if let Some(p) = parity {
            if p != found {
                return Err(Error::ParityMismatch(format!(
                    "lambda = {lambda} carries a single {found} eigenfunction, {p} was requested"
                )));
            }
        }
        v
    };

    let found = if v[2].abs() >= v[3].abs() {
        Parity::Even
    } else {
        Parity::Odd
    };
    let coeffs = EigenCoeffs::from_vector(&v);
    let sign_ref = match found {
        Parity::Even => coeffs.a2,
        Parity::Odd => coeffs.b2,
    };
    let label = label_stub(branch, found);
    let norm = norm_of(lambda, q1, alpha, label, coeffs)?;
    Ok(coeffs.scaled(sign_ref.signum() / norm))
}

// The quadrature does not depend on the label; any label of the right
// branch and parity will do.
fn label_stub(branch: Branch, parity: Parity) -> CurveLabel {
    let twice = match (branch, parity) {
        (Branch::Plus, Parity::Even) => 0,
        (Branch::Plus, Parity::Odd) => 2,
        (Branch::Minus, _) => 1,
    };
    CurveLabel::new(twice, parity).expect("valid stub label")
}

/// `|M v|` for the coefficient vector of `f`.
pub fn matching_residual(f: &AngularEigenfunction) -> Result<f64> {
    let m = discriminant::matching_matrix(f.lambda, f.q1, f.alpha, f.branch().beta(), EVAL_TOL)?;
    Ok((m * f.coeffs.as_vector()).norm())
}

/// `∫ Φ_f Φ_g dθ` over `[-π/2, 3π/2]` with composite Gauss-Legendre, using
/// at least `quad_points` nodes per patch.
pub fn orthogonality_check(f: &AngularEigenfunction, g: &AngularEigenfunction, quad_points: usize) -> Result<f64> {
    if f.q1 != g.q1 || f.alpha != g.alpha {
        return Err(Error::InvalidParameter {
            name: "g",
            reason: "eigenfunctions must share q1 and alpha".into(),
        });
    }
    let panels = quad_points.div_ceil(GL_ORDER).max(4);
    let (x, w) = nodes_with(panels);
    let a = f.tabulate(&x)?;
    let b = g.tabulate(&x)?;
    Ok(a.iter().zip(&b).zip(&w).map(|((a, b), w)| w * a.value * b.value).sum())
}

/// Radial solution sampled on a uniform `μ` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub region: Region,
    pub lambda: f64,
    pub q1: f64,
    pub alpha: f64,
    /// `State2 { value: R, slope: R', at: μ }`.
    pub samples: Vec<State2>,
}

fn radial_rhs(region: Region, lambda: f64, q1: f64, alpha: f64, mu: f64, r: f64, dr: f64) -> f64 {
    match region {
        Region::Left => (lambda - 2.0 * q1 * (2.0 * mu).cosh()) * r,
        Region::Right => {
            let (g2, dlog) = radial_metric(Region::Right, mu, alpha);
            dlog * dr + g2 * (lambda - 2.0 * q1 * ((2.0 * mu).cosh() + alpha * alpha - 1.0)) * r
        }
    }
}

impl RadialSolution {
    /// Finite-difference residual of the first-order system `(R, R')` at
    /// every interior sample: five-point derivatives of `R` and `R'` compared
    /// with `R'` and the right-hand side, relative to `max(1, |R|, |R'|)`.
    pub fn residuals(&self) -> Vec<f64> {
        let s = &self.samples;
        if s.len() < 5 {
            return Vec::new();
        }
        let h = s[1].at - s[0].at;
        let d1 = |f: &dyn Fn(&State2) -> f64, i: usize| {
            (-f(&s[i + 2]) + 8.0 * f(&s[i + 1]) - 8.0 * f(&s[i - 1]) + f(&s[i - 2])) / (12.0 * h)
        };
        (2..s.len() - 2)
            .map(|i| {
                let dr = d1(&|x: &State2| x.value, i);
                let ddr = d1(&|x: &State2| x.slope, i);
                let rhs = radial_rhs(self.region, self.lambda, self.q1, self.alpha, s[i].at, s[i].value, s[i].slope);
                let scale = s[i].value.abs().max(s[i].slope.abs()).max(1.0);
                (dr - s[i].slope).abs().max((ddr - rhs).abs()) / scale
            })
            .collect()
    }
}

/// Integrate the radial equation of `region` from `r0` (at `μ = 0`) to
/// `mu_max`, sampling `n_points` equally spaced values (endpoints included).
#[allow(clippy::too_many_arguments)]
pub fn radial_solve(
    region: Region,
    lambda: f64,
    q1: f64,
    alpha: f64,
    r0: State2,
    mu_max: f64,
    n_points: usize,
    tol: f64,
) -> Result<RadialSolution> {
    check_params(q1, alpha)?;
    check_tol(tol)?;
    if !(mu_max.is_finite() && mu_max > 0.0) || n_points < 2 || !lambda.is_finite() {
        return Err(Error::InvalidParameter {
            name: "mu_max",
            reason: "need finite lambda, mu_max > 0 and at least two samples".into(),
        });
    }
    if r0.at != 0.0 {
        return Err(Error::StateMismatch {
            expected: 0.0,
            got: r0.at,
        });
    }
    let rhs = move |mu: f64, y: &[f64; 2]| [y[1], radial_rhs(region, lambda, q1, alpha, mu, y[0], y[1])];
    let max_step = (1.0 / (lambda.abs() + 2.0 * q1 * (2.0 * mu_max).cosh()).sqrt()).min(0.1);
    let mut st = Stepper::new(rhs, 0.0, [r0.value, r0.slope], OdeOptions::new(tol).with_max_step(max_step));
    let mut samples = Vec::with_capacity(n_points);
    samples.push(r0);
    for i in 1..n_points {
        let mu = mu_max * i as f64 / (n_points - 1) as f64;
        let y = st.advance_to(mu, |_, _| {})?;
        samples.push(State2::new(y[0], y[1], mu));
    }
    Ok(RadialSolution {
        region,
        lambda,
        q1,
        alpha,
        samples,
    })
}

/// `max |R_left - R_right|` on the sample grid for the same initial data:
/// how far the two patches' radial factors drift apart along the seam.
pub fn radial_seam_mismatch(
    lambda: f64,
    q1: f64,
    alpha: f64,
    r0: State2,
    mu_max: f64,
    n_points: usize,
    tol: f64,
) -> Result<f64> {
    let l = radial_solve(Region::Left, lambda, q1, alpha, r0, mu_max, n_points, tol)?;
    let r = radial_solve(Region::Right, lambda, q1, alpha, r0, mu_max, n_points, tol)?;
    Ok(l.samples
        .iter()
        .zip(&r.samples)
        .map(|(a, b)| (a.value - b.value).abs())
        .fold(0.0, f64::max))
}

/// `n` equally spaced angles covering `[-π/2, 3π/2]`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![LOWER_SEAM; n];
    }
    (0..n).map(|i| LOWER_SEAM + 2.0 * PI * i as f64 / (n - 1) as f64).collect()
}
