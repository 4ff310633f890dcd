//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 8(5,3)).
//!
//! The stepper works on fixed-size states `[f64; N]` so the hot loops in the
//! Hill propagators stay allocation free.

use crate::dop853::{A, B, C, E3, E5, N_STAGES};
use crate::error::{Error, Result};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Used as both absolute and relative tolerance.
    pub tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_step: 0.1,
            max_steps: 1_000_000,
        }
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }
}

/// Integrator state carried between calls to [`Stepper::advance_to`].
pub struct Stepper<F, const N: usize>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    rhs: F,
    opts: OdeOptions,
    t: f64,
    y: [f64; N],
    f: [f64; N],
    h_abs: Option<f64>,
    steps: usize,
}

impl<F, const N: usize> Stepper<F, N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut rhs: F, t0: f64, y0: [f64; N], opts: OdeOptions) -> Self {
        let f = rhs(t0, &y0);
        Self {
            rhs,
            opts,
            t: t0,
            y: y0,
            f,
            h_abs: None,
            steps: 0,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Integrate up to exactly `t_end`, calling `observer` after every
    /// accepted step.
    pub fn advance_to<O>(&mut self, t_end: f64, mut observer: O) -> Result<[f64; N]>
    where
        O: FnMut(f64, &[f64; N]),
    {
        if t_end == self.t {
            return Ok(self.y);
        }
        let dir = (t_end - self.t).signum();
        let mut h_abs = match self.h_abs {
            Some(h) => h,
            None => self.initial_step(dir, (t_end - self.t).abs()),
        };

        while dir * (t_end - self.t) > 0.0 {
            let min_step = 10.0 * (next_toward(self.t, dir) - self.t).abs();
            h_abs = h_abs.min(self.opts.max_step).max(min_step);

            let mut rejected = false;
            loop {
                if h_abs < min_step {
                    return Err(Error::StepUnderflow { t: self.t, h: h_abs });
                }
                let mut t_new = self.t + dir * h_abs;
                if dir * (t_new - t_end) > 0.0 {
                    t_new = t_end;
                }
                let h = t_new - self.t;
                let (y_new, f_new, err) = self.step(h);
                if err.is_finite() && err < 1.0 {
                    let mut factor = if err == 0.0 {
                        MAX_FACTOR
                    } else {
                        (SAFETY * err.powf(ERROR_EXPONENT)).min(MAX_FACTOR)
                    };
                    if rejected {
                        factor = factor.min(1.0);
                    }
                    // Do not let the clipped final step shrink the carried step size.
                    h_abs = h_abs.max(h.abs()) * factor;
                    self.t = t_new;
                    self.y = y_new;
                    self.f = f_new;
                    break;
                }
                let shrink = if err.is_finite() {
                    (SAFETY * err.powf(ERROR_EXPONENT)).max(MIN_FACTOR)
                } else {
                    MIN_FACTOR
                };
                h_abs = h.abs() * shrink;
                rejected = true;
            }

            self.steps += 1;
            if self.steps > self.opts.max_steps {
                return Err(Error::TooManySteps(self.opts.max_steps));
            }
            observer(self.t, &self.y);
        }
        self.h_abs = Some(h_abs);
        Ok(self.y)
    }

    fn step(&mut self, h: f64) -> ([f64; N], [f64; N], f64) {
        let mut k = [[0.0; N]; N_STAGES + 1];
        k[0] = self.f;
        for s in 1..N_STAGES {
            let mut ys = self.y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = (self.rhs)(self.t + C[s] * h, &ys);
        }
        let mut y_new = self.y;
        for (s, ks) in k.iter().enumerate().take(N_STAGES) {
            for i in 0..N {
                y_new[i] += h * B[s] * ks[i];
            }
        }
        let f_new = (self.rhs)(self.t + h, &y_new);
        k[N_STAGES] = f_new;

        let mut err5 = 0.0;
        let mut err3 = 0.0;
        for i in 0..N {
            let scale = self.opts.tol * (1.0 + self.y[i].abs().max(y_new[i].abs()));
            let mut e5 = 0.0;
            let mut e3 = 0.0;
            for (s, ks) in k.iter().enumerate() {
                e5 += E5[s] * ks[i];
                e3 += E3[s] * ks[i];
            }
            err5 += (e5 / scale).powi(2);
            err3 += (e3 / scale).powi(2);
        }
        let err = if err5 == 0.0 && err3 == 0.0 {
            0.0
        } else {
            h.abs() * err5 / (((err5 + 0.01 * err3) * N as f64).sqrt())
        };
        (y_new, f_new, err)
    }

    fn initial_step(&mut self, dir: f64, span: f64) -> f64 {
        let tol = self.opts.tol;
        let norm = |v: &[f64; N], y: &[f64; N]| -> f64 {
            let s: f64 = v
                .iter()
                .zip(y.iter())
                .map(|(a, b)| (a / (tol * (1.0 + b.abs()))).powi(2))
                .sum();
            (s / N as f64).sqrt()
        };
        let d0 = norm(&self.y, &self.y);
        let d1 = norm(&self.f, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        let mut y1 = self.y;
        for (y, f) in y1.iter_mut().zip(self.f.iter()) {
            *y += dir * h0 * f;
        }
        let f1 = (self.rhs)(self.t + dir * h0, &y1);
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - self.f[i];
        }
        let d2 = norm(&diff, &self.y) / h0;
        let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1).min(span)
    }
}

fn next_toward(t: f64, dir: f64) -> f64 {
    let bits = t.to_bits();
    if t == 0.0 {
        return dir * f64::from_bits(1);
    }
    let up = (t > 0.0) == (dir > 0.0);
    f64::from_bits(if up { bits + 1 } else { bits - 1 })
}

/// One-shot integration from `t0` to `t1`.
pub fn integrate<F, const N: usize>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: OdeOptions,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    Stepper::new(rhs, t0, y0, opts).advance_to(t1, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 2.0, OdeOptions::new(1e-12)).unwrap();
        assert!((y[0] - (-2.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let opts = OdeOptions::new(1e-12);
        let y = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 1.0, [1.0, 0.0], -2.0, opts).unwrap();
        assert!((y[0] - 3.0f64.cos()).abs() < 1e-10);
        assert!((y[1] - 3.0f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn stepper_lands_on_intermediate_points() {
        let mut st = Stepper::new(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], OdeOptions::new(1e-12));
        for k in 1..=10 {
            let t = 0.37 * k as f64;
            let y = st.advance_to(t, |_, _| {}).unwrap();
            assert_eq!(st.t(), t);
            assert!((y[0] - t.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn underflow_reported() {
        // Finite-time blow-up: y' = y^2, y(0) = 1 diverges at t = 1.
        let err = integrate(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, OdeOptions::new(1e-10));
        assert!(err.is_err());
    }
}
