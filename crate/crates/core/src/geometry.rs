//! The two-elliptic coordinate system: Cartesian map, metric factors and
//! coordinate grids.
//!
//! The plane is covered by two elliptic patches glued along the y axis. The
//! right patch (`-π/2 ≤ θ ≤ π/2`) has foci at `±f2 = ±α f1`, the left patch
//! (`π/2 ≤ θ ≤ 3π/2`) at `±f1`.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Focal distance, scale coefficient and wavenumber of a two-elliptic system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    f1: f64,
    alpha: f64,
    k: f64,
}

impl SystemConfig {
    pub fn new(f1: f64, alpha: f64, k: f64) -> Result<Self> {
        if !(f1.is_finite() && f1 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "f1",
                reason: format!("must be positive and finite, got {f1}"),
            });
        }
        // α = 0 leaves g2 singular at μ = 0; only α → 0⁺ is supported.
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("must be positive and finite, got {alpha}"),
            });
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: format!("must be non-negative and finite, got {k}"),
            });
        }
        Ok(Self { f1, alpha, k })
    }

    /// Build from `α²`, the parameter used in chart captions.
    pub fn from_alpha_sq(f1: f64, alpha_sq: f64, k: f64) -> Result<Self> {
        if !(alpha_sq.is_finite() && alpha_sq > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha_sq",
                reason: format!("must be positive and finite, got {alpha_sq}"),
            });
        }
        Self::new(f1, alpha_sq.sqrt(), k)
    }

    pub fn f1(&self) -> f64 {
        self.f1
    }

    pub fn f2(&self) -> f64 {
        self.alpha * self.f1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `q1 = k² f1² / 4`.
    pub fn q1(&self) -> f64 {
        0.25 * self.k * self.k * self.f1 * self.f1
    }

    /// `q2 = α² q1`.
    pub fn q2(&self) -> f64 {
        self.alpha * self.alpha * self.q1()
    }
}

/// Which elliptic patch a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// `-π/2 ≤ θ ≤ π/2`, foci `±f2`, angular parameter `q2`.
    Right,
    /// `π/2 ≤ θ ≤ 3π/2`, foci `±f1`, angular parameter `q1`.
    Left,
}

impl Region {
    pub fn contains(self, theta: f64) -> bool {
        match self {
            Region::Right => (-FRAC_PI_2..=FRAC_PI_2).contains(&theta),
            Region::Left => (FRAC_PI_2..=3.0 * FRAC_PI_2).contains(&theta),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Right => "right",
            Region::Left => "left",
        })
    }
}

/// An angle in `[-π/2, 3π/2]` together with its patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularCoord {
    theta: f64,
    region: Region,
}

impl AngularCoord {
    /// Reduce `theta` into `[-π/2, 3π/2)` and pick the patch; the seams go to
    /// the patch on their upper side (`-π/2` → Right, `π/2` → Left).
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: "must be finite".into(),
            });
        }
        let mut t = (theta + FRAC_PI_2).rem_euclid(TAU) - FRAC_PI_2;
        if t >= 3.0 * FRAC_PI_2 {
            t = -FRAC_PI_2;
        }
        let region = if t < FRAC_PI_2 { Region::Right } else { Region::Left };
        Ok(Self { theta: t, region })
    }

    /// Explicitly tagged coordinate; `theta` must lie in the closed range of
    /// `region`. This is how a seam point is evaluated on a chosen side.
    pub fn with_region(theta: f64, region: Region) -> Result<Self> {
        if !region.contains(theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("{theta} is outside the {region} region"),
            });
        }
        Ok(Self { theta, region })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn region(&self) -> Region {
        self.region
    }
}

/// Metric and potential factors of the separated equations at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricData {
    pub g1: f64,
    pub g2: f64,
    pub h1: f64,
    pub h2: f64,
    /// `g2' / (2 g2)`.
    pub dlog_g2: f64,
}

/// `(g2, g2'/(2 g2))` of the radial equation in `region`.
pub fn radial_metric(region: Region, mu: f64, alpha: f64) -> (f64, f64) {
    match region {
        Region::Left => (1.0, 0.0),
        Region::Right => {
            let a2 = alpha * alpha;
            let sh = mu.sinh();
            let denom = a2 + sh * sh;
            let ch = mu.cosh();
            (ch * ch / denom, (a2 - 1.0) * mu.tanh() / denom)
        }
    }
}

/// Cartesian image of `(θ, μ)`.
pub fn to_cartesian(theta: AngularCoord, mu: f64, cfg: &SystemConfig) -> (f64, f64) {
    branch_xy(theta.region, theta.theta, mu, cfg)
}

// α cosh(asinh(sinh μ / α)) = sqrt(α² + sinh² μ) and α sinh(asinh(sinh μ / α)) = sinh μ.
fn branch_xy(region: Region, theta: f64, mu: f64, cfg: &SystemConfig) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let sh = mu.sinh();
    match region {
        Region::Right => {
            // Equal to sqrt(α² + sinh² μ); written this way so that α = 1
            // reproduces cosh μ bit for bit.
            let ch = mu.cosh();
            let radius = ((cfg.alpha * cfg.alpha - 1.0) + ch * ch).sqrt();
            (cfg.f1 * radius * c, cfg.f1 * sh * s)
        }
        Region::Left => (cfg.f1 * mu.cosh() * c, cfg.f1 * sh * s),
    }
}

pub fn metric_at(theta: AngularCoord, mu: f64, cfg: &SystemConfig) -> MetricData {
    let half_f1_sq = 0.5 * cfg.f1 * cfg.f1;
    let cos2t = (2.0 * theta.theta).cos();
    let (g2, dlog_g2) = radial_metric(theta.region, mu, cfg.alpha);
    let a2 = cfg.alpha * cfg.alpha;
    match theta.region {
        Region::Left => MetricData {
            g1: 1.0,
            g2,
            h1: -half_f1_sq * cos2t,
            h2: half_f1_sq * (2.0 * mu).cosh(),
            dlog_g2,
        },
        Region::Right => MetricData {
            g1: 1.0,
            g2,
            h1: -half_f1_sq * cos2t * a2,
            h2: half_f1_sq * ((2.0 * mu).cosh() + a2 - 1.0),
            dlog_g2,
        },
    }
}

/// Which coordinate is held fixed along a grid line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordLabel {
    Theta,
    Mu,
}

impl fmt::Display for CoordLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoordLabel::Theta => "theta",
            CoordLabel::Mu => "mu",
        })
    }
}

impl std::str::FromStr for CoordLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(CoordLabel::Theta),
            "mu" => Ok(CoordLabel::Mu),
            other => Err(Error::Parse(format!("unknown coordinate label `{other}`"))),
        }
    }
}

/// A coordinate line sampled as a Cartesian polyline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub label: CoordLabel,
    pub value: f64,
    pub points: Vec<[f64; 2]>,
}

/// Samples per polyline produced by [`grid`].
pub const GRID_SAMPLES: usize = 121;

/// `n_theta` lines of constant θ (uniform over `[-π/2, 3π/2)`) and `n_mu`
/// lines of constant μ (uniform over `[0, mu_max]`).
pub fn grid(cfg: &SystemConfig, n_theta: usize, n_mu: usize, mu_max: f64) -> Result<Vec<Polyline>> {
    if n_theta < 2 || n_mu < 2 {
        return Err(Error::InvalidParameter {
            name: "n_theta/n_mu",
            reason: "need at least two lines of each family".into(),
        });
    }
    if !(mu_max.is_finite() && mu_max > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mu_max",
            reason: format!("must be positive, got {mu_max}"),
        });
    }
    let mut out = Vec::with_capacity(n_theta + n_mu);
    for i in 0..n_theta {
        let theta = -FRAC_PI_2 + TAU * i as f64 / n_theta as f64;
        let coord = AngularCoord::new(theta)?;
        let points = (0..GRID_SAMPLES)
            .map(|j| {
                let mu = mu_max * j as f64 / (GRID_SAMPLES - 1) as f64;
                let (x, y) = to_cartesian(coord, mu, cfg);
                [x, y]
            })
            .collect();
        out.push(Polyline {
            label: CoordLabel::Theta,
            value: coord.theta(),
            points,
        });
    }
    for i in 0..n_mu {
        let mu = mu_max * i as f64 / (n_mu - 1) as f64;
        let points = (0..GRID_SAMPLES)
            .map(|j| {
                let theta = -FRAC_PI_2 + TAU * j as f64 / (GRID_SAMPLES - 1) as f64;
                let region = if theta <= FRAC_PI_2 { Region::Right } else { Region::Left };
                let (x, y) = branch_xy(region, theta, mu, cfg);
                [x, y]
            })
            .collect();
        out.push(Polyline {
            label: CoordLabel::Mu,
            value: mu,
            points,
        });
    }
    Ok(out)
}

/// `|t̂_θ · t̂_μ|` from central differences of the Cartesian map. The stencil
/// must stay inside one patch and on one side of the focal segment `μ = 0`.
pub fn orthogonality_residual(theta: AngularCoord, mu: f64, cfg: &SystemConfig, step: f64) -> Result<f64> {
    if !(step > 0.0 && step < 0.1) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: format!("must be in (0, 0.1), got {step}"),
        });
    }
    let t = theta.theta;
    if mu.abs() <= step {
        return Err(Error::DegeneratePoint(format!("mu = {mu} lies on the focal segment")));
    }
    let seam_gap = [(-FRAC_PI_2), FRAC_PI_2, 3.0 * FRAC_PI_2]
        .iter()
        .map(|s| (t - s).abs())
        .fold(f64::INFINITY, f64::min);
    if seam_gap <= step {
        return Err(Error::DegeneratePoint(format!("theta = {t} lies on a seam")));
    }
    let r = theta.region;
    let (xp, yp) = branch_xy(r, t + step, mu, cfg);
    let (xm, ym) = branch_xy(r, t - step, mu, cfg);
    let tt = [(xp - xm) / (2.0 * step), (yp - ym) / (2.0 * step)];
    let (xp, yp) = branch_xy(r, t, mu + step, cfg);
    let (xm, ym) = branch_xy(r, t, mu - step, cfg);
    let tm = [(xp - xm) / (2.0 * step), (yp - ym) / (2.0 * step)];
    let nt = tt[0].hypot(tt[1]);
    let nm = tm[0].hypot(tm[1]);
    let floor = 1e-10 * cfg.f1;
    if nt < floor || nm < floor {
        return Err(Error::DegeneratePoint(format!(
            "tangent norm below {floor:e} at theta = {t}, mu = {mu}"
        )));
    }
    Ok(((tt[0] * tm[0] + tt[1] * tm[1]) / (nt * nm)).abs())
}

/// `θ ↦ 2π - θ` maps the left patch onto itself; `θ ↦ -θ` the right one.
pub fn mirror(theta: AngularCoord) -> AngularCoord {
    let t = match theta.region {
        Region::Right => -theta.theta,
        Region::Left => TAU - theta.theta,
    };
    AngularCoord {
        theta: t,
        region: theta.region,
    }
}
