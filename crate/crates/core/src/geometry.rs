//! The circular region `K` attached to a ferromagnetic pair `(beta, gamma)`,
//! the closed-form intercepts `lambda*_d` of its signed products, and the
//! algorithmic thresholds.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::SpinParams;

/// `|Phi|` below this routes to the half-plane case.
pub const PHI_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum CircularRegion {
    /// `{ z : |z - center| >= radius }` with `0 <= center < radius`.
    ExteriorOfDisk { center: f64, radius: f64 },
    /// `{ z : |z - center| <= radius }` with `center < -radius`.
    ClosedDisk { center: f64, radius: f64 },
    /// `{ z : Re z <= bound }` with `bound < 0`.
    HalfPlane { bound: f64 },
}

impl CircularRegion {
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            CircularRegion::ExteriorOfDisk { center, radius } => (z - center).norm() >= radius,
            CircularRegion::ClosedDisk { center, radius } => (z - center).norm() <= radius,
            CircularRegion::HalfPlane { bound } => z.re <= bound,
        }
    }

    /// Signed distance to the boundary, negative inside the region.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        match *self {
            CircularRegion::ExteriorOfDisk { center, radius } => radius - (z - center).norm(),
            CircularRegion::ClosedDisk { center, radius } => (z - center).norm() - radius,
            CircularRegion::HalfPlane { bound } => z.re - bound,
        }
    }

    /// Half-width `w` of the cone of directions `pi +- w` that meet the region,
    /// or `None` when every direction does.
    pub fn angular_half_width(&self) -> Option<f64> {
        match *self {
            CircularRegion::ExteriorOfDisk { .. } => None,
            CircularRegion::ClosedDisk { center, radius } => Some((radius / center.abs()).asin()),
            CircularRegion::HalfPlane { .. } => Some(FRAC_PI_2),
        }
    }

    /// Smallest modulus of a point of the region.
    pub fn min_modulus(&self) -> f64 {
        match *self {
            CircularRegion::ExteriorOfDisk { center, radius } => radius - center,
            CircularRegion::ClosedDisk { center, radius } => center.abs() - radius,
            CircularRegion::HalfPlane { bound } => -bound,
        }
    }

    /// Modulus of the boundary point in direction `theta` closest to the origin.
    pub fn boundary_polar(&self, theta: f64) -> Result<f64> {
        self.crossing(theta, false)
    }

    /// Modulus of the farthest point in direction `theta`; infinite for the
    /// unbounded regions.
    pub fn boundary_polar_far(&self, theta: f64) -> Result<f64> {
        self.crossing(theta, true)
    }

    fn crossing(&self, theta: f64, far: bool) -> Result<f64> {
        let (s, cos) = theta.sin_cos();
        match *self {
            CircularRegion::ExteriorOfDisk { center, radius } => {
                if far {
                    return Ok(f64::INFINITY);
                }
                Ok(center * cos + (radius * radius - center * center * s * s).sqrt())
            }
            CircularRegion::ClosedDisk { center, radius } => {
                let mut disc = radius * radius - center * center * s * s;
                if cos >= 0.0 || disc < -1e-12 * center * center {
                    return Err(Error::AngleOutOfDomain { theta });
                }
                disc = disc.max(0.0);
                let sign = if far { 1.0 } else { -1.0 };
                Ok(center * cos + sign * disc.sqrt())
            }
            CircularRegion::HalfPlane { bound } => {
                if cos >= 0.0 {
                    return Err(Error::AngleOutOfDomain { theta });
                }
                if far {
                    return Ok(f64::INFINITY);
                }
                Ok(bound / cos)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionCase {
    ExteriorOfDisk,
    ClosedDisk,
    HalfPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionGeometry {
    pub params: SpinParams,
    pub phi: f64,
    pub region: CircularRegion,
    /// Centre of the disk; `None` in the half-plane case where it diverges.
    pub c_star: Option<f64>,
    pub radius: Option<f64>,
    #[serde(serialize_with = "ser_complex")]
    pub zeta1: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub zeta2: Complex64,
    pub d_star: f64,
    pub lambda_star: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl ContractionGeometry {
    pub fn case(&self) -> RegionCase {
        match self.region {
            CircularRegion::ExteriorOfDisk { .. } => RegionCase::ExteriorOfDisk,
            CircularRegion::ClosedDisk { .. } => RegionCase::ClosedDisk,
            CircularRegion::HalfPlane { .. } => RegionCase::HalfPlane,
        }
    }

    /// `lambda*_d`, the positive real intercept of `K_d`, for real `d >= 2`;
    /// `+inf` when no symmetric configuration reaches the positive axis.
    pub fn lambda_star_d(&self, d: f64) -> f64 {
        lambda_star_d(self, d)
    }
}

pub fn phi_discriminant(params: &SpinParams) -> f64 {
    let (b, g) = (params.beta(), params.gamma());
    let p = (b * g - 1.0).sqrt();
    (b / g).sqrt().ln() - p.atan() * p
}

pub fn build_geometry(params: &SpinParams) -> ContractionGeometry {
    let (b, g) = (params.beta(), params.gamma());
    let p = (b * g - 1.0).sqrt();
    let phi = phi_discriminant(params);
    let zeta1 = Complex64::new(-1.0, p) / g;
    let d_star = PI / p.atan();
    let lambda_star = (b / g).powf(d_star / 2.0);

    let (region, c_star, radius) = if phi.abs() < PHI_TIE_TOL {
        (CircularRegion::HalfPlane { bound: -1.0 / g }, None, None)
    } else {
        let c = -b * (b / g).sqrt().ln() / phi;
        let r = ((b * g - 1.0) / (g * g) + (c + 1.0 / g).powi(2)).sqrt();
        let region = if phi < 0.0 {
            CircularRegion::ExteriorOfDisk { center: c, radius: r }
        } else {
            CircularRegion::ClosedDisk { center: c, radius: r }
        };
        (region, Some(c), Some(r))
    };
    ContractionGeometry { params: *params, phi, region, c_star, radius, zeta1, zeta2: zeta1.conj(), d_star, lambda_star }
}

pub fn region_contains(region: &CircularRegion, z: Complex64) -> bool {
    region.contains(z)
}

pub fn boundary_polar(region: &CircularRegion, theta: f64) -> Result<f64> {
    region.boundary_polar(theta)
}

/// Closed form `boundary_polar(pi - pi/d)^d`, `+inf` where that direction misses `K`.
pub fn lambda_star_d(geometry: &ContractionGeometry, d: f64) -> f64 {
    match geometry.region.boundary_polar(PI - PI / d) {
        Ok(rho) => rho.powf(d),
        Err(_) => f64::INFINITY,
    }
}

/// Integer `d` in `lo..=hi` minimising `lambda*_d`, with the minimum.
pub fn argmin_lambda_star_d(geometry: &ContractionGeometry, lo: usize, hi: usize) -> (usize, f64) {
    (lo..=hi)
        .map(|d| (d, lambda_star_d(geometry, d as f64)))
        .fold((lo, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub lambda_mcmc: f64,
    pub d_c: f64,
    pub lambda_c: f64,
    pub d_star: f64,
    pub lambda_star: f64,
}

pub fn thresholds(params: &SpinParams) -> Thresholds {
    let (b, g) = (params.beta(), params.gamma());
    let s = (b * g).sqrt();
    let d_c = s / (s - 1.0);
    let geom = build_geometry(params);
    Thresholds {
        lambda_mcmc: b / g,
        d_c,
        lambda_c: (b / g).powf(d_c),
        d_star: geom.d_star,
        lambda_star: geom.lambda_star,
    }
}

/// One row of a threshold sweep at fixed `beta`; `thresholds` is `None` where
/// `(beta, gamma)` is not ferromagnetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub thresholds: Option<Thresholds>,
}

/// Thresholds on the grid `gamma = lo + i * step`, `0 <= i <= (hi - lo) / step`.
pub fn threshold_sweep(beta: f64, lo: f64, hi: f64, step: f64) -> Result<Vec<SweepRow>> {
    if !(step > 0.0 && hi >= lo) {
        return Err(Error::InvalidArgument(format!("bad sweep range [{lo}, {hi}] with step {step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| {
            // round away representation noise so grid values print cleanly
            let gamma = ((lo + i as f64 * step) * 1e12).round() / 1e12;
            let thresholds = SpinParams::new(beta, gamma).ok().map(|p| thresholds(&p));
            SweepRow { gamma, thresholds }
        })
        .collect())
}

/// Minima of the second derivatives of `g(x) = log rho(x)` (boundary
/// log-modulus along direction `x`) and of `h(d) = log lambda*_d`, plus
/// `h'(d*)`, which vanishes exactly when `c*` is the stationary centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub case: RegionCase,
    pub g2_min: f64,
    pub h2_min: f64,
    pub h1_at_d_star: f64,
}

const DIAG_D_MAX: f64 = 50.0;

fn g2(region: &CircularRegion, x: f64) -> f64 {
    match *region {
        CircularRegion::ExteriorOfDisk { center: c, radius: r } => {
            -c * x.cos() * r * r / (r * r - c * c * x.sin().powi(2)).powf(1.5)
        }
        CircularRegion::ClosedDisk { center: c, radius: r } => {
            c * x.cos() * r * r / (r * r - c * c * x.sin().powi(2)).powf(1.5)
        }
        CircularRegion::HalfPlane { .. } => x.cos().powi(-2),
    }
}

fn h1(geometry: &ContractionGeometry, d: f64) -> f64 {
    let a = PI / d;
    match geometry.region {
        CircularRegion::ExteriorOfDisk { center: c, radius: r } | CircularRegion::ClosedDisk { center: c, radius: r } => {
            let s = if geometry.case() == RegionCase::ExteriorOfDisk { 1.0 } else { -1.0 };
            lambda_star_d(geometry, d).ln() / d - s * c * PI * a.sin() / (d * (r * r - c * c * a.sin().powi(2)).sqrt())
        }
        CircularRegion::HalfPlane { bound } => (-bound / a.cos()).ln() - a * a.tan(),
    }
}

fn h2(geometry: &ContractionGeometry, d: f64) -> f64 {
    let a = PI / d;
    match geometry.region {
        CircularRegion::ExteriorOfDisk { center: c, radius: r } | CircularRegion::ClosedDisk { center: c, radius: r } => {
            let s = if geometry.case() == RegionCase::ExteriorOfDisk { 1.0 } else { -1.0 };
            s * a.cos() * c * PI * PI * r * r / (d.powi(3) * (r * r - c * c * a.sin().powi(2)).powf(1.5))
        }
        CircularRegion::HalfPlane { .. } => PI * PI / (d.powi(3) * a.cos().powi(2)),
    }
}

/// Grid evaluation of the convexity claims behind the symmetric minimisers.
///
/// `g''` is sampled on the directions that meet `K` inside `[pi/2, 3pi/2]`,
/// `h''` on the feasible part of `d in [2, 50]`.
pub fn convexity_diagnostics(geometry: &ContractionGeometry, grid: usize) -> ConvexityReport {
    let grid = grid.max(2);
    let w = geometry.region.angular_half_width().unwrap_or(FRAC_PI_2);
    // stay strictly inside where the expressions are singular at the edge
    let w_in = match geometry.region {
        CircularRegion::ExteriorOfDisk { .. } => w,
        _ => w * (1.0 - 1e-9),
    };
    let g2_min = (0..=grid)
        .map(|i| PI - w_in + 2.0 * w_in * i as f64 / grid as f64)
        .map(|x| g2(&geometry.region, x))
        .fold(f64::INFINITY, f64::min);

    let d_lo = match geometry.region {
        // smallest d with pi/d inside the feasible cone
        CircularRegion::ClosedDisk { .. } | CircularRegion::HalfPlane { .. } => (PI / w_in).max(2.0),
        CircularRegion::ExteriorOfDisk { .. } => 2.0,
    };
    let h2_min = (0..=grid)
        .map(|i| d_lo + (DIAG_D_MAX - d_lo) * i as f64 / grid as f64)
        .map(|d| h2(geometry, d))
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min);
    ConvexityReport { case: geometry.case(), g2_min, h2_min, h1_at_d_star: h1(geometry, geometry.d_star) }
}
