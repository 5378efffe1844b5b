//! Empirical checks of zero-freeness: root loci against a strip around the
//! field interval and against the product regions `K_d`, plus stability spot
//! checks for the polar-form and contraction steps.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{build_geometry, CircularRegion, ContractionGeometry};
use crate::graph::{random_min2_graph, FieldVector, Graph};
use crate::oracle::{kd_boundary_cloud, kd_contains, kd_excess};
use crate::poly::{polar_form_eval, polar_form_weights, ComplexPoly};
use crate::roots::{roots, DEFAULT_ROOT_TOL};
use crate::spin::{z_coeffs_ray, SpinParams};

pub const STRIP_FLOOR: f64 = 1e-6;
pub const MEMBERSHIP_SLACK: f64 = 1e-4;
const CLOUD_SAMPLES: usize = 360;
const CLOUD_RESTARTS: usize = 16;
const MEMBERSHIP_RESTARTS: usize = 32;

/// Closed rectangle `{ |Im z| <= delta, -delta <= Re z <= lambda' + delta }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripSpec {
    pub lambda_prime: f64,
    pub delta: f64,
}

impl StripSpec {
    pub fn contains(&self, z: Complex64) -> bool {
        self.distance(z) == 0.0
    }

    /// Euclidean distance to the rectangle, zero inside.
    pub fn distance(&self, z: Complex64) -> f64 {
        let dx = (-self.delta - z.re).max(z.re - self.lambda_prime - self.delta).max(0.0);
        let dy = (z.im.abs() - self.delta).max(0.0);
        dx.hypot(dy)
    }

    /// The same strip in units where the interval is `[0, 1]`.
    pub fn normalized(&self) -> StripSpec {
        StripSpec { lambda_prime: 1.0, delta: self.delta / self.lambda_prime }
    }
}

fn segment_distance(p: Complex64, length: f64) -> f64 {
    if p.re < 0.0 {
        p.norm()
    } else if p.re > length {
        (p - length).norm()
    } else {
        p.im.abs()
    }
}

type CloudKey = (u64, u64, usize);

fn cached_cloud(geometry: &ContractionGeometry, d: usize) -> Result<Arc<Vec<Complex64>>> {
    static CACHE: OnceLock<Mutex<HashMap<CloudKey, Arc<Vec<Complex64>>>>> = OnceLock::new();
    let key = (geometry.params.beta().to_bits(), geometry.params.gamma().to_bits(), d);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cloud cache poisoned").get(&key) {
        return Ok(hit.clone());
    }
    let cloud = Arc::new(kd_boundary_cloud(geometry, d, CLOUD_SAMPLES, CLOUD_RESTARTS, 0)?);
    cache.lock().expect("cloud cache poisoned").insert(key, cloud.clone());
    Ok(cloud)
}

/// Distance from `[0, length]` to `K_d`, estimated from its sampled boundary.
pub fn kd_segment_distance(geometry: &ContractionGeometry, d: usize, length: f64) -> Result<f64> {
    let cloud = cached_cloud(geometry, d)?;
    Ok(cloud.iter().map(|&p| segment_distance(p, length)).fold(f64::INFINITY, f64::min))
}

/// Strip around `[0, safety * lambda*]` whose half-width is half the
/// distance from the interval to the nearest `K_d`, `d` ranging over the
/// degrees present in `g`.
///
/// Degrees whose product region provably stays farther away than the best
/// distance found so far (every point of `K_d` has modulus at least
/// `mu^d`, `mu` the least modulus on `K`) are skipped.
pub fn default_strip(geometry: &ContractionGeometry, g: &Graph, safety: f64) -> Result<StripSpec> {
    if g.n() > 0 && g.min_degree() < 2 {
        return Err(Error::DegreeTooSmall { degree: g.min_degree(), min: 2 });
    }
    if safety.is_nan() || safety <= 0.0 {
        return Err(Error::InvalidArgument(format!("safety factor {safety} must be positive")));
    }
    let degrees = g.degree_set();
    strip_for_degrees(geometry, &degrees, safety * geometry.lambda_star)
}

/// As [`default_strip`], for an explicit interval end and degree set.
pub fn strip_for_degrees(geometry: &ContractionGeometry, degrees: &[usize], lambda_prime: f64) -> Result<StripSpec> {
    let mu = geometry.region.min_modulus();
    let mut best = f64::INFINITY;
    for &d in degrees {
        if d < 2 {
            continue;
        }
        if mu.powi(d as i32) - lambda_prime >= best {
            continue;
        }
        best = best.min(kd_segment_distance(geometry, d, lambda_prime)?);
    }
    if degrees.iter().all(|&d| d < 2) {
        // no contraction constraint: fall back to the distance to K itself
        best = (mu - lambda_prime).abs();
    }
    let delta = 0.5 * best;
    if delta.is_nan() || delta < STRIP_FLOOR {
        return Err(Error::DegenerateStrip { delta, floor: STRIP_FLOOR });
    }
    Ok(StripSpec { lambda_prime, delta })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootReport {
    #[serde(serialize_with = "ser_points")]
    pub roots: Vec<Complex64>,
    pub min_strip_distance: f64,
    pub strip_distances: Vec<f64>,
    pub containment: Vec<bool>,
    /// Per root, relative modulus excess beyond the nearest `K_d`
    /// (zero for contained roots).
    pub containment_excess: Vec<f64>,
    pub pass: bool,
}

fn ser_points<S: serde::Serializer>(pts: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = pts.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(s)
}

/// Roots of `Z(G; lambda)` under a uniform field, checked against the strip
/// and against the union of `K_d` over the degrees of `g`.
pub fn root_locus_check(g: &Graph, params: &SpinParams, strip: &StripSpec) -> Result<RootReport> {
    if g.n() == 0 || g.min_degree() < 2 {
        return Err(Error::DegreeTooSmall { degree: g.min_degree(), min: 2 });
    }
    let geometry = build_geometry(params);
    let coeffs = z_coeffs_ray(g, params, &FieldVector::uniform(g.n(), 1.0), g.n())?;
    let zs = roots(&coeffs, DEFAULT_ROOT_TOL)?;
    let degrees = g.degree_set();
    let strip_distances: Vec<f64> = zs.iter().map(|&z| strip.distance(z)).collect();
    let containment: Vec<bool> = zs
        .iter()
        .map(|&z| degrees.iter().any(|&d| kd_contains(&geometry, d, z, MEMBERSHIP_RESTARTS, 0, MEMBERSHIP_SLACK)))
        .collect();
    let containment_excess = zs
        .iter()
        .zip(&containment)
        .map(|(&z, &inside)| {
            if inside {
                0.0
            } else {
                degrees.iter().map(|&d| kd_excess(&geometry, d, z, MEMBERSHIP_RESTARTS, 0)).fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    let min_strip_distance = strip_distances.iter().copied().fold(f64::INFINITY, f64::min);
    let pass = strip_distances.iter().all(|&d| d > 0.0) && containment.iter().all(|&c| c);
    Ok(RootReport { roots: zs, min_strip_distance, strip_distances, containment, containment_excess, pass })
}

/// Outcome of a polar-form stability probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GwsReport {
    pub pass: bool,
    pub min_modulus: f64,
    /// Sample at which the polar form fell to the floor, if any.
    #[serde(serialize_with = "ser_opt_points")]
    pub witness: Option<Vec<Complex64>>,
}

fn ser_opt_points<S: serde::Serializer>(pts: &Option<Vec<Complex64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    pts.as_ref().map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).serialize(s)
}

/// Uniform sample from a bounded piece of the complement of `region`.
fn sample_complement(region: &CircularRegion, rng: &mut ChaCha8Rng) -> Complex64 {
    match *region {
        CircularRegion::ExteriorOfDisk { center, radius } => loop {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if z.norm() < 1.0 {
                return center + z * radius;
            }
        },
        CircularRegion::ClosedDisk { center, radius } => {
            let half = 3.0 * center.abs().max(radius);
            loop {
                let z = Complex64::new(center + rng.gen_range(-half..half), rng.gen_range(-half..half));
                if !region.contains(z) {
                    return z;
                }
            }
        }
        CircularRegion::HalfPlane { bound } => {
            let span = 3.0 * (1.0 + bound.abs());
            loop {
                let z = Complex64::new(bound + rng.gen_range(0.0..span), rng.gen_range(-span..span));
                if !region.contains(z) {
                    return z;
                }
            }
        }
    }
}

/// Samples points of `region`, biased towards its boundary.
pub fn sample_region(region: &CircularRegion, rng: &mut ChaCha8Rng) -> Complex64 {
    match *region {
        CircularRegion::ExteriorOfDisk { center, radius } => {
            let rho = radius * (1.0 + rng.gen_range(0.0f64..1.0).powi(2) * 2.0);
            center + Complex64::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU))
        }
        CircularRegion::ClosedDisk { center, radius } => {
            let rho = radius * rng.gen_range(0.0f64..1.0).sqrt();
            center + Complex64::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU))
        }
        CircularRegion::HalfPlane { bound } => {
            let scale = 1.0 + bound.abs();
            Complex64::new(bound - scale * rng.gen_range(0.0f64..1.0).powi(2), scale * rng.gen_range(-2.0..2.0))
        }
    }
}

/// Evaluates the `d`-th polar form of `p` at random points of the complement
/// of `region`; `p` must have all its roots in `region`.
pub fn gws_spot_check(p: &ComplexPoly, d: usize, region: &CircularRegion, samples: usize, seed: u64) -> Result<GwsReport> {
    let weights = polar_form_weights(p, d)?;
    if p.trimmed().degree() >= 1 {
        for z in roots(p, DEFAULT_ROOT_TOL)? {
            // boundary roots count as inside up to rounding
            if region.signed_distance(z) > 1e-9 * (1.0 + z.norm()) {
                return Err(Error::RootOutsideRegion { root: z });
            }
        }
    }
    let floor = 1e-12 * weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_modulus = f64::INFINITY;
    let mut witness = None;
    for _ in 0..samples {
        let zs: Vec<Complex64> = (0..d).map(|_| sample_complement(region, &mut rng)).collect();
        let value = polar_form_eval(&weights, &zs).norm();
        if value < min_modulus {
            min_modulus = value;
            if value <= floor {
                witness = Some(zs);
            }
        }
    }
    Ok(GwsReport { pass: witness.is_none(), min_modulus, witness })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsanoReport {
    pub pass: bool,
    pub trials: usize,
    pub failures: usize,
}

/// Draws `d` points of `K`, builds the monic polynomial with those roots and
/// contracts it to `a_0 + a_d z`; the root `-a_0 / a_d` must lie in `K_d`.
pub fn asano_spot_check(geometry: &ContractionGeometry, d: usize, trials: usize, seed: u64) -> Result<AsanoReport> {
    if d < 2 {
        return Err(Error::DegreeTooSmall { degree: d, min: 2 });
    }
    let failures = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let pts: Vec<Complex64> = (0..d).map(|_| sample_region(&geometry.region, &mut rng)).collect();
            let p = ComplexPoly::from_roots(&pts);
            let root = -p[0] / p[d];
            !kd_contains(geometry, d, root, MEMBERSHIP_RESTARTS, seed, MEMBERSHIP_SLACK)
        })
        .count();
    Ok(AsanoReport { pass: failures == 0, trials, failures })
}

/// Random-graph sweep for [`root_locus_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub count: usize,
    pub n_max: usize,
    pub deg_max: usize,
    pub params: Vec<SpinParams>,
    pub seed: u64,
    pub safety: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCase {
    pub index: usize,
    pub beta: f64,
    pub gamma: f64,
    pub n: usize,
    pub edges: usize,
    pub degrees: Vec<usize>,
    pub strip: Option<StripSpec>,
    pub min_strip_distance: Option<f64>,
    pub worst_containment_excess: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub total: usize,
    pub passed: usize,
    pub worst_strip_distance: Option<f64>,
    pub worst_containment_excess: Option<f64>,
    pub cases: Vec<SweepCase>,
}

/// The `i`-th sweep graph: `n` uniform in `4..=n_max`, degrees in `2..=deg_max`.
pub fn sweep_graph(i: usize, n_max: usize, deg_max: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let lo = 4.min(n_max);
    let n = rng.gen_range(lo..=n_max.max(lo));
    random_min2_graph(n, deg_max, rng.gen())
}

pub fn verify_sweep(config: &SweepConfig) -> Result<SweepSummary> {
    let jobs: Vec<(usize, SpinParams)> =
        (0..config.count).flat_map(|i| config.params.iter().map(move |p| (i, *p))).collect();
    let cases: Vec<SweepCase> = jobs
        .par_iter()
        .map(|&(i, params)| -> Result<SweepCase> {
            let g = sweep_graph(i, config.n_max, config.deg_max, config.seed)?;
            let mut case = SweepCase {
                index: i,
                beta: params.beta(),
                gamma: params.gamma(),
                n: g.n(),
                edges: g.edge_count(),
                degrees: g.degree_set(),
                strip: None,
                min_strip_distance: None,
                worst_containment_excess: None,
                pass: false,
                error: None,
            };
            let geometry = build_geometry(&params);
            let strip = match default_strip(&geometry, &g, config.safety) {
                Ok(s) => s,
                Err(e) => {
                    case.error = Some(e.to_string());
                    return Ok(case);
                }
            };
            case.strip = Some(strip);
            let report = root_locus_check(&g, &params, &strip)?;
            case.min_strip_distance = Some(report.min_strip_distance);
            case.worst_containment_excess = Some(report.containment_excess.iter().copied().fold(0.0, f64::max));
            case.pass = report.pass;
            Ok(case)
        })
        .collect::<Result<_>>()?;
    let passed = cases.iter().filter(|c| c.pass).count();
    let worst_strip_distance = cases.iter().filter_map(|c| c.min_strip_distance).reduce(f64::min);
    let worst_containment_excess = cases.iter().filter_map(|c| c.worst_containment_excess).reduce(f64::max);
    Ok(SweepSummary { total: cases.len(), passed, worst_strip_distance, worst_containment_excess, cases })
}
