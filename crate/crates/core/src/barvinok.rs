//! Interpolation-based approximation of `Z(G; lambda)` for nonnegative fields.
//!
//! With `f(t) = Z(G; t * lambda)` and a polynomial `phi` mapping the unit disk
//! into a zero-free neighbourhood of `[0, 1]` with `phi(0) = 0`, `phi(1) = 1`,
//! the composition `h = f o phi` has no zeros in a disk of radius `rho > 1`.
//! Then `log Z = log h(0) + sum_j L_j` where `L_j` are the Taylor coefficients
//! of `log h`, and `|L_j| <= D / (j rho^j)` for `D = deg h` bounds the error
//! of truncating after `m` terms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::build_geometry;
use crate::graph::{prune_leaves, FieldVector, Graph};
use crate::poly::{compose_truncate, log_series, ComplexPoly, LogSeries};
use crate::roots::{roots, DEFAULT_ROOT_TOL};
use crate::spin::{log_series_connected, z_coeffs_ray, SpinParams, DEFAULT_CONFIG_BUDGET};
use crate::verify::strip_for_degrees;

pub const DEFAULT_COVERING_BUDGET: usize = 256;
/// Boundary samples used to certify a covering map.
pub const COVERING_SAMPLES: usize = 10_000;
const SCREEN_SAMPLES: usize = 1024;
const ALPHA_GRID: usize = 64;
const ROOT_GUIDED_DEGREES: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];
const ROOT_GUIDED_ALPHAS: usize = 40;
/// Candidates must certify at least this zero-free radius.
const MIN_RHO: f64 = 1.01;
const RHO_FLOOR: f64 = 1.0 + 1e-9;
const MAX_ORDER: usize = 10_000;

/// `phi(w) = lambda' * sum_{j<=N} (alpha w)^j / j / sum_{j<=N} alpha^j / j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringMap {
    pub poly: ComplexPoly,
    pub alpha: f64,
    pub degree: usize,
    /// Largest sampled distance of the boundary image from the strip.
    pub excursion: f64,
}

/// Real coefficients `c_0..c_N` of the covering family, normalised to `phi(1) = scale`.
pub fn covering_coefficients(alpha: f64, degree: usize, scale: f64) -> Vec<f64> {
    let mut c = vec![0.0; degree + 1];
    let mut pow = 1.0;
    for (j, slot) in c.iter_mut().enumerate().skip(1) {
        pow *= alpha;
        *slot = pow / j as f64;
    }
    let total: f64 = c.iter().sum();
    c.iter().map(|x| scale * x / total).collect()
}

fn eval_real_coeffs(c: &[f64], w: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &x| acc * w + x)
}

/// Distance of `phi(radius e^{i theta})` from the strip `{|Im| <= delta,
/// -delta <= Re <= 1 + delta}`, maximised over a grid of `theta` in `[0, pi]`
/// (real coefficients make the image symmetric).
fn strip_excursion(c: &[f64], radius: f64, delta: f64, samples: usize) -> f64 {
    (0..=samples)
        .map(|i| {
            let w = Complex64::from_polar(radius, std::f64::consts::PI * i as f64 / samples as f64);
            let z = eval_real_coeffs(c, w);
            let dx = (-delta - z.re).max(z.re - 1.0 - delta).max(0.0);
            let dy = (z.im.abs() - delta).max(0.0);
            dx.hypot(dy)
        })
        .fold(0.0, f64::max)
}

fn degree_ladder(budget: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut base = 1;
    while base <= budget {
        out.push(base);
        let half = base + base / 2;
        if base >= 2 && half <= budget {
            out.push(half);
        }
        base *= 2;
    }
    if out.last() != Some(&budget) && budget > 0 {
        out.push(budget);
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn alpha_grid() -> Vec<f64> {
    // dense towards 1, where the image hugs the segment
    (0..ALPHA_GRID).map(|i| 1.0 - 0.95 * (5e-4f64 / 0.95).powf(i as f64 / (ALPHA_GRID - 1) as f64)).collect()
}

/// Smallest member of the covering family whose sampled boundary image lies
/// in the `delta`-strip of `[0, lambda']`; degrees escalate up to `budget`.
pub fn covering_map(delta: f64, lambda_prime: f64, budget: usize) -> Result<CoveringMap> {
    if !(delta > 0.0 && lambda_prime > 0.0) {
        return Err(Error::InvalidArgument(format!("covering map needs delta > 0 and lambda' > 0, got {delta}, {lambda_prime}")));
    }
    let dh = delta / lambda_prime;
    let finish = |alpha: f64, degree: usize, c: Vec<f64>| CoveringMap {
        poly: ComplexPoly::from_reals(&c),
        alpha,
        degree,
        excursion: 0.0,
    };
    if dh >= 1.0 {
        return Ok(finish(1.0, 1, covering_coefficients(1.0, 1, lambda_prime)));
    }
    let alphas = alpha_grid();
    let mut best = (f64::INFINITY, 0.0, 0);
    for degree in degree_ladder(budget) {
        let screened: Vec<(f64, f64)> = alphas
            .par_iter()
            .map(|&a| (a, strip_excursion(&covering_coefficients(a, degree, 1.0), 1.0, dh, SCREEN_SAMPLES)))
            .collect();
        for (alpha, exc) in screened {
            if exc < best.0 {
                best = (exc, alpha, degree);
            }
            if exc == 0.0 {
                let c = covering_coefficients(alpha, degree, 1.0);
                if strip_excursion(&c, 1.0, dh, COVERING_SAMPLES) == 0.0 {
                    return Ok(finish(alpha, degree, covering_coefficients(alpha, degree, lambda_prime)));
                }
            }
        }
    }
    Err(Error::CoveringBudget { budget, alpha: best.1, degree: best.2, excursion: best.0 * lambda_prime })
}

/// Smallest root modulus of `h`, floored at `1 + 1e-9`.
pub fn rho_estimate(h: &ComplexPoly) -> Result<f64> {
    if h.coeff(0).norm() == 0.0 {
        return Err(Error::ZeroConstantTerm);
    }
    if h.trimmed().degree() == 0 {
        return Ok(f64::INFINITY);
    }
    let rho = roots(h, DEFAULT_ROOT_TOL)?.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if rho < RHO_FLOOR {
        log::warn!("zero-free radius estimate {rho} floored at {RHO_FLOOR}");
        return Ok(RHO_FLOOR);
    }
    Ok(rho)
}

/// Zero-free radius of `f o phi` from the roots `xi` of `f`: the least `|w|`
/// with `phi(w) = xi`, for the covering-family member `(alpha, degree)`
/// normalised to `phi(1) = 1`.
///
/// Solved in `v = alpha w`, where the coefficients become `1 / (j S)` and
/// stay well scaled for every `alpha`.
pub fn rho_from_roots(f_roots: &[Complex64], alpha: f64, degree: usize) -> Result<f64> {
    let total: f64 = (1..=degree).map(|j| alpha.powi(j as i32) / j as f64).sum();
    let per_root: Vec<f64> = f_roots
        .par_iter()
        .map(|&xi| -> Result<f64> {
            let p: Vec<Complex64> = (0..=degree)
                .map(|j| if j == 0 { -xi } else { Complex64::new(1.0 / (j as f64 * total), 0.0) })
                .collect();
            Ok(roots(&ComplexPoly(p), DEFAULT_ROOT_TOL)?.iter().map(|v| v.norm() / alpha).fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<_>>()?;
    Ok(per_root.into_iter().fold(f64::INFINITY, f64::min))
}

/// Largest radius (to 1e-6) whose circle `phi` still maps into the strip.
fn rho_from_strip(phi: &[f64], delta: f64) -> f64 {
    let inside = |r: f64| strip_excursion(phi, r, delta, 2048) == 0.0;
    if !inside(1.0) {
        return RHO_FLOOR;
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    while inside(hi) && hi < 64.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.max(RHO_FLOOR)
}

/// `D rho^{-m} / ((1 - 1/rho) m)`.
pub fn tail_bound(degree: usize, rho: f64, m: usize) -> f64 {
    degree as f64 * rho.powi(-(m as i32)) / ((1.0 - 1.0 / rho) * m as f64)
}

/// Least `m >= 1` with `tail_bound <= target`.
pub fn minimal_order(degree: usize, rho: f64, target: f64) -> Option<usize> {
    (1..=MAX_ORDER).find(|&m| tail_bound(degree, rho, m) <= target)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientRoute {
    /// Coefficients of `f` by subset enumeration.
    Ray,
    /// `log f` from connected induced subgraphs.
    Connected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoveringKind {
    /// No approximation needed: the answer is exact.
    Exact,
    /// Image of the disk certified inside the zero-free strip.
    Strip,
    /// Family member chosen by the root-derived zero-free radius.
    RootGuided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationPlan {
    pub k: usize,
    #[serde(rename = "N")]
    pub n_cover: usize,
    pub m: usize,
    pub alpha: f64,
    pub rho_estimate: f64,
    pub epsilon: f64,
    pub covering: CoveringKind,
    /// Strip half-width around `[0, 1]` in units of the largest field.
    pub delta: Option<f64>,
    pub lambda_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub value: Complex64,
    pub plan: TruncationPlan,
    pub tail_bound: f64,
    pub prune_multiplier: Complex64,
    /// `|sum_{m < j <= 2m} L_j|`, the next block of the series.
    pub tail_measured: f64,
    pub route: CoefficientRoute,
}

impl Serialize for ApproxResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ApproxResult", 14)?;
        st.serialize_field("value", &self.value.re)?;
        st.serialize_field("value_im", &self.value.im)?;
        st.serialize_field("k", &self.plan.k)?;
        st.serialize_field("N", &self.plan.n_cover)?;
        st.serialize_field("m", &self.plan.m)?;
        st.serialize_field("alpha", &self.plan.alpha)?;
        st.serialize_field("rho", &self.plan.rho_estimate)?;
        st.serialize_field("tail_bound", &self.tail_bound)?;
        st.serialize_field("prune_multiplier", &[self.prune_multiplier.re, self.prune_multiplier.im])?;
        st.serialize_field("epsilon", &self.plan.epsilon)?;
        st.serialize_field("covering", &self.plan.covering)?;
        st.serialize_field("delta", &self.plan.delta)?;
        st.serialize_field("tail_measured", &self.tail_measured)?;
        st.serialize_field("route", &self.route)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxOptions {
    /// `None` picks `Ray` when the reduced graph is within the enumeration budget.
    pub route: Option<CoefficientRoute>,
    pub covering_budget: usize,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions { route: None, covering_budget: DEFAULT_COVERING_BUDGET }
    }
}

pub fn approx_z(g: &Graph, params: &SpinParams, fields: &FieldVector, epsilon: f64) -> Result<ApproxResult> {
    approx_z_with(g, params, fields, epsilon, &ApproxOptions::default())
}

struct Candidate {
    alpha: f64,
    degree: usize,
    rho: f64,
    m: usize,
    kind: CoveringKind,
}

pub fn approx_z_with(
    g: &Graph,
    params: &SpinParams,
    fields: &FieldVector,
    epsilon: f64,
    options: &ApproxOptions,
) -> Result<ApproxResult> {
    fields.check_len(g)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !fields.is_nonnegative_real() {
        return Err(Error::InvalidArgument("approximation needs nonnegative real fields".into()));
    }
    let geometry = build_geometry(params);
    let field_max = fields.max_real();
    if field_max >= geometry.lambda_star {
        return Err(Error::OutOfRegime { field: field_max, lambda_star: geometry.lambda_star });
    }

    let pruned = prune_leaves(g, fields, params)?;
    let reduced = &pruned.graph;
    let n = reduced.n();
    let log_f0 = params.beta().ln() * reduced.edge_count() as f64;
    let lambda_max = pruned.fields.max_real();
    let exact = |k: usize| ApproxResult {
        value: pruned.multiplier * log_f0.exp(),
        plan: TruncationPlan {
            k,
            n_cover: 0,
            m: 0,
            alpha: 0.0,
            rho_estimate: f64::INFINITY,
            epsilon,
            covering: CoveringKind::Exact,
            delta: None,
            lambda_max,
        },
        tail_bound: 0.0,
        prune_multiplier: pruned.multiplier,
        tail_measured: 0.0,
        route: CoefficientRoute::Ray,
    };
    if n == 0 || lambda_max == 0.0 {
        return Ok(exact(0));
    }

    let enumerable = n < 64 && (1u128 << n) <= DEFAULT_CONFIG_BUDGET;
    let route = options.route.unwrap_or(if enumerable { CoefficientRoute::Ray } else { CoefficientRoute::Connected });
    let f = if enumerable { Some(z_coeffs_ray(reduced, params, &pruned.fields, n)?) } else { None };
    if route == CoefficientRoute::Ray && f.is_none() {
        return Err(Error::OverBudget { what: "coefficient enumeration", needed: 1u128 << n.min(127), budget: DEFAULT_CONFIG_BUDGET });
    }
    let f_roots = match &f {
        Some(f) => Some(roots(f, DEFAULT_ROOT_TOL)?),
        None => None,
    };

    // strip around [0, 1] in units of lambda_max
    let strip = strip_for_degrees(&geometry, &reduced.degree_set(), lambda_max).ok().map(|s| s.normalized());
    let target = epsilon / 2.0;
    let mut candidates = Vec::new();
    if let Some(strip) = strip {
        match covering_map(strip.delta, 1.0, options.covering_budget) {
            Ok(cov) => {
                let rho = match &f_roots {
                    Some(r) => rho_from_roots(r, cov.alpha, cov.degree)?,
                    None => rho_from_strip(&covering_coefficients(cov.alpha, cov.degree, 1.0), strip.delta),
                };
                if let Some(m) = minimal_order(n * cov.degree, rho.max(RHO_FLOOR), target) {
                    candidates.push(Candidate { alpha: cov.alpha, degree: cov.degree, rho, m, kind: CoveringKind::Strip });
                }
            }
            Err(e) => log::info!("strip covering map unavailable: {e}"),
        }
    }
    if let Some(f_roots) = &f_roots {
        let grid: Vec<(usize, f64)> = ROOT_GUIDED_DEGREES
            .iter()
            .filter(|&&d| d <= options.covering_budget.max(1))
            .flat_map(|&d| {
                let alphas: Vec<f64> = if d == 1 {
                    vec![1.0]
                } else {
                    (0..ROOT_GUIDED_ALPHAS).map(|i| 0.05 + 0.945 * i as f64 / (ROOT_GUIDED_ALPHAS - 1) as f64).collect()
                };
                alphas.into_iter().map(move |a| (d, a))
            })
            .collect();
        let found: Vec<Option<Candidate>> = grid
            .par_iter()
            .map(|&(degree, alpha)| {
                let rho = rho_from_roots(f_roots, alpha, degree).ok()?;
                if rho <= MIN_RHO {
                    return None;
                }
                let m = minimal_order(n * degree, rho, target)?;
                (m <= n * degree).then_some(Candidate { alpha, degree, rho, m, kind: CoveringKind::RootGuided })
            })
            .collect();
        candidates.extend(found.into_iter().flatten());
    }
    let best = candidates
        .into_iter()
        .reduce(|a, b| if (b.m, b.degree) < (a.m, a.degree) { b } else { a })
        .ok_or(Error::CoveringBudget {
            budget: options.covering_budget,
            alpha: 0.0,
            degree: 0,
            excursion: f64::INFINITY,
        })?;

    let phi = ComplexPoly::from_reals(&covering_coefficients(best.alpha, best.degree, 1.0));
    let m = best.m;
    let series: LogSeries = match route {
        CoefficientRoute::Ray => {
            let h = compose_truncate(f.as_ref().expect("ray route has coefficients"), &phi, 2 * m);
            log_series(&h, 2 * m)?
        }
        CoefficientRoute::Connected => {
            let lf = log_series_connected(reduced, params, &pruned.fields, 2 * m)?;
            let composed = compose_truncate(&lf.as_poly(), &phi, 2 * m);
            LogSeries { constant: lf.constant, coeffs: composed.0[1..].to_vec() }
        }
    };
    let head: Complex64 = series.coeffs[..m].iter().sum();
    let tail_measured = series.coeffs[m..].iter().sum::<Complex64>().norm();
    let value = pruned.multiplier * (Complex64::new(log_f0, 0.0) + head).exp();
    Ok(ApproxResult {
        value,
        plan: TruncationPlan {
            k: n,
            n_cover: best.degree,
            m,
            alpha: best.alpha,
            rho_estimate: best.rho,
            epsilon,
            covering: best.kind,
            delta: strip.map(|s| s.delta),
            lambda_max,
        },
        tail_bound: tail_bound(n * best.degree, best.rho, m),
        prune_multiplier: pruned.multiplier,
        tail_measured,
        route,
    })
}
