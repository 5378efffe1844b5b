//! Numerical optimiser for the extreme moduli of the signed product sets
//! `K_d = (-1)^{d+1} K * ... * K` along a fixed direction.
//!
//! Each factor is pushed to the boundary of `K` and written as
//! `z_i = rho(pi + u_i) e^{i(pi + u_i)}`. The total angle constraint becomes a
//! constraint on `sum u_i`, which pairwise moves `(u_i + s, u_j - s)` preserve
//! exactly. No symmetry of the optimum is assumed: every restart begins at a
//! random feasible point.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{CircularRegion, ContractionGeometry};

pub const DEFAULT_RESTARTS: usize = 64;
const INITIAL_STEP: f64 = 0.25;
const FINAL_STEP: f64 = 1e-10;
const MAX_SWEEPS: usize = 20_000;

/// Extreme-modulus program for the point of `K_d` with argument `psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleProblem {
    pub region: CircularRegion,
    pub d: usize,
    /// Argument of the sought point of `K_d`; `0` is the positive real axis.
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution {
    /// Extreme value of `prod |z_i|`.
    pub value: f64,
    /// Arguments of the factors, in `(-pi, pi]`.
    pub angles: Vec<f64>,
    pub radii: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sense {
    Min,
    Max,
}

impl OracleProblem {
    pub fn new(region: CircularRegion, d: usize, psi: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::DegreeTooSmall { degree: d, min: 2 });
        }
        Ok(OracleProblem { region, d, psi })
    }

    /// Admissible values of `sum u_i`: `psi + pi` modulo `2 pi`, restricted to
    /// `|sum| <= d w` for regions confined to a cone of half-width `w`.
    fn sum_targets(&self) -> Vec<f64> {
        let base = (self.psi + PI).rem_euclid(TAU);
        match self.region.angular_half_width() {
            // the objective is 2pi-periodic in each u_i, one representative suffices
            None => vec![if base > PI { base - TAU } else { base }],
            Some(w) => {
                let span = self.d as f64 * w;
                let mut out = Vec::new();
                let mut k = ((-span - base) / TAU).ceil() as i64;
                loop {
                    let s = base + TAU * k as f64;
                    if s > span + 1e-12 {
                        break;
                    }
                    if s >= -span - 1e-12 {
                        out.push(s.clamp(-span, span));
                    }
                    k += 1;
                }
                out
            }
        }
    }

    fn log_rho(&self, u: f64, sense: Sense) -> f64 {
        let r = match sense {
            Sense::Min => self.region.boundary_polar(PI + u),
            Sense::Max => self.region.boundary_polar_far(PI + u),
        };
        match r {
            Ok(rho) if rho > 0.0 => rho.ln(),
            _ => f64::NAN,
        }
    }

    /// Random feasible point with the given coordinate sum.
    fn random_start(&self, sum: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let d = self.d;
        let w = self.region.angular_half_width();
        let bound = w.unwrap_or(PI);
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-bound..=bound)).collect();
        let mean = v.iter().sum::<f64>() / d as f64;
        let centre = sum / d as f64;
        let mut scale: f64 = 1.0;
        if let Some(w) = w {
            for &x in &v {
                let dev = x - mean;
                if dev > 0.0 {
                    scale = scale.min((w - centre) / dev);
                } else if dev < 0.0 {
                    scale = scale.min((-w - centre) / dev);
                }
            }
            scale = scale.max(0.0);
        }
        v.iter().map(|&x| centre + scale * (x - mean)).collect()
    }

    /// Pairwise sum-preserving pattern search. Stops early once the running
    /// value crosses `stop` (in log scale) in the improving direction.
    fn descend(&self, u: &mut [f64], sense: Sense, stop: Option<f64>) -> f64 {
        let d = self.d;
        let w = self.region.angular_half_width();
        let mut terms: Vec<f64> = u.iter().map(|&x| self.log_rho(x, sense)).collect();
        let sign = if sense == Sense::Min { 1.0 } else { -1.0 };
        let mut step = INITIAL_STEP;
        let reached = |t: f64| match (stop, sense) {
            (Some(s), Sense::Min) => t <= s,
            (Some(s), Sense::Max) => t >= s,
            _ => false,
        };
        let mut total: f64 = terms.iter().sum();
        if reached(total) {
            return total;
        }
        let mut sweeps = 0;
        while step > FINAL_STEP && sweeps < MAX_SWEEPS {
            sweeps += 1;
            let noise = 4.0 * f64::EPSILON * (1.0 + total.abs());
            let mut improved = false;
            for i in 0..d {
                for j in 0..d {
                    if i == j {
                        continue;
                    }
                    let (ui, uj) = (u[i] + step, u[j] - step);
                    if let Some(w) = w {
                        if ui.abs() > w || uj.abs() > w {
                            continue;
                        }
                    }
                    let (ti, tj) = (self.log_rho(ui, sense), self.log_rho(uj, sense));
                    if !(ti.is_finite() && tj.is_finite()) {
                        continue;
                    }
                    let delta = ti + tj - terms[i] - terms[j];
                    if sign * delta < -noise {
                        u[i] = ui;
                        u[j] = uj;
                        terms[i] = ti;
                        terms[j] = tj;
                        total += delta;
                        improved = true;
                        if reached(total) {
                            return terms.iter().sum();
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        terms.iter().sum()
    }

    fn solve(&self, sense: Sense, restarts: usize, seed: u64, stop: Option<f64>) -> Result<OracleSolution> {
        let targets = self.sum_targets();
        if targets.is_empty() {
            return Err(Error::Infeasible { target: self.psi, d: self.d });
        }
        let restarts = restarts.max(1);
        let runs: Vec<(f64, Vec<f64>)> = (0..restarts)
            .into_par_iter()
            .map(|idx| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
                let sum = targets[idx % targets.len()];
                let mut u = self.random_start(sum, &mut rng);
                let value = self.descend(&mut u, sense, stop);
                (value, u)
            })
            .collect();
        let better = |a: f64, b: f64| if sense == Sense::Min { a < b } else { a > b };
        let (log_value, u) = runs
            .into_iter()
            .filter(|(v, _)| v.is_finite())
            .reduce(|best, cur| if better(cur.0, best.0) { cur } else { best })
            .ok_or(Error::Infeasible { target: self.psi, d: self.d })?;
        let angles = u.iter().map(|&x| wrap_angle(PI + x)).collect();
        let radii = u.iter().map(|&x| self.log_rho(x, sense).exp()).collect();
        Ok(OracleSolution { value: log_value.exp(), angles, radii })
    }
}

fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Minimum of `prod |z_i|` over factors in `K` whose signed product has argument `psi`.
pub fn oracle_min_product(problem: &OracleProblem, restarts: usize, seed: u64) -> Result<OracleSolution> {
    problem.solve(Sense::Min, restarts, seed, None)
}

/// Maximum counterpart; infinite for the unbounded regions.
pub fn oracle_max_product(problem: &OracleProblem, restarts: usize, seed: u64) -> Result<OracleSolution> {
    if !matches!(problem.region, CircularRegion::ClosedDisk { .. }) {
        if problem.sum_targets().is_empty() {
            return Err(Error::Infeasible { target: problem.psi, d: problem.d });
        }
        return Ok(OracleSolution { value: f64::INFINITY, angles: vec![], radii: vec![] });
    }
    problem.solve(Sense::Max, restarts, seed, None)
}

/// Membership of `z` in `K_d`, accepting moduli within relative `slack` of
/// the attainable interval.
///
/// A symmetric factorisation `z_i = w` with `w^d = (-1)^{d+1} z` is tried
/// first as an explicit witness; otherwise the oracle decides.
pub fn kd_contains(geometry: &ContractionGeometry, d: usize, z: Complex64, restarts: usize, seed: u64, slack: f64) -> bool {
    if d < 2 {
        return false;
    }
    let target = if d % 2 == 1 { z } else { -z };
    let modulus = z.norm();
    if modulus == 0.0 {
        return false;
    }
    let root = target.powf(1.0 / d as f64);
    for k in 0..d {
        let w = root * Complex64::from_polar(1.0, TAU * k as f64 / d as f64);
        if geometry.region.contains(w) {
            return true;
        }
    }
    let Ok(problem) = OracleProblem::new(geometry.region, d, z.arg()) else { return false };
    let lo = (modulus * (1.0 + slack)).ln();
    let min = match problem.solve(Sense::Min, restarts, seed, Some(lo)) {
        Ok(s) => s.value,
        Err(_) => return false,
    };
    if min > modulus * (1.0 + slack) {
        return false;
    }
    if let CircularRegion::ClosedDisk { .. } = geometry.region {
        let hi = (modulus * (1.0 - slack)).ln();
        return match problem.solve(Sense::Max, restarts, seed, Some(hi)) {
            Ok(s) => s.value >= modulus * (1.0 - slack),
            Err(_) => false,
        };
    }
    true
}

/// Relative distance of `|z|` outside the attainable modulus interval of
/// `K_d` in direction `arg z`; non-positive means `z` is a member.
pub fn kd_excess(geometry: &ContractionGeometry, d: usize, z: Complex64, restarts: usize, seed: u64) -> f64 {
    let Ok(problem) = OracleProblem::new(geometry.region, d, z.arg()) else { return f64::INFINITY };
    let modulus = z.norm();
    let Ok(min) = problem.solve(Sense::Min, restarts, seed, None) else { return f64::INFINITY };
    let mut excess = min.value / modulus - 1.0;
    if let CircularRegion::ClosedDisk { .. } = geometry.region {
        if let Ok(max) = problem.solve(Sense::Max, restarts, seed, None) {
            excess = excess.max(1.0 - max.value / modulus);
        }
    }
    excess
}

/// Boundary samples of `K_d`: the inner boundary `m^d(psi) e^{i psi}` on a
/// uniform grid of `psi`, plus for the disk case the outer boundary and the
/// two radial edges at the extreme attainable arguments.
pub fn kd_boundary_cloud(geometry: &ContractionGeometry, d: usize, samples: usize, restarts: usize, seed: u64) -> Result<Vec<Complex64>> {
    if d < 2 {
        return Err(Error::DegreeTooSmall { degree: d, min: 2 });
    }
    let samples = samples.max(1);
    let mut psis: Vec<f64> = (0..samples).map(|i| TAU * i as f64 / samples as f64).collect();
    let span = geometry.region.angular_half_width().map(|w| d as f64 * w);
    if let Some(span) = span {
        if span < PI {
            psis.retain(|&p| (p - PI).abs() <= span);
            psis.push(PI - span);
            psis.push(PI + span);
            psis.sort_by(f64::total_cmp);
        }
    }
    let disk = matches!(geometry.region, CircularRegion::ClosedDisk { .. });
    let rows: Vec<Vec<Complex64>> = psis
        .par_iter()
        .map(|&psi| {
            let problem = OracleProblem { region: geometry.region, d, psi };
            let mut pts = Vec::new();
            let Ok(min) = problem.solve(Sense::Min, restarts, seed, None) else { return pts };
            pts.push(Complex64::from_polar(min.value, psi));
            if disk {
                if let Ok(max) = problem.solve(Sense::Max, restarts, seed, None) {
                    pts.push(Complex64::from_polar(max.value, psi));
                    let edge = span.is_some_and(|s| s < PI && ((psi - PI).abs() - s).abs() < 1e-12);
                    if edge {
                        for k in 1..32 {
                            let rho = min.value + (max.value - min.value) * k as f64 / 32.0;
                            pts.push(Complex64::from_polar(rho, psi));
                        }
                    }
                }
            }
            pts
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}
