//! All-roots solver: Aberth–Ehrlich simultaneous iteration with a closed
//! form for quadratics.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::ComplexPoly;

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 1000;

/// Residual scale used by the acceptance contract:
/// `|p(z)| <= tol * max|c_i| * max(1, |z|)^deg`.
pub fn residual_ratio(p: &ComplexPoly, z: Complex64) -> f64 {
    let deg = p.degree() as i32;
    p.eval(z).norm() / (p.max_abs_coeff() * z.norm().max(1.0).powi(deg))
}

/// Returns exactly `deg(p)` roots with multiplicity.
pub fn roots(p: &ComplexPoly, tol: f64) -> Result<Vec<Complex64>> {
    let p = p.trimmed();
    if p.is_empty() || p.degree() == 0 {
        return Err(Error::DegreeTooSmall { degree: 0, min: 1 });
    }
    // factor out roots at the origin exactly
    let zeros = p.0.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let reduced = ComplexPoly(p.0[zeros..].to_vec());
    let mut out = vec![Complex64::zero(); zeros];
    match reduced.degree() {
        0 => {}
        1 => out.push(-reduced[0] / reduced[1]),
        2 => out.extend(quadratic(reduced[0], reduced[1], reduced[2])),
        _ => out.extend(aberth(&reduced, tol)?),
    }
    Ok(out)
}

fn quadratic(c: Complex64, b: Complex64, a: Complex64) -> [Complex64; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    // pick the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
    if q.is_zero() {
        return [Complex64::zero(), Complex64::zero()];
    }
    [q / a, c / q]
}

fn aberth(p: &ComplexPoly, tol: f64) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let dp = p.derivative();
    let mut z = initial_guesses(p);

    let accept = |z: &[Complex64]| z.iter().all(|&r| residual_ratio(p, r) <= tol);
    let mut converged = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        let mut largest_step: f64 = 0.0;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let zi = z[i];
            let value = p.eval(zi);
            if value.is_zero() {
                converged[i] = true;
                continue;
            }
            let ratio = value / dp.eval(zi);
            let repulsion: Complex64 =
                (0..n).filter(|&j| j != i).map(|j| (zi - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[i] = zi - step;
            let rel = step.norm() / zi.norm().max(1e-300);
            largest_step = largest_step.max(rel);
            if rel <= f64::EPSILON * 4.0 {
                converged[i] = true;
            }
        }
        if converged.iter().all(|&c| c) || largest_step <= f64::EPSILON * 4.0 {
            break;
        }
    }
    polish(p, &dp, &mut z);
    if accept(&z) {
        Ok(z)
    } else {
        let residual = z.iter().map(|&r| residual_ratio(p, r)).fold(0.0, f64::max);
        Err(Error::RootsNotConverged { iterations: MAX_ITERATIONS, residual, best: z })
    }
}

/// Starting points on circles read off the upper convex hull of
/// `(i, log|c_i|)`: a hull edge from `i` to `j` contributes `j - i` points of
/// modulus `(|c_i| / |c_j|)^(1 / (j - i))`. This keeps the starts on the right
/// scale when the coefficients span many orders of magnitude.
fn initial_guesses(p: &ComplexPoly) -> Vec<Complex64> {
    let n = p.degree();
    let pts: Vec<(usize, f64)> =
        p.0.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.norm().ln())).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &q in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (q.1 - a.1) - (b.1 - a.1) * (q.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    let mut z = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let ((i, li), (j, lj)) = (w[0], w[1]);
        let k = j - i;
        let radius = ((li - lj) / k as f64).exp();
        for t in 0..k {
            let angle = std::f64::consts::TAU * t as f64 / k as f64 + std::f64::consts::TAU * i as f64 / n as f64 + 0.4;
            z.push(Complex64::from_polar(radius, angle));
        }
    }
    z
}

/// A couple of Newton steps per root, kept only when they lower the residual.
fn polish(p: &ComplexPoly, dp: &ComplexPoly, z: &mut [Complex64]) {
    for r in z.iter_mut() {
        for _ in 0..2 {
            let d = dp.eval(*r);
            if d.is_zero() {
                break;
            }
            let next = *r - p.eval(*r) / d;
            if next.is_finite() && p.eval(next).norm() < p.eval(*r).norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
}
