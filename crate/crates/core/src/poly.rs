//! Dense complex polynomials and truncated power-series operations.
//!
//! The series routines are generic over any commutative ring with exact
//! integer embedding so that tests can run them over the rationals.

use std::ops::{Index, Mul};

use num_complex::Complex64;
use num_traits::{FromPrimitive, Num, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient vector, index = power. Trailing zeros are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoly(pub Vec<Complex64>);

impl ComplexPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        ComplexPoly(coeffs)
    }

    pub fn from_reals(coeffs: &[f64]) -> Self {
        ComplexPoly(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the last nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn trimmed(&self) -> ComplexPoly {
        let len = self.0.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
        ComplexPoly(self.0[..len].to_vec())
    }

    pub fn truncated(&self, m: usize) -> ComplexPoly {
        ComplexPoly(self.0.iter().take(m + 1).copied().collect())
    }

    pub fn coeff(&self, i: usize) -> Complex64 {
        self.0.get(i).copied().unwrap_or_default()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> ComplexPoly {
        ComplexPoly(
            self.0.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect(),
        )
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> ComplexPoly {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::zero(); coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= r * a;
            }
            coeffs = next;
        }
        ComplexPoly(coeffs)
    }
}

impl Index<usize> for ComplexPoly {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        ComplexPoly(poly_mul(&self.0, &rhs.0))
    }
}

pub fn poly_mul<T: Num + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Product of two series truncated after power `m`.
pub fn series_mul<T: Num + Clone>(a: &[T], b: &[T], m: usize) -> Vec<T> {
    let mut out = vec![T::zero(); m + 1];
    for (i, x) in a.iter().enumerate().take(m + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(m + 1 - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Taylor coefficients `L_1..L_m` of `log(p(z)/p(0))`.
///
/// With `b_j = p_j / p_0` they satisfy
/// `j L_j = j b_j - sum_{i=1}^{j-1} i L_i b_{j-i}`.
/// Returns `None` when `p(0) = 0`.
pub fn log_coefficients<T: Num + Clone + FromPrimitive>(p: &[T], m: usize) -> Option<Vec<T>> {
    let p0 = p.first()?.clone();
    if p0.is_zero() {
        return None;
    }
    let b: Vec<T> = (0..=m)
        .map(|j| p.get(j).cloned().unwrap_or_else(T::zero) / p0.clone())
        .collect();
    let mut l: Vec<T> = vec![T::zero(); m + 1];
    for j in 1..=m {
        let jj = T::from_usize(j).expect("order fits the scalar type");
        let mut acc = jj.clone() * b[j].clone();
        for i in 1..j {
            let ii = T::from_usize(i).expect("order fits the scalar type");
            acc = acc - ii * l[i].clone() * b[j - i].clone();
        }
        l[j] = acc / jj;
    }
    l.remove(0);
    Some(l)
}

/// Coefficients of `outer(inner(w))` through power `m` (Horner in the series ring).
pub fn compose_truncate_generic<T: Num + Clone>(outer: &[T], inner: &[T], m: usize) -> Vec<T> {
    let mut acc = vec![T::zero(); m + 1];
    for c in outer.iter().rev() {
        acc = series_mul(&acc, inner, m);
        acc[0] = acc[0].clone() + c.clone();
    }
    acc
}

/// Truncated logarithm of a polynomial around 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogSeries {
    /// Principal-branch `log p(0)`.
    pub constant: Complex64,
    /// `L_1..L_m`.
    pub coeffs: Vec<Complex64>,
}

impl LogSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Sum of the truncated series at `w`, excluding the constant.
    pub fn eval_tail_free(&self, w: Complex64) -> Complex64 {
        let mut pow = w;
        let mut acc = Complex64::zero();
        for &c in &self.coeffs {
            acc += c * pow;
            pow *= w;
        }
        acc
    }

    /// As a polynomial with zero constant term, for composition.
    pub fn as_poly(&self) -> ComplexPoly {
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(Complex64::zero());
        v.extend_from_slice(&self.coeffs);
        ComplexPoly(v)
    }
}

pub fn log_series(p: &ComplexPoly, m: usize) -> Result<LogSeries> {
    if m == 0 {
        return Err(Error::InvalidArgument("log-series order must be at least 1".into()));
    }
    let p0 = p.coeff(0);
    if p0.is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let coeffs = log_coefficients(&p.0, m).ok_or(Error::ZeroConstantTerm)?;
    Ok(LogSeries { constant: p0.ln(), coeffs })
}

pub fn compose_truncate(outer: &ComplexPoly, inner: &ComplexPoly, m: usize) -> ComplexPoly {
    ComplexPoly(compose_truncate_generic(&outer.0, &inner.0, m))
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weights `w_i = a_i / C(d, i)` of the `d`-th polar form; the coefficient of
/// every squarefree monomial of size `i`.
pub fn polar_form_weights(p: &ComplexPoly, d: usize) -> Result<Vec<Complex64>> {
    let degree = p.degree();
    if degree > d {
        return Err(Error::DegreeTooLarge { degree, bound: d });
    }
    Ok((0..=d).map(|i| p.coeff(i) / binomial(d, i)).collect())
}

/// Evaluates the polar form `sum_I w_|I| z_I` via elementary symmetric polynomials.
pub fn polar_form_eval(weights: &[Complex64], zs: &[Complex64]) -> Complex64 {
    assert_eq!(weights.len(), zs.len() + 1, "need one weight per subset size");
    // e[k] = k-th elementary symmetric polynomial of zs
    let mut e = vec![Complex64::zero(); zs.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (count, &z) in zs.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            let prev = e[k - 1];
            e[k] += prev * z;
        }
    }
    weights.iter().zip(&e).map(|(w, ek)| w * ek).sum()
}
