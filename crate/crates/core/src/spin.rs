//! Partition functions of the 2-spin system with edge weights `beta` (both
//! endpoints 0), `gamma` (both 1), 1 (mixed) and per-vertex field `lambda_v`
//! on spin 1.

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::{Num, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FieldVector, Graph};
use crate::poly::{log_coefficients, ComplexPoly, LogSeries};

/// Default cap on enumerated configurations (`2^24`).
pub const DEFAULT_CONFIG_BUDGET: u128 = 1 << 24;
/// Default cap on enumerated connected induced subgraphs.
pub const DEFAULT_SUBGRAPH_BUDGET: u128 = 10_000_000;

const CHUNK_BITS: u32 = 12;

/// Ferromagnetic edge interaction: `beta >= gamma > 0`, `beta * gamma > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinParams {
    beta: f64,
    gamma: f64,
}

impl SpinParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        let bad = |reason| Err(Error::InvalidParams { beta, gamma, reason });
        if !(beta.is_finite() && gamma.is_finite()) || beta <= 0.0 || gamma <= 0.0 {
            return bad("beta and gamma must be finite and positive");
        }
        if beta < gamma {
            return bad("need beta >= gamma");
        }
        if beta * gamma <= 1.0 {
            return bad("need beta * gamma > 1");
        }
        Ok(SpinParams { beta, gamma })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_ising(&self) -> bool {
        self.beta == self.gamma
    }
}

/// Edge statistics of a configuration: `(0,0)` edges, `(1,1)` edges, spin-1 vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfigWeight {
    pub m0: usize,
    pub m1: usize,
    pub n1: usize,
}

impl ConfigWeight {
    /// Statistics of the configuration whose spin-1 set is the bitmask `ones`.
    pub fn of_mask(g: &Graph, ones: u64) -> ConfigWeight {
        let mut m0 = 0;
        let mut m1 = 0;
        for &(u, v) in g.edges() {
            match ((ones >> u) & 1, (ones >> v) & 1) {
                (0, 0) => m0 += 1,
                (1, 1) => m1 += 1,
                _ => {}
            }
        }
        ConfigWeight { m0, m1, n1: ones.count_ones() as usize }
    }

    /// `beta^m0 gamma^m1 lambda^n1` for a uniform field.
    pub fn weight(&self, params: &SpinParams, lambda: Complex64) -> Complex64 {
        lambda.powu(self.n1 as u32)
            * params.beta.powi(self.m0 as i32)
            * params.gamma.powi(self.m1 as i32)
    }
}

fn check_budget(g: &Graph, budget: u128) -> Result<()> {
    let needed = if g.n() >= 127 { u128::MAX } else { 1u128 << g.n() };
    if g.n() > 63 || needed > budget {
        return Err(Error::OverBudget { what: "configuration enumeration", needed, budget });
    }
    Ok(())
}

fn powers<T: Num + Clone>(base: &T, top: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(top + 1);
    let mut acc = T::one();
    for _ in 0..=top {
        out.push(acc.clone());
        acc = acc * base.clone();
    }
    out
}

fn pairwise_sum<T: Num + Clone>(mut parts: Vec<Vec<T>>, len: usize) -> Vec<T> {
    if parts.is_empty() {
        return vec![T::zero(); len];
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => {
                    next.push(a.into_iter().zip(b).map(|(x, y)| x + y).collect::<Vec<T>>())
                }
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().expect("nonempty")
}

/// Coefficients of `t^0..t^k` of `Z(G; t * fields)` by subset enumeration.
///
/// Generic over the scalar ring so tests can run it over the rationals.
/// Chunks of `2^12` masks are summed sequentially and then combined by
/// pairwise summation in a fixed order, so the result does not depend on the
/// number of worker threads.
pub fn ray_coefficients_generic<T>(g: &Graph, beta: &T, gamma: &T, fields: &[T], k: usize) -> Vec<T>
where
    T: Num + Clone + Send + Sync,
{
    let n = g.n();
    assert_eq!(fields.len(), n, "field vector length");
    assert!(n <= 63, "bitmask enumeration supports at most 63 vertices");
    let k = k.min(n);
    let e = g.edge_count();
    let beta_pow = powers(beta, e);
    let gamma_pow = powers(gamma, e);
    let adj: Vec<u64> = (0..n).map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u)).collect();
    let deg: Vec<usize> = g.degrees();

    let total: u64 = 1u64 << n;
    let chunk = 1u64 << CHUNK_BITS.min(n as u32);
    let chunks = total / chunk;
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![T::zero(); k + 1];
            for mask in c * chunk..(c + 1) * chunk {
                let ones = mask.count_ones() as usize;
                if ones > k {
                    continue;
                }
                let mut twice_m1 = 0usize;
                let mut deg_sum = 0usize;
                let mut field = T::one();
                let mut rest = mask;
                while rest != 0 {
                    let v = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    twice_m1 += (adj[v] & mask).count_ones() as usize;
                    deg_sum += deg[v];
                    field = field * fields[v].clone();
                }
                let m1 = twice_m1 / 2;
                let m0 = e + m1 - deg_sum;
                let w = field * beta_pow[m0].clone() * gamma_pow[m1].clone();
                acc[ones] = acc[ones].clone() + w;
            }
            acc
        })
        .collect();
    pairwise_sum(parts, k + 1)
}

pub fn z_coeffs_ray(g: &Graph, params: &SpinParams, fields: &FieldVector, k: usize) -> Result<ComplexPoly> {
    z_coeffs_ray_with_budget(g, params, fields, k, DEFAULT_CONFIG_BUDGET)
}

pub fn z_coeffs_ray_with_budget(
    g: &Graph,
    params: &SpinParams,
    fields: &FieldVector,
    k: usize,
    budget: u128,
) -> Result<ComplexPoly> {
    fields.check_len(g)?;
    check_budget(g, budget)?;
    let beta = Complex64::new(params.beta, 0.0);
    let gamma = Complex64::new(params.gamma, 0.0);
    Ok(ComplexPoly(ray_coefficients_generic(g, &beta, &gamma, fields.as_slice(), k)))
}

/// Multivariate partition function by direct enumeration of all `2^n` configurations.
pub fn z_exact(g: &Graph, params: &SpinParams, fields: &FieldVector) -> Result<Complex64> {
    z_exact_with_budget(g, params, fields, DEFAULT_CONFIG_BUDGET)
}

pub fn z_exact_with_budget(
    g: &Graph,
    params: &SpinParams,
    fields: &FieldVector,
    budget: u128,
) -> Result<Complex64> {
    let coeffs = z_coeffs_ray_with_budget(g, params, fields, g.n(), budget)?;
    Ok(coeffs.0.iter().sum())
}

/// Connected vertex sets of size at most `k`, as bitmasks, each exactly once.
///
/// Every set is grown from its minimum vertex; extensions only admit larger
/// vertices from the exclusive neighbourhood of the newly added vertex.
pub fn connected_sets(g: &Graph, k: usize, budget: u128) -> Result<Vec<u64>> {
    let n = g.n();
    if n > 64 {
        return Err(Error::InvalidArgument("connected-set enumeration supports at most 64 vertices".into()));
    }
    let adj: Vec<u64> = (0..n).map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u)).collect();
    let mut out = Vec::new();
    if k == 0 {
        return Ok(out);
    }
    for root in 0..n {
        let above: u64 = if root == 63 { 0 } else { !0u64 << (root + 1) };
        let start = 1u64 << root;
        grow(&adj, start, adj[root] & above, start | adj[root], above, 1, k, &mut out, budget)?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn grow(
    adj: &[u64],
    set: u64,
    mut ext: u64,
    closed_nbhd: u64,
    above: u64,
    size: usize,
    k: usize,
    out: &mut Vec<u64>,
    budget: u128,
) -> Result<()> {
    out.push(set);
    if out.len() as u128 > budget {
        return Err(Error::OverBudget { what: "connected subgraph enumeration", needed: out.len() as u128, budget });
    }
    if size == k {
        return Ok(());
    }
    while ext != 0 {
        let w = ext.trailing_zeros() as usize;
        ext &= ext - 1;
        let fresh = adj[w] & !closed_nbhd & above;
        grow(adj, set | 1 << w, ext | fresh, closed_nbhd | adj[w] | 1 << w, above, size + 1, k, out, budget)?;
    }
    Ok(())
}

/// Order-`m` Taylor series of `log Z(G; t * fields)` assembled from connected
/// induced subgraphs of at most `m` vertices.
///
/// Writing `Z / beta^|E| = sum_S prod_{v in S} mu_v t (beta gamma)^{e(S)}` with
/// `mu_v = lambda_v beta^{-deg_G(v)}`, the restriction `q(H)` of this sum to
/// subsets of `H` is multiplicative over non-adjacent pieces. Its local log
/// series is computed on the induced subgraph with fields
/// `lambda_v beta^{-(deg_G(v) - deg_H(v))}`, and the cluster terms follow from
/// `a(H) = log q(H) - sum_{H' strictly inside H, connected} a(H')`.
pub fn log_series_connected(g: &Graph, params: &SpinParams, fields: &FieldVector, m: usize) -> Result<LogSeries> {
    log_series_connected_with_budget(g, params, fields, m, DEFAULT_SUBGRAPH_BUDGET)
}

pub fn log_series_connected_with_budget(
    g: &Graph,
    params: &SpinParams,
    fields: &FieldVector,
    m: usize,
    budget: u128,
) -> Result<LogSeries> {
    fields.check_len(g)?;
    if m == 0 {
        return Err(Error::InvalidArgument("log-series order must be at least 1".into()));
    }
    let mut sets = connected_sets(g, m.min(g.n()), budget)?;
    sets.sort_by_key(|s| (s.count_ones(), *s));

    let beta = params.beta;
    let mut clusters: HashMap<u64, Vec<Complex64>> = HashMap::with_capacity(sets.len());
    let mut ordered: Vec<Vec<Complex64>> = Vec::with_capacity(sets.len());
    for &set in &sets {
        let vertices: Vec<usize> = (0..g.n()).filter(|&v| set >> v & 1 == 1).collect();
        let h = g.induced(&vertices);
        let local_fields = FieldVector(
            vertices
                .iter()
                .enumerate()
                .map(|(i, &v)| fields.0[v] * beta.powi(-((g.degree(v) - h.degree(i)) as i32)))
                .collect(),
        );
        let coeffs = z_coeffs_ray(&h, params, &local_fields, h.n())?;
        let mut cluster = log_coefficients(&coeffs.0, m).ok_or(Error::ZeroConstantTerm)?;
        // subtract every connected proper subset
        let mut sub = (set - 1) & set;
        while sub != 0 {
            if let Some(a) = clusters.get(&sub) {
                for (c, x) in cluster.iter_mut().zip(a) {
                    *c -= x;
                }
            }
            sub = (sub - 1) & set;
        }
        clusters.insert(set, cluster.clone());
        ordered.push(cluster);
    }
    let coeffs = pairwise_sum(ordered, m);
    let constant = Complex64::new(g.edge_count() as f64 * beta.ln(), 0.0);
    Ok(LogSeries { constant, coeffs })
}

/// Brute-force reference `sum over configurations of w(sigma)` for a uniform field.
pub fn z_uniform_by_weights(g: &Graph, params: &SpinParams, lambda: Complex64) -> Result<Complex64> {
    check_budget(g, DEFAULT_CONFIG_BUDGET)?;
    Ok((0..1u64 << g.n())
        .map(|mask| ConfigWeight::of_mask(g, mask).weight(params, lambda))
        .fold(Complex64::zero(), |a, b| a + b))
}
