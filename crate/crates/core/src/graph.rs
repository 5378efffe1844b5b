//! Simple undirected graphs, per-vertex external fields, random test
//! instances and the leaf-pruning transformation.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::SpinParams;

/// A simple undirected graph on vertices `0..n`.
///
/// Edges are stored with the smaller endpoint first, in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting loops, repeated edges and out-of-range endpoints.
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edge_list.len());
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edge_list {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { u, v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(u, v));
            }
            edges.push(e);
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        Ok(Graph { n, edges, adjacency })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new(), adjacency: vec![Vec::new(); n] }
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges).expect("complete graph is simple")
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::new(leaves + 1, &edges).expect("star is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Distinct vertex degrees, ascending.
    pub fn degree_set(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    /// Subgraph induced by `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]))
            .collect();
        Graph::new(vertices.len(), &edges).expect("induced subgraph of a simple graph is simple")
    }

    /// Vertex-disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        Graph::new(self.n + other.n, &edges).expect("disjoint union is simple")
    }

    /// Parses the `n m` / `u v` edge-list text format.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (lineno, header) =
            lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let head = parse_usizes(header, lineno)?;
        if head.len() != 2 {
            return Err(Error::Parse { line: lineno, msg: "header must be \"n m\"".into() });
        }
        let (n, m) = (head[0], head[1]);
        let mut edges = Vec::with_capacity(m);
        for (lineno, line) in lines {
            let uv = parse_usizes(line, lineno)?;
            if uv.len() != 2 {
                return Err(Error::Parse { line: lineno, msg: "edge line must be \"u v\"".into() });
            }
            edges.push((uv[0], uv[1]));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Graph::new(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

fn parse_usizes(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|e| Error::Parse { line: lineno, msg: format!("{tok:?}: {e}") })
        })
        .collect()
}

/// Per-vertex external fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldVector(pub Vec<Complex64>);

impl FieldVector {
    pub fn uniform(n: usize, lambda: f64) -> Self {
        FieldVector(vec![Complex64::new(lambda, 0.0); n])
    }

    pub fn uniform_complex(n: usize, lambda: Complex64) -> Self {
        FieldVector(vec![lambda; n])
    }

    pub fn from_reals(values: &[f64]) -> Self {
        FieldVector(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn check_len(&self, g: &Graph) -> Result<()> {
        if self.0.len() != g.n() {
            return Err(Error::FieldLength { expected: g.n(), got: self.0.len() });
        }
        Ok(())
    }

    /// Largest real part; fields are real and nonnegative in algorithmic use.
    pub fn max_real(&self) -> f64 {
        self.0.iter().map(|z| z.re).fold(0.0, f64::max)
    }

    pub fn is_nonnegative_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0 && z.re >= 0.0 && z.re.is_finite())
    }

    /// Parses one value per line, either `re` or `re im`.
    pub fn parse(text: &str) -> Result<FieldVector> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<f64> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|e| Error::Parse { line: i + 1, msg: format!("{tok:?}: {e}") })
                })
                .collect::<Result<_>>()?;
            let z = match parts.as_slice() {
                [re] => Complex64::new(*re, 0.0),
                [re, im] => Complex64::new(*re, *im),
                _ => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: "expected \"re\" or \"re im\"".into(),
                    })
                }
            };
            values.push(z);
        }
        Ok(FieldVector(values))
    }
}

/// Outcome of [`prune_leaves`]: `Z(G; fields) = multiplier * Z(graph; fields)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneResult {
    pub graph: Graph,
    pub fields: FieldVector,
    pub multiplier: Complex64,
    /// Original labels of the removed vertices, in removal order.
    pub removed: Vec<usize>,
    /// Original label of each surviving vertex (index = new label).
    pub kept: Vec<usize>,
}

/// Repeatedly strips degree-1 vertices (and then isolated ones) until the
/// remaining graph has minimum degree at least 2 or is empty.
///
/// A leaf `v` with neighbour `u` contributes the factor `beta + lambda_v` and
/// rescales `lambda_u` by `(gamma lambda_v + 1) / (lambda_v + beta)`; an
/// isolated vertex contributes `1 + lambda_v`. The lowest-indexed candidate
/// is always removed first.
pub fn prune_leaves(g: &Graph, fields: &FieldVector, params: &SpinParams) -> Result<PruneResult> {
    fields.check_len(g)?;
    let beta = Complex64::new(params.beta(), 0.0);
    let gamma = Complex64::new(params.gamma(), 0.0);
    let one = Complex64::new(1.0, 0.0);

    let mut lambda = fields.0.clone();
    let mut alive = vec![true; g.n()];
    let mut degree = g.degrees();
    let mut multiplier = one;
    let mut removed = Vec::new();

    loop {
        let pick = (0..g.n())
            .find(|&v| alive[v] && degree[v] == 1)
            .or_else(|| (0..g.n()).find(|&v| alive[v] && degree[v] == 0));
        let Some(v) = pick else { break };
        let lv = lambda[v];
        if degree[v] == 1 {
            let u = *g
                .neighbors(v)
                .iter()
                .find(|&&u| alive[u])
                .expect("degree-1 vertex has a live neighbour");
            let denom = lv + beta;
            if denom == Complex64::new(0.0, 0.0) {
                return Err(Error::SingularPrune { vertex: v });
            }
            multiplier *= denom;
            lambda[u] *= (lv * gamma + one) / denom;
            degree[u] -= 1;
        } else {
            multiplier *= one + lv;
        }
        alive[v] = false;
        degree[v] = 0;
        removed.push(v);
    }

    let kept: Vec<usize> = (0..g.n()).filter(|&v| alive[v]).collect();
    let graph = g.induced(&kept);
    let fields = FieldVector(kept.iter().map(|&v| lambda[v]).collect());
    Ok(PruneResult { graph, fields, multiplier, removed, kept })
}

/// Seeded random simple connected graph with every degree in `[2, max_degree]`.
///
/// Uses a configuration (pairing) model over random target degrees, drops
/// loops and repeated pairs, raises deficient vertices with extra edges and
/// finally merges components with degree-preserving edge swaps.
/// `max_degree` is capped at `n - 1`.
pub fn random_min2_graph(n: usize, max_degree: usize, seed: u64) -> Result<Graph> {
    if n < 3 || max_degree < 2 {
        return Err(Error::InfeasibleGraph { n, max_degree });
    }
    let cap = max_degree.min(n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(g) = pairing_attempt(n, cap, &mut rng) {
            return Ok(g);
        }
    }
}

fn pairing_attempt(n: usize, cap: usize, rng: &mut ChaCha8Rng) -> Option<Graph> {
    let mut target: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=cap)).collect();
    if target.iter().sum::<usize>() % 2 == 1 {
        match (0..n).find(|&v| target[v] < cap) {
            Some(v) => target[v] += 1,
            None => {
                let v = (0..n).find(|&v| target[v] > 2)?;
                target[v] -= 1;
            }
        }
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, target[v])).collect();
    stubs.shuffle(rng);

    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u != v && !adj[u].contains(&v) {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }

    // repair: lift every vertex to degree 2
    for v in 0..n {
        while adj[v].len() < 2 {
            let mut candidates: Vec<usize> = (0..n)
                .filter(|&u| u != v && !adj[v].contains(&u) && adj[u].len() < cap)
                .collect();
            if candidates.is_empty() {
                return None;
            }
            candidates.sort_by_key(|&u| adj[u].len());
            let lowest = adj[candidates[0]].len();
            candidates.retain(|&u| adj[u].len() == lowest);
            let u = *candidates.choose(rng)?;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }

    // merge components: swap (a,b),(c,d) -> (a,c),(b,d) across components
    loop {
        let comp = components(&adj);
        let count = comp.iter().copied().max().map_or(0, |m| m + 1);
        if count <= 1 {
            break;
        }
        let pick_edge = |label: usize, rng: &mut ChaCha8Rng| -> (usize, usize) {
            let edges: Vec<(usize, usize)> = (0..n)
                .filter(|&a| comp[a] == label)
                .flat_map(|a| adj[a].iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
                .collect();
            *edges.choose(rng).expect("min-degree-2 component has edges")
        };
        let (a, b) = pick_edge(0, rng);
        let (c, d) = pick_edge(1, rng);
        adj[a].remove(&b);
        adj[b].remove(&a);
        adj[c].remove(&d);
        adj[d].remove(&c);
        adj[a].insert(c);
        adj[c].insert(a);
        adj[b].insert(d);
        adj[d].insert(b);
    }

    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
        .collect();
    Graph::new(n, &edges).ok()
}

fn components(adj: &[BTreeSet<usize>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; adj.len()];
    let mut next = 0;
    for s in 0..adj.len() {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if label[u] == usize::MAX {
                    label[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    label
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::z_exact;

    fn params() -> SpinParams {
        SpinParams::new(3.0, 4.0 / 3.0).unwrap()
    }

    #[test]
    fn build_small_graphs() {
        let edge = Graph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(edge.degrees(), vec![1, 1]);
        let tri = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tri.degrees(), vec![2, 2, 2]);
        assert_eq!(tri.min_degree(), 2);
    }

    #[test]
    fn build_rejects_bad_edges() {
        assert_eq!(Graph::new(4, &[(0, 1), (0, 1)]), Err(Error::DuplicateEdge(0, 1)));
        assert_eq!(Graph::new(4, &[(0, 1), (1, 0)]), Err(Error::DuplicateEdge(1, 0)));
        assert_eq!(Graph::new(4, &[(2, 2)]), Err(Error::SelfLoop(2)));
        assert!(matches!(Graph::new(3, &[(0, 3)]), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::cycle(5);
        let text = g.to_edge_list();
        assert!(text.starts_with("5 5\n"));
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("3 1\n0 x\n").is_err());
    }

    #[test]
    fn field_file_parsing() {
        let f = FieldVector::parse("1.5\n0.25 -2\n\n3\n").unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.0[1], Complex64::new(0.25, -2.0));
        assert!(FieldVector::parse("1 2 3\n").is_err());
    }

    #[test]
    fn prune_single_edge() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let res = prune_leaves(&g, &FieldVector::uniform(2, 1.0), &params()).unwrap();
        assert_eq!(res.graph.n(), 0);
        assert!((res.multiplier - Complex64::new(19.0 / 3.0, 0.0)).norm() < 1e-12);
        assert_eq!(res.removed.len(), 2);
    }

    #[test]
    fn prune_triangle_is_identity() {
        let g = Graph::complete(3);
        let f = FieldVector::from_reals(&[0.3, 1.7, 2.2]);
        let res = prune_leaves(&g, &f, &params()).unwrap();
        assert_eq!(res.graph, g);
        assert_eq!(res.fields, f);
        assert_eq!(res.multiplier, Complex64::new(1.0, 0.0));
        assert!(res.removed.is_empty());
    }

    #[test]
    fn prune_star_matches_enumeration() {
        let g = Graph::star(3);
        let f = FieldVector::uniform(4, 0.8);
        let res = prune_leaves(&g, &f, &params()).unwrap();
        assert_eq!(res.removed, vec![1, 2, 0, 3]);
        let direct = z_exact(&g, &params(), &f).unwrap();
        assert!((res.multiplier - direct).norm() / direct.norm() < 1e-12);
    }

    #[test]
    fn prune_keeps_core_and_rescales_attachment() {
        // triangle 0-1-2 with a pendant path 2-3-4
        let g = Graph::new(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]).unwrap();
        let f = FieldVector::from_reals(&[0.5, 1.0, 1.5, 2.0, 0.7]);
        let p = params();
        let res = prune_leaves(&g, &f, &p).unwrap();
        assert_eq!(res.kept, vec![0, 1, 2]);
        assert_eq!(res.graph.min_degree(), 2);
        let lhs = res.multiplier * z_exact(&res.graph, &p, &res.fields).unwrap();
        let rhs = z_exact(&g, &p, &f).unwrap();
        assert!((lhs - rhs).norm() / rhs.norm() < 1e-12);
    }

    #[test]
    fn prune_singular_field_errors() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let f = FieldVector::from_reals(&[-3.0, 1.0]);
        assert_eq!(prune_leaves(&g, &f, &params()), Err(Error::SingularPrune { vertex: 0 }));
    }

    #[test]
    fn prune_rejects_wrong_field_length() {
        let g = Graph::cycle(4);
        assert!(matches!(
            prune_leaves(&g, &FieldVector::uniform(3, 1.0), &params()),
            Err(Error::FieldLength { .. })
        ));
    }

    #[test]
    fn random_graph_triangle_is_forced() {
        for seed in 0..5 {
            assert_eq!(random_min2_graph(3, 2, seed).unwrap().edge_count(), 3);
        }
    }

    #[test]
    fn random_graph_is_reproducible_and_valid() {
        let a = random_min2_graph(8, 4, 7).unwrap();
        let b = random_min2_graph(8, 4, 7).unwrap();
        assert_eq!(a, b);
        for seed in 0..200 {
            let g = random_min2_graph(10, 3, seed).unwrap();
            assert!(g.degrees().iter().all(|&d| (2..=3).contains(&d)), "seed {seed}");
            assert!(g.is_connected());
        }
    }

    #[test]
    fn random_graph_rejects_infeasible() {
        assert!(random_min2_graph(2, 4, 0).is_err());
        assert!(random_min2_graph(6, 1, 0).is_err());
    }
}
