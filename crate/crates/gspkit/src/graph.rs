//! Graphs and graph shift operators.
//!
//! A [`Graph`] is a weighted edge list over vertices `0..n`; undirected
//! edges are stored once and expanded on demand. A [`Gso`] (graph shift
//! operator) is a dense matrix derived from a graph: the adjacency matrix,
//! one of the Laplacian variants, or a caller-supplied custom operator.
//!
//! Orientation convention for directed graphs: the weight of edge
//! `src -> dst` sits at entry `(dst, src)`, so `y = S x` pushes signal
//! values along edge direction. In particular the directed cycle built by
//! [`Graph::directed_cycle`] acts as the unit delay: `(S x)[i+1] = x[i]`
//! (indices mod `n`). For undirected graphs the matrix is symmetric and
//! the convention is invisible.

use std::collections::HashSet;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(src: usize, dst: usize, weight: f64) -> Self {
        Edge { src, dst, weight }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    directed: bool,
}

impl Graph {
    /// Validates and builds a graph from an edge list.
    ///
    /// Rejects out-of-range ids, self-loops, non-finite weights, and
    /// duplicate `(src, dst)` pairs. For undirected graphs, mirrored pairs
    /// `(i, j)` / `(j, i)` with equal weights collapse into one stored
    /// edge; mirrored pairs with different weights are an error.
    pub fn new(n: usize, edges: Vec<Edge>, directed: bool) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("a graph needs at least one vertex"));
        }
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut kept: Vec<Edge> = Vec::with_capacity(edges.len());
        for e in edges {
            if e.src >= n {
                return Err(Error::VertexOutOfRange { id: e.src, n });
            }
            if e.dst >= n {
                return Err(Error::VertexOutOfRange { id: e.dst, n });
            }
            if e.src == e.dst {
                return Err(Error::SelfLoop { vertex: e.src });
            }
            if !e.weight.is_finite() {
                return Err(Error::NonFiniteWeight { src: e.src, dst: e.dst });
            }
            if !seen.insert((e.src, e.dst)) {
                return Err(Error::DuplicateEdge { src: e.src, dst: e.dst });
            }
            if directed {
                kept.push(e);
                continue;
            }
            if let Some(prev) = kept
                .iter()
                .find(|p| (p.src, p.dst) == (e.dst, e.src) || (p.src, p.dst) == (e.src, e.dst))
            {
                if prev.weight == e.weight {
                    continue; // mirrored restatement of a stored edge
                }
                return Err(Error::ConflictingWeights {
                    src: e.src.min(e.dst),
                    dst: e.src.max(e.dst),
                    a: prev.weight,
                    b: e.weight,
                });
            }
            let (src, dst) = (e.src.min(e.dst), e.src.max(e.dst));
            kept.push(Edge { src, dst, weight: e.weight });
        }
        Ok(Graph { n, edges: kept, directed })
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0` with unit weights.
    /// Its adjacency operator is the unit delay.
    pub fn directed_cycle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("a directed cycle needs at least two vertices"));
        }
        let edges = (0..n).map(|i| Edge::new(i, (i + 1) % n, 1.0)).collect();
        Graph::new(n, edges, true)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    /// Stored edges: one record per undirected edge (with `src < dst`), one
    /// per directed edge as given.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of weakly connected components (edge direction ignored).
    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.src), find(&mut parent, e.dst));
            if a != b {
                parent[a] = b;
            }
        }
        (0..self.n)
            .filter(|&v| find(&mut parent, v) == v)
            .count()
    }

    /// Dense adjacency matrix under the `(dst, src)` orientation convention.
    pub fn adjacency_matrix(&self) -> Array2<f64> {
        let mut a = Array2::<f64>::zeros((self.n, self.n));
        for e in &self.edges {
            a[[e.dst, e.src]] = e.weight;
            if !self.directed {
                a[[e.src, e.dst]] = e.weight;
            }
        }
        a
    }

    /// Weighted degree vector `d = A 1` (row sums of the adjacency matrix).
    pub fn degrees(&self) -> Array1<f64> {
        let a = self.adjacency_matrix();
        a.sum_axis(ndarray::Axis(1))
    }
}

/// Which operator a [`Gso`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GsoVariant {
    Adjacency,
    CombinatorialLaplacian,
    NormalizedLaplacian,
    RandomWalkLaplacian,
    Custom,
}

impl GsoVariant {
    pub fn is_laplacian(self) -> bool {
        matches!(
            self,
            GsoVariant::CombinatorialLaplacian
                | GsoVariant::NormalizedLaplacian
                | GsoVariant::RandomWalkLaplacian
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            GsoVariant::Adjacency => "adjacency",
            GsoVariant::CombinatorialLaplacian => "laplacian",
            GsoVariant::NormalizedLaplacian => "normalized-laplacian",
            GsoVariant::RandomWalkLaplacian => "random-walk-laplacian",
            GsoVariant::Custom => "custom",
        }
    }
}

/// Graph shift operator: a dense matrix plus the variant it was built as
/// and, when derived from a graph, the graph itself.
#[derive(Debug, Clone)]
pub struct Gso {
    matrix: Array2<f64>,
    variant: GsoVariant,
    source: Option<Graph>,
    fingerprint: u64,
}

/// FNV-1a over the matrix entries' little-endian bit patterns. Stable
/// across runs and platforms; used to tie filters and estimates to the
/// operator they were built for.
fn fingerprint_matrix(m: &Array2<f64>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    };
    for d in m.nrows().to_le_bytes() {
        eat(d);
    }
    for v in m.iter() {
        for b in v.to_le_bytes() {
            eat(b);
        }
    }
    h
}

impl Gso {
    /// Builds the requested operator variant from a graph.
    ///
    /// Laplacian variants are only defined for undirected graphs with
    /// nonnegative weights. Isolated vertices get `d^{-1/2} = 0` in the
    /// normalized variant (and a zero row in the random-walk variant), so
    /// graphs with isolated vertices are fine.
    pub fn from_graph(graph: &Graph, variant: GsoVariant) -> Result<Self> {
        if variant == GsoVariant::Custom {
            return Err(Error::invalid(
                "custom operators are built with Gso::custom, not from a graph",
            ));
        }
        if variant.is_laplacian() {
            if graph.is_directed() {
                return Err(Error::RequiresUndirected { variant: variant.name() });
            }
            if let Some(e) = graph.edges().iter().find(|e| e.weight < 0.0) {
                return Err(Error::RequiresNonnegative {
                    variant: variant.name(),
                    src: e.src,
                    dst: e.dst,
                    w: e.weight,
                });
            }
        }
        let a = graph.adjacency_matrix();
        let n = graph.n_vertices();
        let matrix = match variant {
            GsoVariant::Adjacency => a,
            GsoVariant::CombinatorialLaplacian => {
                let d = a.sum_axis(ndarray::Axis(1));
                let mut l = -a;
                for i in 0..n {
                    l[[i, i]] += d[i];
                }
                l
            }
            GsoVariant::NormalizedLaplacian => {
                let d = a.sum_axis(ndarray::Axis(1));
                let dis: Vec<f64> = d.iter().map(|&x| if x > 0.0 { x.powf(-0.5) } else { 0.0 }).collect();
                let mut l = Array2::<f64>::zeros((n, n));
                for i in 0..n {
                    for j in 0..n {
                        let v = -dis[i] * a[[i, j]] * dis[j];
                        l[[i, j]] = v;
                    }
                    l[[i, i]] = if d[i] > 0.0 { 1.0 + l[[i, i]] } else { 0.0 };
                }
                l
            }
            GsoVariant::RandomWalkLaplacian => {
                let d = a.sum_axis(ndarray::Axis(1));
                let mut l = Array2::<f64>::zeros((n, n));
                for i in 0..n {
                    if d[i] > 0.0 {
                        for j in 0..n {
                            l[[i, j]] = -a[[i, j]] / d[i];
                        }
                        l[[i, i]] += 1.0;
                    }
                }
                l
            }
            GsoVariant::Custom => unreachable!(),
        };
        let fingerprint = fingerprint_matrix(&matrix);
        Ok(Gso { matrix, variant, source: Some(graph.clone()), fingerprint })
    }

    /// Wraps an arbitrary square matrix as a custom shift operator.
    pub fn custom(matrix: Array2<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::dims(format!(
                "custom operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(Error::invalid("custom operator must be nonempty"));
        }
        if let Some(v) = matrix.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("custom operator has non-finite entry {v}")));
        }
        let fingerprint = fingerprint_matrix(&matrix);
        Ok(Gso { matrix, variant: GsoVariant::Custom, source: None, fingerprint })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn variant(&self) -> GsoVariant {
        self.variant
    }

    pub fn source(&self) -> Option<&Graph> {
        self.source.as_ref()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn is_symmetric(&self) -> bool {
        crate::linalg::is_symmetric(&self.matrix.view(), 1e-12)
    }

    /// True when the matrix is exactly the directed-cycle delay pattern:
    /// ones at `(i+1 mod n, i)`, zeros elsewhere.
    pub fn is_directed_cycle(&self) -> bool {
        let n = self.n();
        if n < 2 {
            return false;
        }
        for i in 0..n {
            for j in 0..n {
                let expect = if i == (j + 1) % n { 1.0 } else { 0.0 };
                if self.matrix[[i, j]] != expect {
                    return false;
                }
            }
        }
        true
    }

    /// Gershgorin bound on eigenvalue magnitude / real interval.
    /// Returns `[lo, hi]` covering every eigenvalue of a symmetric matrix.
    pub fn gershgorin_interval(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let radius: f64 = (0..n).filter(|&j| j != i).map(|j| self.matrix[[i, j]].abs()).sum();
            lo = lo.min(self.matrix[[i, i]] - radius);
            hi = hi.max(self.matrix[[i, i]] + radius);
        }
        (lo, hi)
    }
}
