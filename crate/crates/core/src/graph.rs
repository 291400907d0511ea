//! Connected Erdős–Rényi graphs and exact hop distances.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::{mix, rng_from};

pub type VertexId = usize;

/// Maximum number of `G(N, p)` samples drawn before giving up on connectivity.
pub const MAX_CONNECT_ATTEMPTS: u32 = 100;

const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("degree coefficient must be finite and > 1, got {0}")]
    InvalidDegreeCoeff(f64),
    #[error("no connected sample after {attempts} attempts (N={num_vertices}, p={p})")]
    RejectionLimitExceeded {
        attempts: u32,
        num_vertices: usize,
        p: f64,
    },
    #[error("vertex {vertex} out of range for graph with {num_vertices} vertices")]
    VertexOutOfRange {
        vertex: VertexId,
        num_vertices: usize,
    },
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex {vertex} unreachable from {origin}")]
    UnreachableVertex { origin: VertexId, vertex: VertexId },
}

/// Parameters of a connected `G(N, p)` sample with `p = c ln N / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomGraphSpec {
    pub num_vertices: usize,
    pub degree_coeff: f64,
    pub seed: u64,
}

impl RandomGraphSpec {
    pub fn new(num_vertices: usize, degree_coeff: f64, seed: u64) -> Result<Self, GraphError> {
        let spec = Self {
            num_vertices,
            degree_coeff,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.num_vertices < 2 {
            return Err(GraphError::TooFewVertices(self.num_vertices));
        }
        if !self.degree_coeff.is_finite() || self.degree_coeff <= 1.0 {
            return Err(GraphError::InvalidDegreeCoeff(self.degree_coeff));
        }
        Ok(())
    }

    /// Edge probability `c ln N / N`, saturated at 1.
    pub fn edge_probability(&self) -> f64 {
        let n = self.num_vertices as f64;
        (self.degree_coeff * n.ln() / n).min(1.0)
    }

    /// Asymptotic vertex degree `c ln N`.
    pub fn expected_degree(&self) -> f64 {
        self.degree_coeff * (self.num_vertices as f64).ln()
    }

    /// Asymptotic average distance `ln N / ln(Np)`.
    pub fn expected_average_distance(&self) -> f64 {
        let n = self.num_vertices as f64;
        n.ln() / (n * self.edge_probability()).ln()
    }
}

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    num_edges: usize,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops and repeated edges.
    pub fn from_edges<I>(num_vertices: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut adjacency = vec![Vec::new(); num_vertices];
        let mut num_edges = 0;
        for (u, v) in edges {
            for w in [u, v] {
                if w >= num_vertices {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: w,
                        num_vertices,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            num_edges += 1;
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Self {
            adjacency,
            num_edges,
        })
    }

    pub fn path(num_vertices: usize) -> Self {
        Self::from_edges(num_vertices, (1..num_vertices).map(|v| (v - 1, v)))
            .expect("path edges are simple")
    }

    pub fn complete(num_vertices: usize) -> Self {
        let edges = (0..num_vertices).flat_map(|u| (u + 1..num_vertices).map(move |v| (u, v)));
        Self::from_edges(num_vertices, edges).expect("complete graph edges are simple")
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Neighbors of `v` in ascending id order.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.num_edges as f64 / self.num_vertices() as f64
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.num_vertices()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                num_vertices: self.num_vertices(),
            })
        }
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        if self.num_vertices() == 0 {
            return true;
        }
        hop_counts(self, &[0]).iter().all(|&d| d != UNREACHED)
    }
}

/// Samples a connected `G(N, p)`.
///
/// Attempt `k` (0-based) uses seed `spec.seed` for `k = 0` and
/// `mix(spec.seed, k)` afterwards; disconnected samples are discarded.
pub fn generate_er(spec: &RandomGraphSpec) -> Result<Graph, GraphError> {
    generate_connected(spec, sample_gnp)
}

/// Same distribution as [`generate_er`], visiting every vertex pair with an
/// independent Bernoulli draw. Quadratic; kept as a reference sampler.
pub fn generate_er_pairwise(spec: &RandomGraphSpec) -> Result<Graph, GraphError> {
    generate_connected(spec, sample_gnp_pairwise)
}

fn generate_connected<F>(spec: &RandomGraphSpec, sample: F) -> Result<Graph, GraphError>
where
    F: Fn(usize, f64, &mut crate::seed::SimRng) -> Vec<(VertexId, VertexId)>,
{
    spec.validate()?;
    let n = spec.num_vertices;
    let p = spec.edge_probability();
    for attempt in 0..MAX_CONNECT_ATTEMPTS {
        let seed = if attempt == 0 {
            spec.seed
        } else {
            mix(spec.seed, u64::from(attempt))
        };
        let mut rng = rng_from(seed);
        let graph = Graph::from_edges(n, sample(n, p, &mut rng))?;
        if graph.is_connected() {
            return Ok(graph);
        }
    }
    Err(GraphError::RejectionLimitExceeded {
        attempts: MAX_CONNECT_ATTEMPTS,
        num_vertices: n,
        p,
    })
}

// Geometric skipping over the pair sequence (1,0), (2,0), (2,1), (3,0), ...:
// gaps between successive edges are Geometric(p), which is exactly the
// pairwise Bernoulli model.
fn sample_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(VertexId, VertexId)> {
    if p >= 1.0 {
        return (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
    }
    let mut edges = Vec::new();
    if p <= 0.0 {
        return edges;
    }
    let log_q = (1.0 - p).ln();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w = w
            .saturating_add(1)
            .saturating_add(skip.min(i64::MAX as f64 / 2.0) as i64);
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges
}

fn sample_gnp_pairwise<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(VertexId, VertexId)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Exact hop distances from one origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    origin: VertexId,
    dist: Vec<u32>,
}

impl DistanceField {
    pub fn origin(&self) -> VertexId {
        self.origin
    }

    pub fn get(&self, v: VertexId) -> u32 {
        self.dist[v]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.dist
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn max(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }

    /// BFS-tree parent of `v`: its smallest-id neighbor one hop closer.
    pub fn predecessor(&self, graph: &Graph, v: VertexId) -> Option<VertexId> {
        let d = self.dist[v];
        if d == 0 {
            return None;
        }
        graph
            .neighbors(v)
            .iter()
            .copied()
            .find(|&u| self.dist[u] == d - 1)
    }

    /// Shortest path `origin, ..., v` following [`Self::predecessor`].
    pub fn path_to(&self, graph: &Graph, v: VertexId) -> Vec<VertexId> {
        let mut path = Vec::with_capacity(self.dist[v] as usize + 1);
        let mut cur = Some(v);
        while let Some(u) = cur {
            path.push(u);
            cur = self.predecessor(graph, u);
        }
        path.reverse();
        path
    }
}

/// Plain multi-source BFS hop counts; unreached vertices hold `u32::MAX`.
pub(crate) fn hop_counts(graph: &Graph, sources: &[VertexId]) -> Vec<u32> {
    let mut dist = vec![UNREACHED; graph.num_vertices()];
    let mut queue = VecDeque::with_capacity(graph.num_vertices());
    for &s in sources {
        if dist[s] == UNREACHED {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &w in graph.neighbors(u) {
            if dist[w] == UNREACHED {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Multi-source BFS that also reports, per vertex, the smallest source id
/// among the sources at minimum hop distance. `sources` must be distinct.
pub(crate) fn nearest_sources(graph: &Graph, sources: &[VertexId]) -> (Vec<u32>, Vec<VertexId>) {
    let n = graph.num_vertices();
    let mut dist = vec![UNREACHED; n];
    let mut owner = vec![VertexId::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    for &s in sources {
        dist[s] = 0;
        owner[s] = s;
        queue.push_back(s);
    }
    // FIFO order finishes layer k before any layer k+1 vertex is expanded, so
    // the owner of a vertex is final by the time it is popped.
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        let own = owner[u];
        for &w in graph.neighbors(u) {
            if dist[w] == UNREACHED {
                dist[w] = next;
                owner[w] = own;
                queue.push_back(w);
            } else if dist[w] == next && own < owner[w] {
                owner[w] = own;
            }
        }
    }
    (dist, owner)
}

/// Exact hop distances from `origin`; errors if any vertex is unreachable.
pub fn bfs_distances(graph: &Graph, origin: VertexId) -> Result<DistanceField, GraphError> {
    graph.check_vertex(origin)?;
    let dist = hop_counts(graph, &[origin]);
    if let Some(vertex) = dist.iter().position(|&d| d == UNREACHED) {
        return Err(GraphError::UnreachableVertex { origin, vertex });
    }
    Ok(DistanceField { origin, dist })
}

/// Mean hop distance from `origin` to every other vertex.
pub fn average_distance(graph: &Graph, origin: VertexId) -> Result<f64, GraphError> {
    let field = bfs_distances(graph, origin)?;
    let others = graph.num_vertices().saturating_sub(1);
    if others == 0 {
        return Ok(0.0);
    }
    let sum: u64 = field.dist.iter().map(|&d| u64::from(d)).sum();
    Ok(sum as f64 / others as f64)
}
