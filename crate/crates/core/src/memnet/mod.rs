//! Memory deployments on a single-source network.
//!
//! A destination `D` reached through memory `μ` costs `d(S,μ)/g + d(μ,D)`
//! bit×hop per unit of flow: the server-to-memory leg is compressed by the
//! memorization gain `g`, the memory-to-destination leg is not. The cheaper
//! of that and the direct `d(S,D)` is the effective distance.

mod benefit;
mod effective;
mod theory;

pub use benefit::{benefit_set, benefit_set_within, vertex_boundary, BenefitSet};
pub use effective::{
    effective_distances, effective_distances_exhaustive, effective_walk, network_gain, total_flow,
    EffectiveDistanceField, FlowSummary,
};
pub use theory::{
    predicted_radius, theory_gain, theory_gain_at_exponent, threshold_memories, TheoryGain,
};

use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MemnetError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("source {0} cannot also be a memory")]
    SourceIsMemory(VertexId),
    #[error("memory {0} listed twice")]
    DuplicateMemory(VertexId),
    #[error("vertex {0} is not a memory of this deployment")]
    UnknownMemory(VertexId),
    #[error("memorization gain must be finite and >= 1, got {0}")]
    InvalidGain(f64),
    #[error("flow vector has {got} entries, graph has {expected} vertices")]
    FlowLength { expected: usize, got: usize },
    #[error("flow for vertex {vertex} must be finite and >= 0, got {value}")]
    InvalidFlow { vertex: VertexId, value: f64 },
    #[error("total flow is zero; network gain undefined")]
    NoFlow,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A graph with one source, a set of memories and a memorization gain.
///
/// Every vertex other than the source is a destination. Per-destination flows
/// default to 1; a zero flow removes a vertex from the demand (used when a
/// memory is a pure router, as in the small textbook topologies).
#[derive(Debug, Clone)]
pub struct Deployment<'g> {
    graph: &'g Graph,
    source: VertexId,
    memories: Vec<VertexId>,
    gain: f64,
    flows: Option<Vec<f64>>,
}

impl<'g> Deployment<'g> {
    /// `memories` may be in any order; they are stored sorted. `gain == 1` is
    /// accepted for degenerate checks even though it makes memory useless.
    pub fn new(
        graph: &'g Graph,
        source: VertexId,
        memories: impl IntoIterator<Item = VertexId>,
        gain: f64,
    ) -> Result<Self, MemnetError> {
        graph.check_vertex(source)?;
        if !gain.is_finite() || gain < 1.0 {
            return Err(MemnetError::InvalidGain(gain));
        }
        let mut memories: Vec<VertexId> = memories.into_iter().collect();
        memories.sort_unstable();
        for w in memories.windows(2) {
            if w[0] == w[1] {
                return Err(MemnetError::DuplicateMemory(w[0]));
            }
        }
        for &m in &memories {
            graph.check_vertex(m)?;
            if m == source {
                return Err(MemnetError::SourceIsMemory(m));
            }
        }
        Ok(Self {
            graph,
            source,
            memories,
            gain,
            flows: None,
        })
    }

    /// Replaces the unit flows with explicit per-vertex flows (indexed by
    /// vertex id; the source's entry is ignored).
    pub fn with_flows(mut self, flows: Vec<f64>) -> Result<Self, MemnetError> {
        if flows.len() != self.graph.num_vertices() {
            return Err(MemnetError::FlowLength {
                expected: self.graph.num_vertices(),
                got: flows.len(),
            });
        }
        if let Some((vertex, &value)) = flows
            .iter()
            .enumerate()
            .find(|(_, f)| !f.is_finite() || **f < 0.0)
        {
            return Err(MemnetError::InvalidFlow { vertex, value });
        }
        self.flows = Some(flows);
        Ok(self)
    }

    /// Same deployment with a different gain.
    pub fn with_gain(&self, gain: f64) -> Result<Self, MemnetError> {
        let mut next = Self::new(self.graph, self.source, self.memories.clone(), gain)?;
        next.flows = self.flows.clone();
        Ok(next)
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    /// Memories in ascending id order.
    pub fn memories(&self) -> &[VertexId] {
        &self.memories
    }

    pub fn num_memories(&self) -> usize {
        self.memories.len()
    }

    pub fn is_memory(&self, v: VertexId) -> bool {
        self.memories.binary_search(&v).is_ok()
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn flow(&self, v: VertexId) -> f64 {
        self.flows.as_ref().map_or(1.0, |f| f[v])
    }

    pub fn destinations(&self) -> impl Iterator<Item = VertexId> + '_ {
        let s = self.source;
        (0..self.graph.num_vertices()).filter(move |&v| v != s)
    }
}

/// Cost of reaching a destination `hops_from_memory` hops past a memory that
/// sits `memory_depth` hops from the source.
///
/// Every comparison between memory routes goes through this one expression
/// so that equal `(depth, hops)` pairs always produce bit-identical costs.
#[inline]
pub fn route_cost(memory_depth: u32, hops_from_memory: u32, gain: f64) -> f64 {
    f64::from(memory_depth) / gain + f64::from(hops_from_memory)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::graph::Graph;

    pub const S: usize = 0;
    pub const C1: usize = 1;
    pub const C2: usize = 2;
    pub const MU: usize = 3;
    pub const C3: usize = 4;
    pub const C4: usize = 5;

    /// S - C1 - C2 - μ, with C3 and C4 hanging off μ.
    pub fn line_with_memory() -> Graph {
        Graph::from_edges(6, [(S, C1), (C1, C2), (C2, MU), (MU, C3), (MU, C4)]).unwrap()
    }

    /// The memory here only relays; it requests nothing itself.
    pub fn line_flows() -> Vec<f64> {
        let mut f = vec![1.0; 6];
        f[MU] = 0.0;
        f
    }
}
