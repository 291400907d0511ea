use serde::{Deserialize, Serialize};

use super::{route_cost, Deployment, MemnetError};
use crate::graph::{bfs_distances, Graph, GraphError, VertexId};

/// Vertices whose route through one memory costs no more than going direct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenefitSet {
    pub memory: VertexId,
    /// Ascending vertex ids.
    pub members: Vec<VertexId>,
    /// Hop limit around the memory; `None` means unbounded.
    pub radius_used: Option<u32>,
}

impl BenefitSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// `{ v : d(S,μ)/g + d(μ,v) <= d(S,v) }`.
///
/// Uses the non-strict inequality, so a vertex whose memory route exactly
/// ties its direct route is a member here while staying outside D1 in
/// [`super::effective_distances`].
pub fn benefit_set(dep: &Deployment<'_>, memory: VertexId) -> Result<BenefitSet, MemnetError> {
    benefit_set_within(dep, memory, None)
}

/// [`benefit_set`] restricted to vertices within `radius` hops of the memory.
pub fn benefit_set_within(
    dep: &Deployment<'_>,
    memory: VertexId,
    radius: Option<u32>,
) -> Result<BenefitSet, MemnetError> {
    if !dep.is_memory(memory) {
        return Err(MemnetError::UnknownMemory(memory));
    }
    let graph = dep.graph();
    let from_source = bfs_distances(graph, dep.source())?;
    let from_memory = bfs_distances(graph, memory)?;
    let depth = from_source.get(memory);
    let members = (0..graph.num_vertices())
        .filter(|&v| {
            let hops = from_memory.get(v);
            radius.is_none_or(|r| hops <= r)
                && route_cost(depth, hops, dep.gain()) <= f64::from(from_source.get(v))
        })
        .collect();
    Ok(BenefitSet {
        memory,
        members,
        radius_used: radius,
    })
}

/// Vertices outside `vset` adjacent to at least one vertex of `vset`.
/// Returned in ascending order.
pub fn vertex_boundary(graph: &Graph, vset: &[VertexId]) -> Result<Vec<VertexId>, GraphError> {
    let mut inside = vec![false; graph.num_vertices()];
    for &v in vset {
        graph.check_vertex(v)?;
        inside[v] = true;
    }
    let mut on_boundary = vec![false; graph.num_vertices()];
    for &v in vset {
        for &u in graph.neighbors(v) {
            if !inside[u] {
                on_boundary[u] = true;
            }
        }
    }
    Ok(on_boundary
        .iter()
        .enumerate()
        .filter_map(|(u, &b)| b.then_some(u))
        .collect())
}
