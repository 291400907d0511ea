use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{route_cost, Deployment, MemnetError};
use crate::graph::{bfs_distances, nearest_sources, DistanceField, Graph, VertexId};

/// Per-destination effective distances and the memory each destination uses.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveDistanceField {
    from_source: DistanceField,
    eff_dist: Vec<f64>,
    chosen: Vec<Option<VertexId>>,
    memory_hops: Vec<u32>,
}

impl EffectiveDistanceField {
    pub fn source(&self) -> VertexId {
        self.from_source.origin()
    }

    /// Plain hop distances from the source.
    pub fn direct(&self) -> &DistanceField {
        &self.from_source
    }

    pub fn direct_distance(&self, v: VertexId) -> u32 {
        self.from_source.get(v)
    }

    pub fn eff_dist(&self, v: VertexId) -> f64 {
        self.eff_dist[v]
    }

    pub fn eff_dists(&self) -> &[f64] {
        &self.eff_dist
    }

    /// Memory on the effective walk to `v`, if that walk is strictly
    /// cheaper than the direct route.
    pub fn chosen_memory(&self, v: VertexId) -> Option<VertexId> {
        self.chosen[v]
    }

    /// Hops from the chosen memory to `v` (0 when `v` uses no memory).
    pub fn memory_hops(&self, v: VertexId) -> u32 {
        self.memory_hops[v]
    }

    pub fn in_d1(&self, v: VertexId) -> bool {
        self.chosen[v].is_some()
    }

    pub fn num_vertices(&self) -> usize {
        self.eff_dist.len()
    }

    /// Destinations that benefit from some memory.
    pub fn d1(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.num_vertices()).filter(|&v| self.in_d1(v))
    }

    /// Lowest-cost walk from the source to `dest`: a shortest path to the
    /// chosen memory followed by a shortest path on to `dest`, or a plain
    /// shortest path when no memory helps. May revisit vertices.
    pub fn walk(&self, graph: &Graph, dest: VertexId) -> Result<Vec<VertexId>, MemnetError> {
        graph.check_vertex(dest)?;
        match self.chosen[dest] {
            None => Ok(self.from_source.path_to(graph, dest)),
            Some(mu) => {
                let mut walk = self.from_source.path_to(graph, mu);
                let onward = bfs_distances(graph, mu)?.path_to(graph, dest);
                walk.extend_from_slice(&onward[1..]);
                Ok(walk)
            }
        }
    }

    fn new_direct(from_source: DistanceField) -> Self {
        let eff_dist = from_source
            .as_slice()
            .iter()
            .map(|&d| f64::from(d))
            .collect();
        let n = from_source.len();
        Self {
            from_source,
            eff_dist,
            chosen: vec![None; n],
            memory_hops: vec![0; n],
        }
    }

    // Keep the memory route if it is strictly cheaper, or ties the current
    // memory route with a smaller memory id. A tie with the direct route
    // keeps the direct route.
    fn offer(&mut self, v: VertexId, memory: VertexId, hops: u32, cost: f64) {
        let better = match self.chosen[v] {
            None => cost < self.eff_dist[v],
            Some(current) => {
                cost < self.eff_dist[v] || (cost == self.eff_dist[v] && memory < current)
            }
        };
        if better {
            self.eff_dist[v] = cost;
            self.chosen[v] = Some(memory);
            self.memory_hops[v] = hops;
        }
    }
}

/// Effective distance of every destination.
///
/// Memories are grouped by their hop depth from the source; within a group
/// every memory has the same compressed leg, so one multi-source BFS per
/// depth finds the best memory for each vertex. Total work is one BFS from
/// the source plus one BFS per distinct memory depth.
pub fn effective_distances(dep: &Deployment<'_>) -> Result<EffectiveDistanceField, MemnetError> {
    let graph = dep.graph();
    let from_source = bfs_distances(graph, dep.source())?;
    let mut by_depth: BTreeMap<u32, Vec<VertexId>> = BTreeMap::new();
    for &m in dep.memories() {
        by_depth.entry(from_source.get(m)).or_default().push(m);
    }
    let mut field = EffectiveDistanceField::new_direct(from_source);
    let source = dep.source();
    for (depth, group) in by_depth {
        let (hops, owner) = nearest_sources(graph, &group);
        for v in (0..graph.num_vertices()).filter(|&v| v != source) {
            let cost = route_cost(depth, hops[v], dep.gain());
            field.offer(v, owner[v], hops[v], cost);
        }
    }
    Ok(field)
}

/// Reference evaluation with one BFS per memory. Produces exactly the same
/// field as [`effective_distances`]; quadratic in the memory count.
pub fn effective_distances_exhaustive(
    dep: &Deployment<'_>,
) -> Result<EffectiveDistanceField, MemnetError> {
    let graph = dep.graph();
    let mut field = EffectiveDistanceField::new_direct(bfs_distances(graph, dep.source())?);
    for &m in dep.memories() {
        let depth = field.direct_distance(m);
        let from_memory = bfs_distances(graph, m)?;
        for v in dep.destinations() {
            let hops = from_memory.get(v);
            field.offer(v, m, hops, route_cost(depth, hops, dep.gain()));
        }
    }
    Ok(field)
}

/// Effective walk to one destination.
pub fn effective_walk(dep: &Deployment<'_>, dest: VertexId) -> Result<Vec<VertexId>, MemnetError> {
    effective_distances(dep)?.walk(dep.graph(), dest)
}

/// Total bit×hop flow with and without memories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSummary {
    pub flow_no_mem: f64,
    pub flow_with_mem: f64,
    pub net_gain: f64,
}

impl FlowSummary {
    pub fn from_field(
        dep: &Deployment<'_>,
        field: &EffectiveDistanceField,
    ) -> Result<Self, MemnetError> {
        let (mut f0, mut f) = (0.0, 0.0);
        for v in dep.destinations() {
            let w = dep.flow(v);
            f0 += w * f64::from(field.direct_distance(v));
            f += w * field.eff_dist(v);
        }
        if f <= 0.0 {
            return Err(MemnetError::NoFlow);
        }
        Ok(Self {
            flow_no_mem: f0,
            flow_with_mem: f,
            net_gain: f0 / f,
        })
    }
}

pub fn total_flow(dep: &Deployment<'_>) -> Result<FlowSummary, MemnetError> {
    FlowSummary::from_field(dep, &effective_distances(dep)?)
}

/// Network-wide gain `F0 / F`.
pub fn network_gain(dep: &Deployment<'_>) -> Result<f64, MemnetError> {
    Ok(total_flow(dep)?.net_gain)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    fn line_deployment(g: &Graph) -> Deployment<'_> {
        Deployment::new(g, S, [MU], 4.0)
            .unwrap()
            .with_flows(line_flows())
            .unwrap()
    }

    #[test]
    fn line_topology_effective_distances() {
        let g = line_with_memory();
        let dep = line_deployment(&g);
        let field = effective_distances(&dep).unwrap();
        assert_eq!(field.eff_dist(C1), 1.0);
        assert_eq!(field.eff_dist(C2), 1.75);
        assert_eq!(field.eff_dist(C3), 1.75);
        assert_eq!(field.eff_dist(C4), 1.75);
        assert_eq!(field.eff_dist(MU), 0.75);
        assert!(!field.in_d1(C1));
        for v in [C2, C3, C4, MU] {
            assert_eq!(field.chosen_memory(v), Some(MU));
        }
        assert_eq!(field, effective_distances_exhaustive(&dep).unwrap());
    }

    #[test]
    fn line_topology_walks() {
        let g = line_with_memory();
        let dep = line_deployment(&g);
        assert_eq!(effective_walk(&dep, C2).unwrap(), vec![S, C1, C2, MU, C2]);
        assert_eq!(effective_walk(&dep, C4).unwrap(), vec![S, C1, C2, MU, C4]);
        assert_eq!(effective_walk(&dep, C1).unwrap(), vec![S, C1]);
    }

    #[test]
    fn line_topology_flow() {
        let g = line_with_memory();
        let summary = total_flow(&line_deployment(&g)).unwrap();
        assert_eq!(summary.flow_no_mem, 11.0);
        assert_eq!(summary.flow_with_mem, 6.25);
        assert!((summary.net_gain - 1.76).abs() < 1e-12);
    }

    #[test]
    fn single_hop_memory_halves_the_first_link() {
        // S - μ - C, memory compresses by 2, μ itself requests nothing.
        let g = Graph::path(3);
        let dep = Deployment::new(&g, 0, [1], 2.0)
            .unwrap()
            .with_flows(vec![0.0, 0.0, 1.0])
            .unwrap();
        let summary = total_flow(&dep).unwrap();
        assert_eq!(summary.flow_no_mem, 2.0);
        assert_eq!(summary.flow_with_mem, 1.5);
    }

    #[test]
    fn no_memories_means_no_gain() {
        let g = Graph::path(6);
        let dep = Deployment::new(&g, 0, [], 3.0).unwrap();
        let summary = total_flow(&dep).unwrap();
        assert_eq!(summary.flow_with_mem, summary.flow_no_mem);
        assert_eq!(summary.net_gain, 1.0);
    }

    #[test]
    fn unit_gain_never_helps() {
        let g = line_with_memory();
        let dep = Deployment::new(&g, S, [C2, MU], 1.0).unwrap();
        let field = effective_distances(&dep).unwrap();
        for v in dep.destinations() {
            assert_eq!(field.eff_dist(v), f64::from(field.direct_distance(v)));
            assert!(!field.in_d1(v));
        }
        assert_eq!(network_gain(&dep).unwrap(), 1.0);
    }

    #[test]
    fn all_memories_give_full_gain() {
        let g = line_with_memory();
        let dep = Deployment::new(&g, S, 1..6, 4.0).unwrap();
        assert!((network_gain(&dep).unwrap() - 4.0).abs() < 1e-12);
        let field = effective_distances(&dep).unwrap();
        for v in dep.destinations() {
            assert_eq!(field.chosen_memory(v), Some(v));
        }
    }

    #[test]
    fn equal_memory_routes_pick_lowest_id() {
        // Square 0-1-3-2-0: vertices 1 and 2 are both one hop from the source
        // and one hop from 3.
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let dep = Deployment::new(&g, 0, [2, 1], 4.0).unwrap();
        let field = effective_distances(&dep).unwrap();
        assert_eq!(field.chosen_memory(3), Some(1));
        assert_eq!(field.eff_dist(3), 1.25);
        assert_eq!(field, effective_distances_exhaustive(&dep).unwrap());
    }

    #[test]
    fn tie_with_direct_route_keeps_direct() {
        // S - 1, 1 - 2, 1 - 3, 2 - 3; memory at 2 (depth 2), g = 2.
        // Vertex 3 via the memory costs 2/2 + 1 = 2, exactly its depth.
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (1, 3), (2, 3)]).unwrap();
        let dep = Deployment::new(&g, 0, [2], 2.0).unwrap();
        let field = effective_distances(&dep).unwrap();
        assert_eq!(field.eff_dist(3), 2.0);
        assert_eq!(field.chosen_memory(3), None);
        assert_eq!(field.chosen_memory(2), Some(2));
        assert_eq!(field.eff_dist(2), 1.0);
    }

    #[test]
    fn memory_on_disconnected_graph_is_an_error() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let dep = Deployment::new(&g, 0, [1], 2.0).unwrap();
        assert!(matches!(
            effective_distances(&dep),
            Err(MemnetError::Graph(_))
        ));
    }

    #[test]
    fn zero_demand_is_reported() {
        let g = Graph::path(3);
        let dep = Deployment::new(&g, 0, [1], 2.0)
            .unwrap()
            .with_flows(vec![0.0; 3])
            .unwrap();
        assert_eq!(total_flow(&dep).unwrap_err(), MemnetError::NoFlow);
    }
}
