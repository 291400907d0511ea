use memgain_core::graph::{bfs_distances, generate_er, Graph, RandomGraphSpec, VertexId};
use memgain_core::memnet::{
    benefit_set, effective_distances, effective_distances_exhaustive, predicted_radius, route_cost,
    total_flow, vertex_boundary, Deployment,
};
use memgain_core::seed::{mix, rng_from};
use proptest::prelude::*;
use rand::seq::index;
use rand::Rng;

/// Connected graph plus a memory subset of the non-source vertices.
fn scenario() -> impl Strategy<Value = (Graph, Vec<VertexId>, f64)> {
    (
        3usize..80,
        1.1f64..3.0,
        any::<u64>(),
        0.0f64..1.0,
        1.0f64..6.0,
    )
        .prop_map(|(n, c, seed, frac, gain)| {
            let g = generate_er(&RandomGraphSpec::new(n, c, seed).unwrap()).unwrap();
            let m = ((n - 1) as f64 * frac).round() as usize;
            let mut rng = rng_from(mix(seed, 9));
            let mems = index::sample(&mut rng, n - 1, m)
                .into_iter()
                .map(|i| i + 1)
                .collect();
            (g, mems, gain)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn grouped_search_equals_one_bfs_per_memory((g, mems, gain) in scenario()) {
        let dep = Deployment::new(&g, 0, mems, gain).unwrap();
        prop_assert_eq!(effective_distances(&dep).unwrap(), effective_distances_exhaustive(&dep).unwrap());
    }

    #[test]
    fn field_bounds_and_d1_rule((g, mems, gain) in scenario()) {
        let dep = Deployment::new(&g, 0, mems, gain).unwrap();
        let field = effective_distances(&dep).unwrap();
        for v in dep.destinations() {
            let d = f64::from(field.direct_distance(v));
            let e = field.eff_dist(v);
            prop_assert!(e <= d);
            prop_assert!(e >= d / gain - 1e-12);
            match field.chosen_memory(v) {
                Some(mu) => {
                    prop_assert!(field.in_d1(v));
                    let depth = field.direct_distance(mu);
                    let cost = route_cost(depth, field.memory_hops(v), gain);
                    prop_assert_eq!(cost, e);
                    prop_assert!(cost < d);
                }
                None => {
                    prop_assert!(!field.in_d1(v));
                    prop_assert_eq!(e, d);
                }
            }
        }
    }

    #[test]
    fn gain_bounds_and_unit_flow_consistency((g, mems, gain) in scenario()) {
        let dep = Deployment::new(&g, 0, mems, gain).unwrap();
        let field = effective_distances(&dep).unwrap();
        let flow = total_flow(&dep).unwrap();
        prop_assert!(flow.flow_with_mem <= flow.flow_no_mem);
        prop_assert!(flow.net_gain >= 1.0);
        prop_assert!(flow.net_gain <= gain + 1e-12);
        let sum: f64 = dep.destinations().map(|v| field.eff_dist(v)).sum();
        prop_assert!((flow.flow_with_mem - sum).abs() <= 1e-9 * sum.max(1.0));
        prop_assert!((flow.net_gain - flow.flow_no_mem / flow.flow_with_mem).abs() <= 1e-12);
    }

    #[test]
    fn more_memories_never_cost_more((g, mems, gain) in scenario(), extra in any::<prop::sample::Index>()) {
        let dep = Deployment::new(&g, 0, mems.clone(), gain).unwrap();
        let n = g.num_vertices();
        let add = 1 + extra.index(n - 1);
        let mut more = mems;
        if !more.contains(&add) {
            more.push(add);
        }
        let bigger = Deployment::new(&g, 0, more, gain).unwrap();
        let (a, b) = (effective_distances(&dep).unwrap(), effective_distances(&bigger).unwrap());
        for v in dep.destinations() {
            prop_assert!(b.eff_dist(v) <= a.eff_dist(v));
        }
        prop_assert!(total_flow(&bigger).unwrap().flow_with_mem <= total_flow(&dep).unwrap().flow_with_mem);
    }

    #[test]
    fn larger_gain_never_costs_more((g, mems, gain) in scenario(), bump in 0.0f64..3.0) {
        let dep = Deployment::new(&g, 0, mems, gain).unwrap();
        let stronger = dep.with_gain(gain + bump).unwrap();
        prop_assert!(total_flow(&stronger).unwrap().flow_with_mem <= total_flow(&dep).unwrap().flow_with_mem);
    }

    #[test]
    fn d1_members_lie_in_their_benefit_set((g, mems, gain) in scenario()) {
        let dep = Deployment::new(&g, 0, mems, gain).unwrap();
        let field = effective_distances(&dep).unwrap();
        let from_source = bfs_distances(&g, 0).unwrap();
        for &mu in dep.memories() {
            let set = benefit_set(&dep, mu).unwrap();
            let from_mu = bfs_distances(&g, mu).unwrap();
            for v in 0..g.num_vertices() {
                let ok = route_cost(from_source.get(mu), from_mu.get(v), gain) <= f64::from(from_source.get(v));
                prop_assert_eq!(set.contains(v), ok);
            }
        }
        for v in field.d1() {
            let mu = field.chosen_memory(v).unwrap();
            prop_assert!(benefit_set(&dep, mu).unwrap().contains(v));
        }
    }

    #[test]
    fn walks_realize_effective_distances((g, mems, gain) in scenario(), pick in any::<prop::sample::Index>()) {
        let dep = Deployment::new(&g, 0, mems, gain).unwrap();
        let field = effective_distances(&dep).unwrap();
        let dest = 1 + pick.index(g.num_vertices() - 1);
        let walk = field.walk(&g, dest).unwrap();
        prop_assert_eq!(walk[0], 0);
        prop_assert_eq!(*walk.last().unwrap(), dest);
        for w in walk.windows(2) {
            prop_assert!(g.neighbors(w[0]).contains(&w[1]));
        }
        let hops = walk.len() as u32 - 1;
        match field.chosen_memory(dest) {
            Some(mu) => {
                let depth = field.direct_distance(mu);
                prop_assert_eq!(walk[depth as usize], mu);
                prop_assert_eq!(route_cost(depth, hops - depth, gain), field.eff_dist(dest));
            }
            None => prop_assert_eq!(hops, field.direct_distance(dest)),
        }
    }
}

#[test]
fn benefit_sets_respect_the_neighborhood_bound() {
    // |N(μ)| <= (1 + 2ε)(Np)^r with ε = 1/2 for most single memories.
    let (n, gain, eps) = (8192usize, 1.25, 0.5);
    let mut spec = RandomGraphSpec::new(n, 2.0, 0).unwrap();
    let np = n as f64 * spec.edge_probability();
    let r = predicted_radius(n as f64, gain, 0.0).unwrap();
    let bound = (1.0 + 2.0 * eps) * np.powf(r);
    let trials = 100;
    let mut within = 0;
    for t in 0..trials {
        spec.seed = mix(1001, t);
        let g = generate_er(&spec).unwrap();
        let mu = rng_from(mix(1002, t)).random_range(1..n);
        let dep = Deployment::new(&g, 0, [mu], gain).unwrap();
        if benefit_set(&dep, mu).unwrap().len() as f64 <= bound {
            within += 1;
        }
    }
    assert!(
        within * 10 >= trials * 9,
        "{within}/{trials} within {bound}"
    );
}

#[test]
fn vertex_boundary_of_small_sets_is_large() {
    let n = 1000;
    let mut spec = RandomGraphSpec::new(n, 2.0, 0).unwrap();
    let np = n as f64 * spec.edge_probability();
    let mut ok = 0;
    for t in 0..200 {
        spec.seed = mix(2001, t);
        let g = generate_er(&spec).unwrap();
        let mut rng = rng_from(mix(2002, t));
        let vset = index::sample(&mut rng, n, 10).into_vec();
        let boundary = vertex_boundary(&g, &vset).unwrap();
        assert!(boundary.iter().all(|u| !vset.contains(u)));
        if boundary.len() as f64 >= 0.7 * np * 10.0 {
            ok += 1;
        }
    }
    assert!(ok * 100 >= 200 * 95, "{ok}/200");
}
