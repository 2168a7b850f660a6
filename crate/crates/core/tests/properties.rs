use proptest::prelude::*;

use locald::classic::{diameter_bound, exp_clock_ldd, mpx_cluster, sparse_cover};
use locald::covering::approx_cover;
use locald::graph::{
    generate, subdivide, validate_decomposition, DiameterMode, Distance, FamilySpec, Graph, Hypergraph,
};
use locald::harness::random_instance;
use locald::ilp::{feasible, json, Sense};
use locald::packing::approx_pack;
use locald::sim::{intervals_for, ConstantProfile, Flavor, Params, SimContext, Topology};
use locald::whp::whp_ldd;

fn graph_ctx(g: &Graph, seed: u64) -> SimContext {
    SimContext::new(Topology::Graph(g.clone()), g.vertex_count().max(2), seed, ConstantProfile::desk()).unwrap()
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, any::<u64>(), 0.0f64..0.5).prop_map(|(n, seed, p)| generate(&FamilySpec::Gnp(n, p), seed).unwrap())
}

fn arb_hypergraph() -> impl Strategy<Value = Hypergraph> {
    (3usize..20).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::btree_set(0..n, 1..=3), 0..25)
            .prop_map(move |es| Hypergraph::new(n, es.into_iter().map(|e| e.into_iter().collect()).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn neighbourhoods_grow_and_reach_the_component(g in arb_graph(25), v in 0usize..25, r in 0usize..6) {
        let v = v % g.vertex_count();
        let small = g.neighborhood(v, r).unwrap();
        let big = g.neighborhood(v, r + 1).unwrap();
        prop_assert!(small.iter().all(|u| big.contains(u)));
        let comp = g.components();
        let size = comp.iter().filter(|&&c| c == comp[v]).count();
        prop_assert_eq!(g.neighborhood(v, g.vertex_count()).unwrap().len(), size);
    }

    #[test]
    fn weak_diameter_at_most_strong(g in arb_graph(20), mask in any::<u32>()) {
        let set: Vec<usize> = (0..g.vertex_count()).filter(|&v| mask >> v & 1 == 1).collect();
        prop_assume!(!set.is_empty());
        let weak = g.set_diameter(&set, DiameterMode::Weak).unwrap();
        let strong = g.set_diameter(&set, DiameterMode::Strong).unwrap();
        prop_assert!(weak <= strong);
    }

    #[test]
    fn subdivision_counts_and_parity(g in arb_graph(12), x in 1usize..4) {
        let s = subdivide(&g, x);
        prop_assert_eq!(s.vertex_count(), g.vertex_count() + 2 * x * g.edge_count());
        prop_assert_eq!(s.edge_count(), (2 * x + 1) * g.edge_count());
        prop_assert_eq!(s.is_bipartite(), g.is_bipartite());
    }

    #[test]
    fn ldd_intervals_are_disjoint_and_ordered(t in 1usize..12, r in 1usize..50) {
        let iv = intervals_for(Flavor::Ldd, Params { t, r });
        prop_assert_eq!(iv.len(), t + 1);
        prop_assert_eq!(iv[0].1, (t + 2) * r);
        prop_assert_eq!(iv[t].0, r + 1);
        for w in iv.windows(2) {
            prop_assert!(w[0].0 >= w[1].1);
            prop_assert_eq!(w[0].0, w[1].1 + 1);
        }
    }

    #[test]
    fn exp_clock_is_valid_and_reproducible(g in arb_graph(40), seed in any::<u64>(), lambda in 0.05f64..2.0) {
        let mut ctx = graph_ctx(&g, seed);
        let d = exp_clock_ldd(&mut ctx, lambda).unwrap();
        let bound = diameter_bound(&ctx, lambda).ceil() as usize;
        let rep = validate_decomposition(&g, &d, 1.0, usize::MAX).unwrap();
        prop_assert!(rep.non_adjacent_ok);
        prop_assert!(rep.max_strong_diameter <= Distance::Finite(bound));
        prop_assert_eq!(exp_clock_ldd(&mut graph_ctx(&g, seed), lambda).unwrap(), d);
    }

    #[test]
    fn mpx_cut_edges_are_exactly_the_crossing_edges(g in arb_graph(30), seed in any::<u64>()) {
        let out = mpx_cluster(&mut graph_ctx(&g, seed), 0.5).unwrap();
        let crossing: Vec<(usize, usize)> = g.edges().filter(|&(u, v)| out.centre[u] != out.centre[v]).collect();
        let mut cut = out.cut_edges.clone();
        cut.sort_unstable();
        prop_assert_eq!(cut, crossing);
    }

    #[test]
    fn whp_ldd_is_a_valid_decomposition(g in arb_graph(40), seed in any::<u64>(), eps in 0.1f64..0.9, refine: bool) {
        let d = whp_ldd(&mut graph_ctx(&g, seed), eps, refine).unwrap();
        let rep = validate_decomposition(&g, &d, eps, usize::MAX).unwrap();
        prop_assert!(rep.non_adjacent_ok);
        prop_assert_eq!(d.vertex_count(), g.vertex_count());
        prop_assert_eq!(whp_ldd(&mut graph_ctx(&g, seed), eps, refine).unwrap(), d);
    }

    #[test]
    fn sparse_cover_contains_every_hyperedge(h in arb_hypergraph(), seed in any::<u64>()) {
        let n = h.vertex_count();
        let mut ctx = SimContext::new(Topology::Hypergraph(h.clone()), n, seed, ConstantProfile::desk()).unwrap();
        let cover = sparse_cover(&mut ctx, (21.0f64 / 20.0).ln()).unwrap();
        let memberships = cover.memberships();
        for e in h.hyperedges() {
            prop_assert!(cover.covering_cluster(&memberships, e).is_some());
        }
        prop_assert!(cover.multiplicity.iter().all(|&x| x >= 1));
    }

    #[test]
    fn pack_and_cover_are_feasible(n in 2usize..14, m in 0usize..18, seed in any::<u64>(), eps in 0.2f64..0.8) {
        for sense in [Sense::Packing, Sense::Covering] {
            let inst = random_instance(sense, n, m, seed);
            let hyper = inst.associated_hypergraph();
            let n_tilde = n.max(inst.total_weight() as usize);
            let mut ctx = SimContext::new(Topology::Hypergraph(hyper), n_tilde, seed, ConstantProfile::desk()).unwrap();
            let a = match sense {
                Sense::Packing => approx_pack(&mut ctx, &inst, eps).unwrap(),
                Sense::Covering => approx_cover(&mut ctx, &inst, eps).unwrap(),
            };
            prop_assert!(feasible(&inst, &a).unwrap().is_empty());
        }
    }

    #[test]
    fn ilp_json_round_trips(n in 2usize..10, m in 0usize..10, seed in any::<u64>(), packing: bool) {
        let inst = random_instance(if packing { Sense::Packing } else { Sense::Covering }, n, m, seed);
        prop_assert_eq!(json::from_json(&json::to_json(&inst)).unwrap(), inst);
    }
}
