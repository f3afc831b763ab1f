use std::collections::VecDeque;

use proptest::prelude::*;
use repath_core::{build_oracle, perturb, sssp, Dist, Graph, OracleParams, Vertex};

/// Plain BFS in `g` without edge `skip`; written independently of the crate.
fn bfs(g: &Graph, s: Vertex, skip: Option<u32>) -> Vec<Option<u32>> {
    let mut d = vec![None; g.n()];
    d[s as usize] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &(y, e) in g.neighbors(x) {
            if Some(e) != skip && d[y as usize].is_none() {
                d[y as usize] = Some(d[x as usize].unwrap() + 1);
                q.push_back(y);
            }
        }
    }
    d
}

fn as_dist(d: Option<u32>) -> Dist {
    d.map_or(Dist::INF, Dist::new)
}

prop_compose! {
    fn small_graph()(n in 2usize..25)(
        n in Just(n),
        mask in proptest::collection::vec(proptest::bool::weighted(0.35), n * (n - 1) / 2),
    ) -> Graph {
        let mut edges = Vec::new();
        let mut k = 0;
        for u in 0..n as Vertex {
            for v in u + 1..n as Vertex {
                if mask[k] {
                    edges.push((u, v));
                }
                k += 1;
            }
        }
        Graph::new(n, edges).unwrap()
    }
}

prop_compose! {
    fn instance()(g in small_graph())(
        pick in proptest::collection::vec(any::<bool>(), g.n()),
        first in 0..g.n() as Vertex,
        perturb_seed in any::<u64>(),
        terminal_seed in any::<u64>(),
        g in Just(g),
    ) -> (Graph, Vec<Vertex>, OracleParams) {
        let mut sources: Vec<Vertex> = (0..g.n() as Vertex).filter(|&v| pick[v as usize]).collect();
        if !sources.contains(&first) {
            sources.push(first);
        }
        let params = OracleParams { perturb_seed, terminal_seed, ..OracleParams::default() };
        (g, sources, params)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn every_answer_matches_bfs((g, sources, params) in instance()) {
        let o = build_oracle(&g, &sources, &params).unwrap();
        for &s in o.sources() {
            for e in 0..g.m() as u32 {
                let truth = bfs(&g, s, Some(e));
                for t in 0..g.n() as Vertex {
                    let a = o.query(s, t, e).unwrap();
                    prop_assert_eq!(a.distance, as_dist(truth[t as usize]), "s={} t={} e={}", s, t, e);
                    prop_assert!(!a.fell_back);
                }
            }
        }
    }

    #[test]
    fn answers_are_symmetric_between_sources((g, sources, params) in instance()) {
        let o = build_oracle(&g, &sources, &params).unwrap();
        for &s in o.sources() {
            for &t in o.sources() {
                for e in 0..g.m() as u32 {
                    prop_assert_eq!(o.query(s, t, e).unwrap().distance, o.query(t, s, e).unwrap().distance);
                }
            }
        }
    }

    #[test]
    fn failures_never_shorten_paths((g, sources, params) in instance()) {
        let o = build_oracle(&g, &sources, &params).unwrap();
        for &s in o.sources() {
            let base = bfs(&g, s, None);
            for t in 0..g.n() as Vertex {
                prop_assert_eq!(o.b0(s, t), as_dist(base[t as usize]));
                for e in 0..g.m() as u32 {
                    prop_assert!(o.query(s, t, e).unwrap().distance >= o.b0(s, t));
                }
            }
        }
    }

    #[test]
    fn perturbed_tree_is_a_bfs_tree(g in small_graph(), seed in any::<u64>(), root in 0u32..2) {
        let p = perturb(&g, seed);
        let tree = sssp(&g, &p, root);
        let d = bfs(&g, root, None);
        for v in 0..g.n() as Vertex {
            prop_assert_eq!(tree.hops(v), as_dist(d[v as usize]));
            if let Ok(path) = tree.tree_path(v) {
                prop_assert_eq!(path.len() as u32 - 1, d[v as usize].unwrap());
                prop_assert!(path.windows(2).all(|w| g.edge_between(w[0], w[1]).is_some()));
            }
        }
    }

    #[test]
    fn builds_are_deterministic((g, sources, params) in instance()) {
        let a = build_oracle(&g, &sources, &params).unwrap();
        let b = build_oracle(&g, &sources, &params).unwrap();
        prop_assert!(a == b);
    }
}
