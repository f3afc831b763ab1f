//! Random perturbation `G_p` of the unit weights and shortest-path trees under
//! the exact perturbed lengths.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{Dist, PLen};
use crate::graph::{EdgeId, Graph, Vertex};
use crate::NONE;

/// Edge `e` weighs `1 + r[e] / scale`. Every `r[e]` lies in
/// `[1, scale / (n + 1))`, so a simple path's perturbation stays below one.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    r: Vec<u128>,
    scale: u128,
    seed: u64,
}

impl Perturbation {
    /// Explicit values, for fixtures. Panics if a value is zero or the scale
    /// is too small for `n`.
    pub fn from_values(n: usize, r: Vec<u128>, scale: u128) -> Perturbation {
        let bound = scale / (n as u128 + 1);
        assert!(
            r.iter().all(|&x| x >= 1 && x < bound.max(2)),
            "perturbation values must lie in [1, scale / (n + 1))"
        );
        Perturbation { r, scale, seed: 0 }
    }

    pub fn r(&self, e: EdgeId) -> u128 {
        self.r[e as usize]
    }

    pub fn values(&self) -> &[u128] {
        &self.r
    }

    pub fn scale(&self) -> u128 {
        self.scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl fmt::Debug for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Perturbation")
            .field("seed", &self.seed)
            .field("scale", &self.scale)
            .field("m", &self.r.len())
            .finish()
    }
}

/// Smallest power of two `M` with `M / (n + 1) >= max(n^4, 2)`.
pub fn scale_for(n: usize) -> u128 {
    let n = n as u128;
    let need = (n * n * n * n).max(2) * (n + 1);
    need.next_power_of_two()
}

pub fn perturb(g: &Graph, seed: u64) -> Perturbation {
    let scale = scale_for(g.n());
    let bound = scale / (g.n() as u128 + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = (0..g.m()).map(|_| rng.gen_range(1..bound)).collect();
    Perturbation { r, scale, seed }
}

/// Shortest-path tree under perturbed lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpTree {
    pub root: Vertex,
    /// Parent vertex, `NONE` for the root and unreachable vertices.
    pub parent: Vec<Vertex>,
    pub parent_edge: Vec<EdgeId>,
    pub dist: Vec<PLen>,
    /// Reachable vertices in nondecreasing distance order, root first.
    pub order: Vec<Vertex>,
    /// Vertices that had more than one admissible parent.
    pub ties: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unreachable(pub Vertex);

impl fmt::Display for Unreachable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertex {} is unreachable from the root", self.0)
    }
}

impl SpTree {
    pub fn hops(&self, v: Vertex) -> Dist {
        self.dist[v as usize].dist()
    }

    pub fn reachable(&self, v: Vertex) -> bool {
        self.dist[v as usize].is_finite()
    }

    /// Root-to-`v` vertex sequence.
    pub fn tree_path(&self, v: Vertex) -> Result<Vec<Vertex>, Unreachable> {
        if !self.reachable(v) {
            return Err(Unreachable(v));
        }
        let mut path = Vec::with_capacity(self.dist[v as usize].hops as usize + 1);
        let mut w = v;
        path.push(w);
        while w != self.root {
            w = self.parent[w as usize];
            path.push(w);
        }
        path.reverse();
        Ok(path)
    }
}

/// Lexicographic `(hops, frac)` shortest paths from `root`. Hop distances
/// come from a plain BFS; each vertex then picks the predecessor one layer
/// closer with the smallest perturbed length, in BFS order.
pub fn sssp(g: &Graph, p: &Perturbation, root: Vertex) -> SpTree {
    let n = g.n();
    let mut hops = Vec::new();
    let mut order = Vec::new();
    g.hops_avoiding(root, |_| false, &mut hops, &mut order);
    let mut dist = vec![PLen::INF; n];
    let mut parent = vec![NONE; n];
    let mut parent_edge = vec![NONE; n];
    let mut ties = 0;
    dist[root as usize] = PLen::ZERO;
    for &v in &order[1..] {
        let layer = hops[v as usize].raw() - 1;
        let mut best = PLen::INF;
        let mut count = 0;
        for &(w, e) in g.neighbors(v) {
            if hops[w as usize].raw() != layer {
                continue;
            }
            let cand = dist[w as usize].step(p.r(e));
            if cand < best {
                best = cand;
                count = 1;
                parent[v as usize] = w;
                parent_edge[v as usize] = e;
            } else if cand == best {
                count += 1;
            }
        }
        if count > 1 {
            ties += 1;
        }
        dist[v as usize] = best;
    }
    SpTree {
        root,
        parent,
        parent_edge,
        dist,
        order,
        ties,
    }
}

/// Tie events over the shortest-path trees of every root.
pub fn count_ties(g: &Graph, p: &Perturbation) -> u64 {
    (0..g.n() as Vertex)
        .map(|r| sssp(g, p, r).ties as u64)
        .sum()
}

/// True iff every ordered pair has exactly one `G_p`-shortest path.
pub fn verify_unique_shortest_paths(g: &Graph, p: &Perturbation) -> bool {
    count_ties(g, p) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn d(v: u32) -> Dist {
        Dist::new(v)
    }

    #[test]
    fn scale_leaves_room() {
        for n in [1usize, 2, 3, 10, 64, 1000, 5000] {
            let m = scale_for(n);
            let bound = m / (n as u128 + 1);
            assert!(bound >= 2);
            assert!(bound >= (n as u128).pow(4));
            // longest simple path sum stays below the scale
            assert!((n as u128) * (bound - 1) < m);
        }
    }

    #[test]
    fn path_and_triangle() {
        let p3 = gen::path(3);
        let t = sssp(&p3, &perturb(&p3, 5), 0);
        assert_eq!(
            (0..3).map(|v| t.hops(v)).collect::<Vec<_>>(),
            vec![d(0), d(1), d(2)]
        );
        assert_eq!(t.tree_path(2).unwrap(), vec![0, 1, 2]);
        assert_eq!(t.tree_path(0).unwrap(), vec![0]);
        let k3 = gen::complete(3);
        let t = sssp(&k3, &perturb(&k3, 5), 0);
        assert_eq!(
            (0..3).map(|v| t.hops(v)).collect::<Vec<_>>(),
            vec![d(0), d(1), d(1)]
        );
    }

    #[test]
    fn c4_parent_follows_smaller_frac() {
        let c4 = gen::cycle(4);
        let p = perturb(&c4, 1);
        let t = sssp(&c4, &p, 0);
        assert_eq!(
            (0..4).map(|v| t.hops(v)).collect::<Vec<_>>(),
            vec![d(0), d(1), d(2), d(1)]
        );
        // edges: 0:(0,1) 1:(1,2) 2:(2,3) 3:(3,0)
        let via1 = p.r(0) + p.r(1);
        let via3 = p.r(3) + p.r(2);
        assert_ne!(via1, via3);
        let expected = if via1 < via3 {
            vec![0, 1, 2]
        } else {
            vec![0, 3, 2]
        };
        assert_eq!(t.tree_path(2).unwrap(), expected);
        assert_eq!(t.dist[2].frac, via1.min(via3));
        assert!(verify_unique_shortest_paths(&c4, &p));
    }

    #[test]
    fn symmetric_weights_tie() {
        let c4 = gen::cycle(4);
        let p = Perturbation::from_values(4, vec![1; 4], scale_for(4));
        assert!(!verify_unique_shortest_paths(&c4, &p));
        assert!(verify_unique_shortest_paths(
            &gen::path(3),
            &perturb(&gen::path(3), 9)
        ));
    }

    #[test]
    fn k4_default_seed_is_unique() {
        let k4 = gen::complete(4);
        assert!(verify_unique_shortest_paths(&k4, &perturb(&k4, 0)));
    }

    #[test]
    fn unreachable_is_reported() {
        let g = Graph::new(3, vec![(0, 1)]).unwrap();
        let t = sssp(&g, &perturb(&g, 0), 0);
        assert_eq!(t.hops(2), Dist::INF);
        assert_eq!(t.tree_path(2), Err(Unreachable(2)));
    }
}
