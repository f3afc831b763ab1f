//! `σ-BFS(t)`: the union of the source-to-`t` tree paths with every
//! degree-2 corridor contracted into a segment, plus its heavy-light
//! decomposition.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Vertex};
use crate::perturb::{sssp, Perturbation, SpTree};
use crate::NONE;

/// Contracted corridor from `upper` down to `lower` (closer to the target).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub upper: Vertex,
    pub lower: Vertex,
    pub upper_depth: u32,
    pub lower_depth: u32,
    pub heavy: bool,
    /// Chain id for heavy segments, `NONE` for light ones.
    pub chain: u32,
}

/// Maximal run of heavy segments, listed as node indices from the bottom
/// (closest to the target) to the top.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub nodes: Vec<u32>,
    pub top_depth: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaBfs {
    pub target: Vertex,
    /// Intersection vertices in increasing id order.
    pub nodes: Vec<Vertex>,
    pub node_depth: Vec<u32>,
    /// Segment whose upper endpoint is the node; `NONE` for the target.
    pub node_down: Vec<u32>,
    /// Node count of the subtree hanging from each node.
    pub size: Vec<u32>,
    pub heavy_child: Vec<u32>,
    pub segments: Vec<Segment>,
    pub chains: Vec<Chain>,
    /// Chain containing each node.
    pub node_chain: Vec<u32>,
}

/// A vertex of `BFS(t)` with its first intersection vertex on the side away
/// from the target, and the hop distance to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Member {
    pub vertex: Vertex,
    pub int: Vertex,
    pub int_dist: u32,
}

/// Heavy part of a route: the route climbs chain `chain` from depth
/// `low_depth` to vertex `exit` at depth `exit_depth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeavyRun {
    pub chain: u32,
    pub low_depth: u32,
    pub exit: Vertex,
    pub exit_depth: u32,
}

/// `Heavy(s, t)` and `Light(s, t)`, both ordered by distance from `t`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub heavy: Vec<HeavyRun>,
    pub light: Vec<u32>,
}

impl Route {
    pub fn parts(&self) -> usize {
        self.heavy.len() + self.light.len()
    }
}

pub fn build_sigma_bfs(g: &Graph, p: &Perturbation, sources: &[Vertex], t: Vertex) -> SigmaBfs {
    let tree = sssp(g, p, t);
    SigmaBfs::build(&tree, sources).0
}

impl SigmaBfs {
    /// Builds from the shortest-path tree rooted at the target. Also returns
    /// every vertex of `BFS(t)` with its intersection vertex.
    pub fn build(tree: &SpTree, sources: &[Vertex]) -> (SigmaBfs, Vec<Member>) {
        let t = tree.root;
        let n = tree.parent.len();
        let depth = |v: Vertex| tree.dist[v as usize].hops;
        let mut in_bfs = vec![false; n];
        let mut children = vec![0u32; n];
        let mut is_source = vec![false; n];
        in_bfs[t as usize] = true;
        for &s in sources {
            if !tree.reachable(s) {
                continue;
            }
            is_source[s as usize] = true;
            let mut v = s;
            while !in_bfs[v as usize] {
                in_bfs[v as usize] = true;
                let up = tree.parent[v as usize];
                children[up as usize] += 1;
                v = up;
            }
        }
        let is_node = |v: usize| in_bfs[v] && (v == t as usize || is_source[v] || children[v] != 1);
        let nodes: Vec<Vertex> = (0..n)
            .filter(|&v| is_node(v))
            .map(|v| v as Vertex)
            .collect();
        let mut index: BTreeMap<Vertex, u32> = BTreeMap::new();
        for (i, &v) in nodes.iter().enumerate() {
            index.insert(v, i as u32);
        }
        let node_depth: Vec<u32> = nodes.iter().map(|&v| depth(v)).collect();
        let mut node_down = vec![NONE; nodes.len()];
        let mut segments = Vec::new();
        let mut lower_node = Vec::new();
        let mut int_of = vec![(NONE, 0u32); n];
        for (i, &x) in nodes.iter().enumerate() {
            int_of[x as usize] = (x, 0);
            if x == t {
                continue;
            }
            let mut v = tree.parent[x as usize];
            while !is_node(v as usize) {
                int_of[v as usize] = (x, depth(x) - depth(v));
                v = tree.parent[v as usize];
            }
            node_down[i] = segments.len() as u32;
            lower_node.push(index[&v]);
            segments.push(Segment {
                upper: x,
                lower: v,
                upper_depth: depth(x),
                lower_depth: depth(v),
                heavy: false,
                chain: NONE,
            });
        }

        // subtree sizes, deepest nodes first
        let mut by_depth: Vec<u32> = (0..nodes.len() as u32).collect();
        by_depth.sort_by_key(|&i| core::cmp::Reverse(node_depth[i as usize]));
        let mut size = vec![1u32; nodes.len()];
        let mut heavy_child = vec![NONE; nodes.len()];
        for &i in &by_depth {
            let seg = node_down[i as usize];
            if seg != NONE {
                let parent = lower_node[seg as usize] as usize;
                size[parent] += size[i as usize];
            }
        }
        // heaviest child wins, ties to the smaller segment id
        for (seg, &parent) in lower_node.iter().enumerate() {
            let child = segments[seg].upper;
            let c = index[&child];
            let p = parent as usize;
            let cur = heavy_child[p];
            if cur == NONE || size[c as usize] > size[cur as usize] {
                heavy_child[p] = c;
            }
        }
        for seg in segments.iter_mut() {
            let c = index[&seg.upper];
            let p = index[&seg.lower];
            seg.heavy = heavy_child[p as usize] == c;
        }

        // chains start at the target and at every light child
        let mut chains = Vec::new();
        let mut node_chain = vec![NONE; nodes.len()];
        let mut starts: Vec<u32> = Vec::new();
        for (i, &v) in nodes.iter().enumerate() {
            let seg = node_down[i];
            if v == t || !segments[seg as usize].heavy {
                starts.push(i as u32);
            }
        }
        for q in starts {
            let id = chains.len() as u32;
            let mut list = vec![q];
            node_chain[q as usize] = id;
            let mut cur = q;
            while heavy_child[cur as usize] != NONE {
                cur = heavy_child[cur as usize];
                node_chain[cur as usize] = id;
                segments[node_down[cur as usize] as usize].chain = id;
                list.push(cur);
            }
            chains.push(Chain {
                top_depth: node_depth[cur as usize],
                nodes: list,
            });
        }

        let members = tree
            .order
            .iter()
            .filter(|&&v| in_bfs[v as usize])
            .map(|&v| Member {
                vertex: v,
                int: int_of[v as usize].0,
                int_dist: int_of[v as usize].1,
            })
            .collect();
        (
            SigmaBfs {
                target: t,
                nodes,
                node_depth,
                node_down,
                size,
                heavy_child,
                segments,
                chains,
                node_chain,
            },
            members,
        )
    }

    pub fn node_index(&self, v: Vertex) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }

    /// Segments from `s` down to the target, top first. Empty when `s` is the
    /// target or not in the structure.
    pub fn segments_from(&self, s: Vertex) -> Vec<u32> {
        let mut out = Vec::new();
        let Some(mut i) = self.node_index(s) else {
            return out;
        };
        while self.node_down[i] != NONE {
            let seg = self.node_down[i];
            out.push(seg);
            i = self.node_index(self.segments[seg as usize].lower).unwrap();
        }
        out
    }

    /// Heavy and light parts of the `t -> s` route.
    pub fn route(&self, s: Vertex) -> Route {
        let mut segs = self.segments_from(s);
        segs.reverse();
        let mut route = Route::default();
        let mut open: Option<HeavyRun> = None;
        for seg in segs {
            let sg = &self.segments[seg as usize];
            if sg.heavy {
                match open.as_mut() {
                    Some(run) if run.chain == sg.chain => {
                        run.exit = sg.upper;
                        run.exit_depth = sg.upper_depth;
                    }
                    _ => {
                        if let Some(run) = open.take() {
                            route.heavy.push(run);
                        }
                        open = Some(HeavyRun {
                            chain: sg.chain,
                            low_depth: sg.lower_depth,
                            exit: sg.upper,
                            exit_depth: sg.upper_depth,
                        });
                    }
                }
            } else {
                if let Some(run) = open.take() {
                    route.heavy.push(run);
                }
                route.light.push(seg);
            }
        }
        if let Some(run) = open {
            route.heavy.push(run);
        }
        route
    }
}
