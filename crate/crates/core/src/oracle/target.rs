//! Per-target structures for the far case when the replacement path skips
//! `t_s`: the `R₁`/`R₂` stores, chain search structures, the intersection
//! index and the per-source routes.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::rmq::SparseMin;
use super::sigma::{Member, Route, SigmaBfs};
use super::terminals::TerminalSet;
use crate::dist::Dist;
use crate::graph::{Graph, Vertex};
use crate::perturb::{sssp, Perturbation};
use crate::replacement::{Detour, DetourFinder, TreePath};
use crate::NONE;

/// `Bst(C)` node for the heavy segment `x'y'`: `(x'.depth, |p x'| + |R₁(x'y')|, |p x'|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BstNode {
    pub depth: u32,
    pub value: Dist,
    pub top_dist: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainIndex {
    /// Sorted by depth.
    pub nodes: Vec<BstNode>,
    pub rmq: SparseMin,
}

impl ChainIndex {
    /// Minimum value over nodes with depth in `(lo, hi]`.
    pub fn min_in(&self, lo: u32, hi: u32) -> Dist {
        let a = self.nodes.partition_point(|b| b.depth <= lo);
        let b = self.nodes.partition_point(|b| b.depth <= hi);
        self.rmq.min(a, b)
    }
}

/// A stored `R₂` path: it stands in for every edge between `first_depth`
/// (keyed) and `last_depth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct R2Entry {
    pub last_depth: u32,
    pub hops: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetTables {
    pub sigma: SigmaBfs,
    /// `|R₁(xy)|` per segment, infinite when empty.
    pub r1: Vec<Dist>,
    /// `Bst(C)` per chain.
    pub bst: Vec<ChainIndex>,
    /// `R₂(xy)` per segment, keyed by `first_depth`.
    pub r2: Vec<BTreeMap<u32, R2Entry>>,
    /// `I₁`: vertex to intersection vertex, for vertices close to it.
    pub int1: BTreeMap<Vertex, Vertex>,
    /// `I₂`: non-intersection terminal to intersection vertex.
    pub int2: BTreeMap<Vertex, Vertex>,
    pub routes: BTreeMap<Vertex, Route>,
}

impl TargetTables {
    pub fn r2_len(&self) -> usize {
        self.r2.iter().map(BTreeMap::len).sum()
    }
}

/// One distinct `R₂` path with the segment edges (indices on the segment's
/// tree path) it is preferred for.
#[derive(Clone, Debug)]
pub struct R2Witness {
    pub detour: Detour,
    pub edges: Vec<usize>,
}

/// Build-time detail for one segment, kept only for statistics.
#[derive(Clone, Debug)]
pub struct SegmentWitness {
    /// Tree path from the segment's upper endpoint to the target.
    pub path: TreePath,
    pub lower_index: usize,
    /// Position of `t_x` on `path`.
    pub terminal_index: Option<usize>,
    /// Preferred detour for each segment edge above `t_x`.
    pub per_edge: Vec<Option<Detour>>,
    pub r2: Vec<R2Witness>,
    pub r1: Option<Detour>,
    /// `R₂` paths whose edges are not consecutive among qualifying edges.
    pub contiguity_violations: u32,
    /// Pairs of stored hulls that overlap.
    pub hull_overlaps: u32,
}

#[derive(Clone, Debug)]
pub struct TargetWitness {
    pub segments: Vec<SegmentWitness>,
    pub members: Vec<Member>,
}

pub(crate) struct TargetCtx<'a> {
    pub g: &'a Graph,
    pub p: &'a Perturbation,
    pub sources: &'a [Vertex],
    pub terminals: &'a TerminalSet,
    /// `I₁` radius.
    pub threshold: u32,
}

pub(crate) fn build_target(
    ctx: &TargetCtx<'_>,
    t: Vertex,
    finder: &mut DetourFinder,
    keep_witness: bool,
) -> (TargetTables, Option<TargetWitness>) {
    let tree = sssp(ctx.g, ctx.p, t);
    let (sigma, members) = SigmaBfs::build(&tree, ctx.sources);
    let depth = |v: Vertex| tree.dist[v as usize].hops;

    // last terminal on the v -> t path (closest to t), for v in BFS(t)
    let mut last_terminal = alloc::vec![NONE; ctx.g.n()];
    for m in &members {
        let v = m.vertex;
        let up = if v == t {
            NONE
        } else {
            last_terminal[tree.parent[v as usize] as usize]
        };
        last_terminal[v as usize] = if up != NONE {
            up
        } else if ctx.terminals.contains(v) {
            v
        } else {
            NONE
        };
    }

    let nseg = sigma.segments.len();
    let mut r1 = alloc::vec![Dist::INF; nseg];
    let mut r2 = alloc::vec![BTreeMap::new(); nseg];
    let mut seg_witness = Vec::new();
    for (id, seg) in sigma.segments.iter().enumerate() {
        let x = seg.upper;
        let tx = last_terminal[x as usize];
        let lower_index = (seg.upper_depth - seg.lower_depth) as usize;
        let terminal_index = (tx != NONE).then(|| (depth(x) - depth(tx)) as usize);
        let path_from_x = || {
            let mut verts = tree.tree_path(x).unwrap();
            verts.reverse();
            TreePath::new(ctx.g, ctx.p, verts)
        };
        let Some(ti) = terminal_index else {
            if keep_witness {
                seg_witness.push(SegmentWitness {
                    path: path_from_x(),
                    lower_index,
                    terminal_index,
                    per_edge: Vec::new(),
                    r2: Vec::new(),
                    r1: None,
                    contiguity_violations: 0,
                    hull_overlaps: 0,
                });
            }
            continue;
        };
        let path = path_from_x();
        let len = path.len() as u32;

        // R₂: edges k of the segment that lie above t_x
        let mut per_edge = Vec::new();
        let mut groups: Vec<R2Witness> = Vec::new();
        let mut qualifying_pos: Vec<Vec<usize>> = Vec::new();
        let mut q = 0;
        for k in 0..lower_index.min(ti) {
            let d = finder.preferred(ctx.g, ctx.p, &path, k);
            if let Some(d) = d.as_ref().filter(|d| d.merge > ti) {
                match groups.iter().position(|w| w.detour == *d) {
                    Some(i) => {
                        groups[i].edges.push(k);
                        qualifying_pos[i].push(q);
                    }
                    None => {
                        groups.push(R2Witness {
                            detour: d.clone(),
                            edges: alloc::vec![k],
                        });
                        qualifying_pos.push(alloc::vec![q]);
                    }
                }
                q += 1;
            }
            if keep_witness {
                per_edge.push(d);
            }
        }
        let contiguity_violations = qualifying_pos
            .iter()
            .filter(|pos| pos.windows(2).any(|w| w[1] != w[0] + 1))
            .count() as u32;
        let mut hulls: Vec<(u32, u32)> = Vec::new();
        for w in &groups {
            let kmin = *w.edges.first().unwrap() as u32;
            let kmax = *w.edges.last().unwrap() as u32;
            let (first, last) = (len - kmin, len - kmax - 1);
            hulls.push((first, last));
            r2[id].insert(
                first,
                R2Entry {
                    last_depth: last,
                    hops: w.detour.hops,
                },
            );
        }
        let mut hull_overlaps = 0;
        for (i, a) in hulls.iter().enumerate() {
            for b in &hulls[i + 1..] {
                if a.1 < b.0 && b.1 < a.0 {
                    hull_overlaps += 1;
                }
            }
        }

        // R₁: diverge in [x, y), merge strictly below t_x
        let mut r1_detour = None;
        if ti > lower_index && ti < path.len() {
            r1_detour = finder.search(ctx.g, ctx.p, &path, lower_index - 1, ti + 1);
            if let Some(d) = &r1_detour {
                r1[id] = Dist::new(d.hops);
            }
        }
        if keep_witness {
            seg_witness.push(SegmentWitness {
                path,
                lower_index,
                terminal_index,
                per_edge,
                r2: groups,
                r1: r1_detour,
                contiguity_violations,
                hull_overlaps,
            });
        }
    }

    let bst = sigma
        .chains
        .iter()
        .map(|chain| {
            let nodes: Vec<BstNode> = chain.nodes[1..]
                .iter()
                .map(|&i| {
                    let seg = sigma.node_down[i as usize] as usize;
                    let d = sigma.node_depth[i as usize];
                    let top_dist = chain.top_depth - d;
                    BstNode {
                        depth: d,
                        value: r1[seg] + top_dist,
                        top_dist,
                    }
                })
                .collect();
            let values: Vec<Dist> = nodes.iter().map(|b| b.value).collect();
            ChainIndex {
                rmq: SparseMin::new(&values),
                nodes,
            }
        })
        .collect();

    let mut int1 = BTreeMap::new();
    let mut int2 = BTreeMap::new();
    for m in &members {
        if m.int_dist <= ctx.threshold {
            int1.insert(m.vertex, m.int);
        }
        if m.int_dist > 0 && ctx.terminals.contains(m.vertex) {
            int2.insert(m.vertex, m.int);
        }
    }
    let routes = ctx
        .sources
        .iter()
        .filter(|&&s| tree.reachable(s))
        .map(|&s| (s, sigma.route(s)))
        .collect();

    let tables = TargetTables {
        sigma,
        r1,
        bst,
        r2,
        int1,
        int2,
        routes,
    };
    let witness = keep_witness.then_some(TargetWitness {
        segments: seg_witness,
        members,
    });
    (tables, witness)
}
