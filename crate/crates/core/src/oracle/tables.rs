//! Per-root tables: `B₀`, `B₁`, `B₂`, the power-of-two avoidance rows behind
//! `B₃`/`B₄`, `B₅`, and the near-case maps.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use serde::{Deserialize, Serialize};

use super::terminals::TerminalSet;
use crate::dist::Dist;
use crate::graph::{EdgeId, Graph, Vertex};
use crate::perturb::SpTree;
use crate::NONE;

pub(crate) fn floor_log2(x: u32) -> u32 {
    debug_assert!(x > 0);
    x.ilog2()
}

/// Preorder layout of a shortest-path tree: every subtree is a contiguous
/// range of `pre`.
pub(crate) struct Preorder {
    pub pre: Vec<Vertex>,
    pub tin: Vec<u32>,
    pub tout: Vec<u32>,
}

impl Preorder {
    pub fn new(tree: &SpTree) -> Self {
        let n = tree.parent.len();
        let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n];
        for &v in &tree.order[1..] {
            children[tree.parent[v as usize] as usize].push(v);
        }
        let mut tin = vec![NONE; n];
        let mut tout = vec![NONE; n];
        let mut pre = Vec::with_capacity(tree.order.len());
        let mut stack = vec![(tree.root, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                tout[v as usize] = pre.len() as u32;
                continue;
            }
            tin[v as usize] = pre.len() as u32;
            pre.push(v);
            stack.push((v, true));
            for &c in children[v as usize].iter().rev() {
                stack.push((c, false));
            }
        }
        Preorder { pre, tin, tout }
    }

    pub fn subtree(&self, c: Vertex) -> &[Vertex] {
        &self.pre[self.tin[c as usize] as usize..self.tout[c as usize] as usize]
    }

    pub fn inside(&self, c: Vertex, v: Vertex) -> bool {
        let t = self.tin[v as usize];
        t != NONE && self.tin[c as usize] <= t && t < self.tout[c as usize]
    }
}

/// Distances from the tree root in `G` minus the `skip` edges, for the
/// vertices of `subtree(c)`. Valid whenever every skipped edge lies inside
/// the subtree or joins it to its parent: vertices outside keep their
/// distances, so the subtree is refilled from its outside neighbours.
/// Results land in `out` (indexed by vertex, only subtree entries touched).
pub(crate) fn subtree_recompute<F: Fn(EdgeId) -> bool>(
    g: &Graph,
    tree: &SpTree,
    pre: &Preorder,
    c: Vertex,
    skip: F,
    out: &mut [Dist],
    heap: &mut BinaryHeap<Reverse<(u32, Vertex)>>,
) {
    heap.clear();
    let sub = pre.subtree(c);
    for &v in sub {
        let mut best = Dist::INF;
        for &(w, e) in g.neighbors(v) {
            if skip(e) || pre.inside(c, w) {
                continue;
            }
            best = best.min(tree.hops(w) + 1);
        }
        out[v as usize] = best;
        if best.is_finite() {
            heap.push(Reverse((best.raw(), v)));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if out[v as usize].raw() != d {
            continue;
        }
        for &(w, e) in g.neighbors(v) {
            if skip(e) || !pre.inside(c, w) {
                continue;
            }
            if d + 1 < out[w as usize].raw() {
                out[w as usize] = Dist::new(d + 1);
                heap.push(Reverse((d + 1, w)));
            }
        }
    }
}

/// `d_{G-e}(r, x)` for the `2^i`-th edge `e` from `x` toward the root `r`,
/// for every `x` and `i <= floor(log |rx|)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerRow {
    offset: Vec<u32>,
    values: Vec<Dist>,
}

impl PowerRow {
    pub fn get(&self, x: Vertex, i: u32) -> Option<Dist> {
        let a = self.offset[x as usize] as usize;
        let b = self.offset[x as usize + 1] as usize;
        let k = a + i as usize;
        (k < b).then(|| self.values[k])
    }

    pub fn entries(&self) -> usize {
        self.values.len()
    }
}

/// `B₅(s, x, i, j)`: the `s`-`x` distance once every edge from the `2^i`-th
/// vertex after `s` to the `2^j`-th vertex before `x` is removed. Invalid
/// index pairs (empty subpath) hold infinity and are not counted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct B5Block {
    dim: u32,
    values: Vec<Dist>,
    valid: u32,
}

impl B5Block {
    pub fn get(&self, i: u32, j: u32) -> Option<Dist> {
        (i < self.dim && j < self.dim).then(|| self.values[(i * self.dim + j) as usize])
    }

    pub fn valid(&self) -> usize {
        self.valid as usize
    }
}

/// Everything derived from one root's shortest-path tree.
pub(crate) struct RootTables {
    pub b2: Vec<Vertex>,
    pub power: PowerRow,
    /// For source roots: `B₁` row and the near-case map per target.
    pub b1: Option<Vec<Vertex>>,
    pub near: Option<Vec<BTreeMap<EdgeId, Dist>>>,
    pub b5: Option<Vec<B5Block>>,
}

/// `B₁` row of a source: last terminal on the `s -> t` path, for every `t`.
pub(crate) fn b1_row(tree: &SpTree, terminals: &TerminalSet) -> Vec<Vertex> {
    let mut row = vec![NONE; tree.parent.len()];
    for &v in &tree.order {
        row[v as usize] = if terminals.contains(v) {
            v
        } else if v == tree.root {
            NONE
        } else {
            row[tree.parent[v as usize] as usize]
        };
    }
    row
}

pub(crate) fn root_tables(
    g: &Graph,
    tree: &SpTree,
    terminals: &TerminalSet,
    is_source: bool,
) -> RootTables {
    let n = g.n();
    let pre = Preorder::new(tree);
    let hops = |v: Vertex| tree.dist[v as usize].hops;

    // B₂: the ancestor of y at distance 2^floor(log |ry|) from y
    let mut b2 = vec![NONE; n];
    let mut anc: Vec<Vertex> = Vec::new();
    let mut stack = vec![(tree.root, false)];
    let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for &v in &tree.order[1..] {
        children[tree.parent[v as usize] as usize].push(v);
    }
    while let Some((v, done)) = stack.pop() {
        if done {
            anc.pop();
            continue;
        }
        let d = hops(v);
        if d > 0 {
            let k = 1u32 << floor_log2(d);
            b2[v as usize] = anc[(d - k) as usize];
        }
        anc.push(v);
        stack.push((v, true));
        for &c in &children[v as usize] {
            stack.push((c, false));
        }
    }

    let mut offset = Vec::with_capacity(n + 1);
    offset.push(0u32);
    for v in 0..n as Vertex {
        let d = tree.dist[v as usize];
        let cnt = if d.is_finite() && d.hops > 0 {
            floor_log2(d.hops) + 1
        } else {
            0
        };
        offset.push(offset[v as usize] + cnt);
    }
    let mut values = vec![Dist::INF; *offset.last().unwrap() as usize];

    let b1 = is_source.then(|| b1_row(tree, terminals));
    let mut near: Option<Vec<BTreeMap<EdgeId, Dist>>> = is_source.then(|| vec![BTreeMap::new(); n]);

    let mut scratch = vec![Dist::INF; n];
    let mut heap = BinaryHeap::new();
    for &c in &tree.order[1..] {
        let e = tree.parent_edge[c as usize];
        subtree_recompute(g, tree, &pre, c, |f| f == e, &mut scratch, &mut heap);
        let hc = hops(c);
        for &x in pre.subtree(c) {
            let gap = hops(x) - hc + 1;
            if gap.is_power_of_two() {
                let i = floor_log2(gap);
                values[(offset[x as usize] + i) as usize] = scratch[x as usize];
            }
            if let (Some(near), Some(b1)) = (near.as_mut(), b1.as_ref()) {
                let ts = b1[x as usize];
                if ts == NONE || hops(ts) < hc {
                    near[x as usize].insert(e, scratch[x as usize]);
                }
            }
        }
    }

    let b5 = is_source.then(|| {
        terminals
            .list()
            .iter()
            .map(|&x| b5_block(g, tree, &pre, x, &mut scratch, &mut heap))
            .collect()
    });

    RootTables {
        b2,
        power: PowerRow { offset, values },
        b1,
        near,
        b5,
    }
}

fn b5_block(
    g: &Graph,
    tree: &SpTree,
    pre: &Preorder,
    x: Vertex,
    scratch: &mut [Dist],
    heap: &mut BinaryHeap<Reverse<(u32, Vertex)>>,
) -> B5Block {
    let d = tree.dist[x as usize];
    if !d.is_finite() || d.hops < 2 {
        return B5Block {
            dim: 0,
            values: Vec::new(),
            valid: 0,
        };
    }
    let len = d.hops;
    let path = tree.tree_path(x).unwrap();
    let edges: Vec<EdgeId> = path[1..]
        .iter()
        .map(|&v| tree.parent_edge[v as usize])
        .collect();
    let dim = floor_log2(len) + 1;
    let mut values = vec![Dist::INF; (dim * dim) as usize];
    let mut valid = 0;
    for i in 0..dim {
        for j in 0..dim {
            let (lo, hi) = (1u32 << i, len.saturating_sub(1 << j));
            if lo >= hi {
                continue;
            }
            valid += 1;
            // edges lo..hi of the path, i.e. between vertex lo and vertex hi
            let removed = &edges[lo as usize..hi as usize];
            let c = path[lo as usize + 1];
            subtree_recompute(g, tree, pre, c, |f| removed.contains(&f), scratch, heap);
            values[(i * dim + j) as usize] = scratch[x as usize];
        }
    }
    B5Block { dim, values, valid }
}
