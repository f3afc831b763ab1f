//! Replacement paths: the brute-force ground truth, the preferred replacement
//! path search used by the oracle builder, and the detour classifier.

use alloc::collections::{BTreeSet, BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::dist::{Dist, PLen};
use crate::graph::{EdgeId, Graph, Vertex};
use crate::perturb::{sssp, Perturbation};
use crate::NONE;

/// BFS distance from `s` to `t` in `G - e`.
pub fn brute_replacement_dist(g: &Graph, s: Vertex, t: Vertex, e: EdgeId) -> Dist {
    brute_replacement_all(g, s, e)[t as usize]
}

/// BFS distances from `s` to every vertex in `G - e`. Deliberately shares
/// nothing with the oracle code beyond the adjacency lists.
pub fn brute_replacement_all(g: &Graph, s: Vertex, e: EdgeId) -> Vec<Dist> {
    let mut dist = vec![Dist::INF; g.n()];
    let mut queue = VecDeque::new();
    dist[s as usize] = Dist::ZERO;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        for &(w, id) in g.neighbors(v) {
            if id != e && !dist[w as usize].is_finite() {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// A tree path `x = p_0, ..., p_L = t` with prefix perturbation sums.
#[derive(Clone, Debug)]
pub struct TreePath {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
    /// `prefix[i]` is the perturbation of `p_0 .. p_i`.
    pub prefix: Vec<u128>,
}

impl TreePath {
    pub fn new(g: &Graph, p: &Perturbation, vertices: Vec<Vertex>) -> TreePath {
        let edges: Vec<EdgeId> = vertices
            .windows(2)
            .map(|w| {
                g.edge_between(w[0], w[1])
                    .expect("tree path uses a non-edge")
            })
            .collect();
        let mut prefix = Vec::with_capacity(vertices.len());
        prefix.push(0);
        for &e in &edges {
            let last = *prefix.last().unwrap();
            prefix.push(last + p.r(e));
        }
        TreePath {
            vertices,
            edges,
            prefix,
        }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn position_of_edge(&self, e: EdgeId) -> Option<usize> {
        self.edges.iter().position(|&f| f == e)
    }
}

/// A path that follows the tree path to `p_div`, leaves it, and rejoins it
/// at `p_merge` without touching it in between.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Detour {
    pub div: usize,
    pub merge: usize,
    /// `p_div`, the off-path vertices, `p_merge`.
    pub vertices: Vec<Vertex>,
    pub hops: u32,
    pub frac: u128,
}

impl Detour {
    pub fn len(&self) -> PLen {
        PLen::new(self.hops, self.frac)
    }

    /// The whole origin-to-target walk.
    pub fn full_path(&self, path: &TreePath) -> Vec<Vertex> {
        let mut out = path.vertices[..self.div].to_vec();
        out.extend_from_slice(&self.vertices);
        out.extend_from_slice(&path.vertices[self.merge + 1..]);
        out
    }
}

type Label = (u32, u32, u128);

/// Reusable scratch space for detour searches on one graph.
pub struct DetourFinder {
    epoch: u32,
    seen: Vec<u32>,
    on_path: Vec<u32>,
    path_epoch: Vec<u32>,
    label: Vec<Label>,
    pred: Vec<Vertex>,
    heap: BinaryHeap<Reverse<(Label, Vertex)>>,
}

impl DetourFinder {
    pub fn new(n: usize) -> Self {
        DetourFinder {
            epoch: 0,
            seen: vec![0; n],
            on_path: vec![NONE; n],
            path_epoch: vec![0; n],
            label: vec![(0, 0, 0); n],
            pred: vec![NONE; n],
            heap: BinaryHeap::new(),
        }
    }

    fn bump(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen.iter_mut().for_each(|x| *x = 0);
            self.path_epoch.iter_mut().for_each(|x| *x = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// The best detour (by total hops, then earliest divergence, then total
    /// perturbation) that diverges at some `p_i` with `i <= div_max` and
    /// merges at some `p_j` with `j >= merge_min`. `None` if there is none.
    pub fn search(
        &mut self,
        g: &Graph,
        p: &Perturbation,
        path: &TreePath,
        div_max: usize,
        merge_min: usize,
    ) -> Option<Detour> {
        let ep = self.bump();
        let len = path.len();
        debug_assert!(div_max < merge_min && merge_min <= len);
        for (i, &v) in path.vertices.iter().enumerate() {
            self.on_path[v as usize] = i as u32;
            self.path_epoch[v as usize] = ep;
        }
        self.heap.clear();
        for i in 0..=div_max {
            let v = path.vertices[i];
            let l = (i as u32, i as u32, path.prefix[i]);
            self.seen[v as usize] = ep;
            self.label[v as usize] = l;
            self.pred[v as usize] = NONE;
            self.heap.push(Reverse((l, v)));
        }
        let total = path.prefix[len];
        let mut best: Option<(Label, Vertex, usize)> = None;
        while let Some(Reverse((l, v))) = self.heap.pop() {
            if self.label[v as usize] != l {
                continue;
            }
            if let Some((b, _, _)) = best {
                if l >= b {
                    break;
                }
            }
            let v_on_path = self.path_epoch[v as usize] == ep;
            for &(w, e) in g.neighbors(v) {
                let step = (l.0 + 1, l.1, l.2 + p.r(e));
                if self.path_epoch[w as usize] == ep {
                    let j = self.on_path[w as usize] as usize;
                    if v_on_path || j < merge_min {
                        continue;
                    }
                    let cand = (
                        step.0 + (len - j) as u32,
                        step.1,
                        step.2 + (total - path.prefix[j]),
                    );
                    if best.is_none_or(|(b, _, _)| cand < b) {
                        best = Some((cand, v, j));
                    }
                    continue;
                }
                if self.seen[w as usize] != ep || step < self.label[w as usize] {
                    self.seen[w as usize] = ep;
                    self.label[w as usize] = step;
                    self.pred[w as usize] = v;
                    self.heap.push(Reverse((step, w)));
                }
            }
        }
        let (l, last, merge) = best?;
        let mut vertices = vec![path.vertices[merge]];
        let mut v = last;
        while self.path_epoch[v as usize] != ep {
            vertices.push(v);
            v = self.pred[v as usize];
        }
        vertices.push(v);
        vertices.reverse();
        Some(Detour {
            div: l.1 as usize,
            merge,
            vertices,
            hops: l.0,
            frac: l.2,
        })
    }

    /// Preferred replacement path avoiding edge `k` of `path`.
    pub fn preferred(
        &mut self,
        g: &Graph,
        p: &Perturbation,
        path: &TreePath,
        k: usize,
    ) -> Option<Detour> {
        self.search(g, p, path, k, k + 1)
    }
}

/// A preferred replacement path from `origin` to `target`. Depths are hop
/// distances to `target`; the path avoids every tree edge between depths
/// `first_depth` and `last_depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferredPath {
    pub origin: Vertex,
    pub target: Vertex,
    pub divergence: Vertex,
    pub merge: Vertex,
    pub first_depth: u32,
    pub last_depth: u32,
    pub hops: u32,
    pub frac: u128,
    pub detour: Vec<Vertex>,
}

impl PreferredPath {
    pub fn from_detour(path: &TreePath, d: &Detour) -> Self {
        let l = path.len() as u32;
        PreferredPath {
            origin: path.vertices[0],
            target: path.vertices[path.len()],
            divergence: path.vertices[d.div],
            merge: path.vertices[d.merge],
            first_depth: l - d.div as u32,
            last_depth: l - d.merge as u32,
            hops: d.hops,
            frac: d.frac,
            detour: d.vertices.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplacementError {
    /// `G - e` has no origin-to-target path.
    Disconnected,
    /// `e` is not on the origin-to-target tree path.
    NotOnPath,
}

impl fmt::Display for ReplacementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplacementError::Disconnected => f.write_str("no replacement path exists"),
            ReplacementError::NotOnPath => f.write_str("edge is not on the tree path"),
        }
    }
}

pub fn preferred_replacement(
    g: &Graph,
    p: &Perturbation,
    x: Vertex,
    t: Vertex,
    e: EdgeId,
) -> Result<PreferredPath, ReplacementError> {
    let tree = sssp(g, p, x);
    let vertices = tree.tree_path(t).map_err(|_| ReplacementError::NotOnPath)?;
    let path = TreePath::new(g, p, vertices);
    let k = path
        .position_of_edge(e)
        .ok_or(ReplacementError::NotOnPath)?;
    let mut finder = DetourFinder::new(g.n());
    finder
        .preferred(g, p, &path, k)
        .map(|d| PreferredPath::from_detour(&path, &d))
        .ok_or(ReplacementError::Disconnected)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    R1,
    R2,
}

/// One stored path for a common target, as seen by the classifier.
#[derive(Clone, Debug)]
pub struct ClassifyInput {
    pub segment: u32,
    pub membership: Membership,
    /// Depth of the divergence vertex.
    pub div_depth: u32,
    /// Depth of the upper endpoint of the topmost avoided edge.
    pub edge_depth: u32,
    pub hops: u32,
    /// Divergence vertex, off-path vertices, merge vertex.
    pub detour: Vec<Vertex>,
    /// The tree edges this path stands in for, as vertex pairs.
    pub avoided: Vec<(Vertex, Vertex)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// Edges of the detour before it first meets a detour later in the order.
    pub unique_prefix_len: u32,
    pub bad: bool,
    pub membership: Membership,
}

fn norm(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    (a.min(b), a.max(b))
}

/// Unique-prefix lengths and good/bad labels. Paths are ordered by
/// divergence depth (closer to the target first), then by avoided edge
/// depth, hop length and segment; results come back in input order.
pub fn classify_paths(paths: &[ClassifyInput]) -> Vec<Classification> {
    let mut order: Vec<usize> = (0..paths.len()).collect();
    order.sort_by_key(|&i| {
        let p = &paths[i];
        (p.div_depth, p.edge_depth, p.hops, p.segment)
    });
    let interior = |p: &ClassifyInput| -> BTreeSet<Vertex> {
        let k = p.detour.len();
        if k <= 2 {
            BTreeSet::new()
        } else {
            p.detour[1..k - 1].iter().copied().collect()
        }
    };
    let mut out = vec![
        Classification {
            unique_prefix_len: 0,
            bad: false,
            membership: Membership::R2,
        };
        paths.len()
    ];
    let mut later: BTreeSet<Vertex> = BTreeSet::new();
    for (pos, &i) in order.iter().enumerate().rev() {
        let p = &paths[i];
        let k = p.detour.len();
        let mut unique = k.saturating_sub(1) as u32;
        for (idx, v) in p
            .detour
            .iter()
            .enumerate()
            .take(k.saturating_sub(1))
            .skip(1)
        {
            if later.contains(v) {
                unique = idx as u32 - 1;
                break;
            }
        }
        let mine = interior(p);
        let avoided: BTreeSet<(Vertex, Vertex)> =
            p.avoided.iter().map(|&(a, b)| norm(a, b)).collect();
        let bad = order[pos + 1..].iter().any(|&j| {
            let q = &paths[j].detour;
            match q.iter().position(|v| mine.contains(v)) {
                Some(first) => q[first..]
                    .windows(2)
                    .any(|w| avoided.contains(&norm(w[0], w[1]))),
                None => false,
            }
        });
        out[i] = Classification {
            unique_prefix_len: unique,
            bad,
            membership: p.membership,
        };
        later.extend(mine);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::perturb::perturb;

    #[test]
    fn brute_examples() {
        let k3 = gen::complete(3);
        let e02 = k3.edge_between(0, 2).unwrap();
        assert_eq!(brute_replacement_dist(&k3, 0, 2, e02), Dist::new(2));
        let p3 = gen::path(3);
        assert_eq!(brute_replacement_dist(&p3, 0, 2, 1), Dist::INF);
        let c4 = gen::cycle(4);
        assert_eq!(brute_replacement_dist(&c4, 0, 2, 0), Dist::new(2));
    }

    #[test]
    fn c4_detour_goes_around() {
        // tree path 0-1-2 forced by making edges (0,1),(1,2) cheap
        let c4 = gen::cycle(4);
        let scale = crate::perturb::scale_for(4);
        let p = Perturbation::from_values(4, vec![1, 1, 5, 5], scale);
        let pp = preferred_replacement(&c4, &p, 0, 2, 0).unwrap();
        assert_eq!(pp.detour, vec![0, 3, 2]);
        assert_eq!((pp.hops, pp.divergence, pp.merge), (2, 0, 2));
        assert_eq!((pp.first_depth, pp.last_depth), (2, 0));
        assert_eq!(pp.frac, 10);
    }

    #[test]
    fn bridge_is_disconnected() {
        let p3 = gen::path(3);
        let p = perturb(&p3, 0);
        assert_eq!(
            preferred_replacement(&p3, &p, 0, 2, 1),
            Err(ReplacementError::Disconnected)
        );
        assert_eq!(
            preferred_replacement(&p3, &p, 0, 1, 1),
            Err(ReplacementError::NotOnPath)
        );
    }

    #[test]
    fn c5_detour() {
        let c5 = gen::cycle(5);
        let scale = crate::perturb::scale_for(5);
        let p = Perturbation::from_values(5, vec![1, 1, 1, 1, 1], scale);
        let pp = preferred_replacement(&c5, &p, 0, 2, 1).unwrap();
        assert_eq!(pp.detour, vec![0, 4, 3, 2]);
        assert_eq!((pp.hops, pp.divergence), (3, 0));
    }

    #[test]
    fn earliest_divergence_wins_ties() {
        // 0-1-2-3 path with two equal-length bypasses around (2,3):
        // 0-4-5-3 (diverges at 0) and 1-6-3 (diverges at 1). Both give 3 hops.
        let g = Graph::new(
            7,
            vec![
                (0, 1),
                (1, 2),
                (2, 3),
                (0, 4),
                (4, 5),
                (5, 3),
                (1, 6),
                (6, 3),
            ],
        )
        .unwrap();
        let scale = crate::perturb::scale_for(7);
        // make the 1-6-3 bypass lighter so only the divergence rule can prefer 0-4-5-3
        let p = Perturbation::from_values(7, vec![1, 1, 1, 9, 9, 9, 1, 1], scale);
        let path = TreePath::new(&g, &p, vec![0, 1, 2, 3]);
        let d = DetourFinder::new(7).preferred(&g, &p, &path, 2).unwrap();
        assert_eq!(d.hops, 3);
        assert_eq!(d.vertices, vec![0, 4, 5, 3]);
    }

    #[test]
    fn classifier_basic_cases() {
        let single = ClassifyInput {
            segment: 0,
            membership: Membership::R2,
            div_depth: 3,
            edge_depth: 3,
            hops: 5,
            detour: vec![0, 10, 11, 3],
            avoided: vec![(0, 1)],
        };
        let c = classify_paths(core::slice::from_ref(&single));
        assert_eq!(c[0].unique_prefix_len, 3);
        assert!(!c[0].bad);
        let other = ClassifyInput {
            div_depth: 5,
            detour: vec![7, 20, 21, 2],
            avoided: vec![(7, 8)],
            ..single.clone()
        };
        let c = classify_paths(&[single, other]);
        assert_eq!(c[0].unique_prefix_len, 3);
        assert_eq!(c[1].unique_prefix_len, 3);
        assert!(!c[0].bad && !c[1].bad);
    }
}
