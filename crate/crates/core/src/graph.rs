use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::dist::Dist;

pub type Vertex = u32;
pub type EdgeId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// Edge `index` joins `vertex` to itself.
    SelfLoop { index: usize, vertex: Vertex },
    /// Edge `index` repeats edge `first`.
    Duplicate { index: usize, first: usize },
    /// Edge `index` names a vertex `>= n`.
    VertexOutOfRange {
        index: usize,
        vertex: Vertex,
        n: usize,
    },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::SelfLoop { index, vertex } => {
                write!(f, "edge {index} is a self-loop at vertex {vertex}")
            }
            GraphError::Duplicate { index, first } => {
                write!(f, "edge {index} duplicates edge {first}")
            }
            GraphError::VertexOutOfRange { index, vertex, n } => {
                write!(f, "edge {index} names vertex {vertex} but n = {n}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GraphError {}

/// Simple undirected graph. Edge ids are the positions in the edge list and
/// never change; adjacency lists are sorted by neighbor.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    offsets: Vec<u32>,
    adj: Vec<(Vertex, EdgeId)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(Vertex, Vertex)>) -> Result<Graph, GraphError> {
        let mut deg = vec![0u32; n + 1];
        for (index, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(GraphError::VertexOutOfRange {
                        index,
                        vertex: w,
                        n,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { index, vertex: u });
            }
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill: Vec<u32> = offsets[..n].to_vec();
        let mut adj = vec![(0, 0); 2 * edges.len()];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[fill[u as usize] as usize] = (v, id as EdgeId);
            fill[u as usize] += 1;
            adj[fill[v as usize] as usize] = (u, id as EdgeId);
            fill[v as usize] += 1;
        }
        for v in 0..n {
            let list = &mut adj[offsets[v] as usize..offsets[v + 1] as usize];
            list.sort_unstable();
            for w in list.windows(2) {
                if w[0].0 == w[1].0 {
                    let (a, b) = (w[0].1.min(w[1].1), w[0].1.max(w[1].1));
                    return Err(GraphError::Duplicate {
                        index: b as usize,
                        first: a as usize,
                    });
                }
            }
        }
        Ok(Graph {
            n,
            edges,
            offsets,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e as usize]
    }

    /// `(neighbor, edge id)` pairs sorted by neighbor.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        let v = v as usize;
        &self.adj[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        if u as usize >= self.n || v as usize >= self.n {
            return None;
        }
        let list = self.neighbors(u);
        list.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| list[i].1)
    }

    /// Hop distances from `root` ignoring every edge for which `skip` holds.
    /// `queue` is scratch space.
    pub fn hops_avoiding<F: Fn(EdgeId) -> bool>(
        &self,
        root: Vertex,
        skip: F,
        out: &mut Vec<Dist>,
        queue: &mut Vec<Vertex>,
    ) {
        out.clear();
        out.resize(self.n, Dist::INF);
        queue.clear();
        out[root as usize] = Dist::ZERO;
        queue.push(root);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            let next = out[v as usize] + 1;
            for &(w, id) in self.neighbors(v) {
                if out[w as usize].is_finite() || skip(id) {
                    continue;
                }
                out[w as usize] = next;
                queue.push(w);
            }
        }
    }

    /// Connected components as a label per vertex, labels numbered from 0 in
    /// order of their smallest vertex.
    pub fn components(&self) -> Vec<u32> {
        let mut label = vec![crate::NONE; self.n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if label[start] != crate::NONE {
                continue;
            }
            label[start] = next;
            queue.push_back(start as Vertex);
            while let Some(v) = queue.pop_front() {
                for &(w, _) in self.neighbors(v) {
                    if label[w as usize] == crate::NONE {
                        label[w as usize] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_is_symmetric() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        for (id, &(u, v)) in g.edges().iter().enumerate() {
            assert_eq!(g.edge_between(u, v), Some(id as EdgeId));
            assert_eq!(g.edge_between(v, u), Some(id as EdgeId));
        }
        assert_eq!(g.edge_between(1, 3), None);
        assert_eq!(g.degree(0), 3);
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            Graph::new(2, vec![(0, 0)]),
            Err(GraphError::SelfLoop {
                index: 0,
                vertex: 0
            })
        );
        assert_eq!(
            Graph::new(3, vec![(0, 1), (1, 2), (1, 0)]),
            Err(GraphError::Duplicate { index: 2, first: 0 })
        );
        assert!(matches!(
            Graph::new(3, vec![(0, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, .. })
        ));
    }

    #[test]
    fn hops_avoiding_skips_edges() {
        // C4: 0-1-2-3-0
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let (mut out, mut q) = (Vec::new(), Vec::new());
        g.hops_avoiding(0, |_| false, &mut out, &mut q);
        assert_eq!(
            out,
            vec![Dist::new(0), Dist::new(1), Dist::new(2), Dist::new(1)]
        );
        g.hops_avoiding(0, |e| e == 0, &mut out, &mut q);
        assert_eq!(out[1], Dist::new(3));
        g.hops_avoiding(0, |e| e == 0 || e == 2, &mut out, &mut q);
        assert_eq!(out[1], Dist::INF);
    }

    #[test]
    fn components_are_labelled() {
        let g = Graph::new(5, vec![(0, 1), (3, 4)]).unwrap();
        assert_eq!(g.components(), vec![0, 0, 1, 2, 2]);
    }
}
