//! Small deterministic graph generators used by tests, benchmarks and the CLI.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Vertex};

fn build(n: usize, edges: Vec<(Vertex, Vertex)>) -> Graph {
    Graph::new(n, edges).expect("generator produced an invalid edge list")
}

pub fn path(n: usize) -> Graph {
    build(n, (1..n as u32).map(|v| (v - 1, v)).collect())
}

/// `n >= 3` vertices on a cycle, edge `i` joins `i` and `i + 1 mod n`.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "a cycle needs at least 3 vertices");
    let n32 = n as u32;
    build(n, (0..n32).map(|v| (v, (v + 1) % n32)).collect())
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            edges.push((u, v));
        }
    }
    build(n, edges)
}

/// Center 0 joined to leaves `1..n`.
pub fn star(n: usize) -> Graph {
    build(n, (1..n as u32).map(|v| (0, v)).collect())
}

/// `rows x cols` grid, vertex `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let id = |r: usize, c: usize| (r * cols + c) as Vertex;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    build(rows * cols, edges)
}

/// Uniform random recursive tree: vertex `i` hangs off a uniform earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build(n, (1..n as u32).map(|v| (rng.gen_range(0..v), v)).collect())
}

/// `G(n, p)`: every pair independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let p = p.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build(n, edges)
}

/// The largest connected component (smallest label on ties), relabelled to
/// `0..k` in increasing order of the old ids. Returns the old id of every new
/// vertex.
pub fn largest_component(g: &Graph) -> (Graph, Vec<Vertex>) {
    let label = g.components();
    let count = label.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut size = vec![0usize; count];
    for &l in &label {
        size[l as usize] += 1;
    }
    let best = (0..count).max_by_key(|&c| (size[c], core::cmp::Reverse(c)));
    let Some(best) = best else {
        return (build(0, Vec::new()), Vec::new());
    };
    let mut new_id = vec![crate::NONE; g.n()];
    let mut old = Vec::new();
    for v in 0..g.n() {
        if label[v] as usize == best {
            new_id[v] = old.len() as Vertex;
            old.push(v as Vertex);
        }
    }
    let edges = g
        .edges()
        .iter()
        .filter(|&&(u, _)| label[u as usize] as usize == best)
        .map(|&(u, v)| (new_id[u as usize], new_id[v as usize]))
        .collect();
    (build(old.len(), edges), old)
}

/// Largest component of `G(n, deg / n)`.
pub fn erdos_renyi_lcc(n: usize, avg_degree: f64, seed: u64) -> Graph {
    let p = if n > 1 {
        avg_degree / (n - 1) as f64
    } else {
        0.0
    };
    largest_component(&erdos_renyi(n, p, seed)).0
}

/// `k` distinct vertices out of `n`, sorted, deterministic in `seed`.
pub fn random_sources(n: usize, k: usize, seed: u64) -> Vec<Vertex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vertex> = rand::seq::index::sample(&mut rng, n, k.min(n))
        .into_iter()
        .map(|v| v as Vertex)
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(path(3).edges(), &[(0, 1), (1, 2)]);
        assert_eq!(cycle(4).m(), 4);
        assert_eq!(complete(4).m(), 6);
        assert_eq!(grid(3, 4).m(), 3 * 3 + 2 * 4);
        assert_eq!(star(5).degree(0), 4);
        assert_eq!(random_tree(50, 3).m(), 49);
        assert!(random_tree(50, 3).components().iter().all(|&c| c == 0));
    }

    #[test]
    fn erdos_renyi_is_seeded() {
        assert_eq!(erdos_renyi(60, 0.1, 7), erdos_renyi(60, 0.1, 7));
        assert_ne!(erdos_renyi(60, 0.1, 7), erdos_renyi(60, 0.1, 8));
    }

    #[test]
    fn largest_component_is_connected() {
        let g = Graph::new(6, vec![(0, 1), (2, 3), (3, 4), (4, 2)]).unwrap();
        let (h, old) = largest_component(&g);
        assert_eq!(old, vec![2, 3, 4]);
        assert_eq!(h.m(), 3);
        let h = erdos_renyi_lcc(200, 7.0, 1);
        assert!(h.n() > 180);
        assert!(h.components().iter().all(|&c| c == 0));
    }
}
