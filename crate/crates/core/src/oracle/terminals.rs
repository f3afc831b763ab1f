use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Vertex;

/// Random vertex sample: each vertex independently with probability
/// `min(1, sqrt(sigma / n))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminalSet {
    member: Vec<bool>,
    list: Vec<Vertex>,
    pub sigma: usize,
    pub c: f64,
    pub seed: u64,
    pub probability: f64,
}

pub fn inclusion_probability(n: usize, sigma: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    libm::sqrt(sigma as f64 / n as f64).min(1.0)
}

pub fn sample_terminals(n: usize, sigma: usize, c: f64, seed: u64) -> TerminalSet {
    let probability = inclusion_probability(n, sigma);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let member: Vec<bool> = (0..n)
        .map(|_| probability >= 1.0 || rng.gen_bool(probability))
        .collect();
    let list = (0..n as Vertex).filter(|&v| member[v as usize]).collect();
    TerminalSet {
        member,
        list,
        sigma,
        c,
        seed,
        probability,
    }
}

impl TerminalSet {
    pub fn contains(&self, v: Vertex) -> bool {
        self.member[v as usize]
    }

    /// Terminals in increasing order.
    pub fn list(&self) -> &[Vertex] {
        &self.list
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_at_one() {
        let t = sample_terminals(20, 20, 3.0, 1);
        assert_eq!(t.len(), 20);
        let t = sample_terminals(1, 1, 3.0, 1);
        assert_eq!(t.list(), &[0]);
    }

    #[test]
    fn seeded() {
        assert_eq!(
            sample_terminals(500, 3, 3.0, 4),
            sample_terminals(500, 3, 3.0, 4)
        );
    }

    #[test]
    fn size_near_expectation() {
        // n = 10000, sigma = 1: |T| ~ Bin(10000, 0.01), mean 100, sd ~ 9.95.
        // The window [20, 500] is more than 8 sd from the mean on both sides.
        for seed in 0..8 {
            let t = sample_terminals(10_000, 1, 3.0, seed);
            assert!((20..=500).contains(&t.len()), "seed {seed}: {}", t.len());
        }
    }
}
