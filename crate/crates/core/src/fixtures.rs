//! Pinned fixture set for exhaustive checks: small corner cases plus
//! Erdős–Rényi largest components with n from 20 to 200.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::gen;
use crate::graph::{Graph, Vertex};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub graph: Graph,
    pub sources: Vec<Vertex>,
}

fn spread(n: usize, k: usize) -> Vec<Vertex> {
    let k = k.clamp(1, n);
    (0..k).map(|i| (i * n / k) as Vertex).collect()
}

fn with_sigmas(name: &str, g: Graph, sigmas: &[usize], out: &mut Vec<Fixture>) {
    for &k in sigmas {
        out.push(Fixture {
            name: format!("{name} sigma={k}"),
            sources: spread(g.n(), k),
            graph: g.clone(),
        });
    }
}

pub fn corner_cases() -> Vec<Fixture> {
    let mut out = Vec::new();
    with_sigmas("P3", gen::path(3), &[1, 3], &mut out);
    with_sigmas("C4", gen::cycle(4), &[1, 4], &mut out);
    with_sigmas("K3", gen::complete(3), &[1, 3], &mut out);
    with_sigmas("C12", gen::cycle(12), &[1, 4, 12], &mut out);
    with_sigmas("grid5x5", gen::grid(5, 5), &[1, 5, 25], &mut out);
    out
}

pub fn random_fixtures() -> Vec<Fixture> {
    let mut out = Vec::new();
    for (i, n) in [20usize, 30, 50, 60, 80, 100, 150, 200]
        .into_iter()
        .enumerate()
    {
        let g = gen::erdos_renyi_lcc(n, 7.0, 100 + i as u64);
        let root = libm::ceil(libm::sqrt(g.n() as f64)) as usize;
        let name = format!("ER n={} m={}", g.n(), g.m());
        with_sigmas(&name, g.clone(), &[1, root, g.n()], &mut out);
    }
    out
}

/// Every fixture, corner cases first.
pub fn all() -> Vec<Fixture> {
    let mut v = corner_cases();
    v.extend(random_fixtures());
    v
}
