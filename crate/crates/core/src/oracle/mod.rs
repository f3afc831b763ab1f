//! Oracle construction: terminals, the `B₀`..`B₅` tables, near-case maps and
//! the per-target far-case structures.

pub mod rmq;
pub mod sigma;
pub mod tables;
pub mod target;
pub mod terminals;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::dist::{Dist, PLen};
use crate::graph::{EdgeId, Graph, Vertex};
use crate::perturb::{count_ties, perturb, sssp, Perturbation, SpTree};
use crate::replacement::DetourFinder;
use crate::{par, NONE};
use tables::{root_tables, B5Block, PowerRow};
use target::{build_target, TargetCtx, TargetTables, TargetWitness};
use terminals::{sample_terminals, TerminalSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    /// Constant in the terminal spacing bound and the `I₁` radius.
    pub c: f64,
    pub perturb_seed: u64,
    pub terminal_seed: u64,
    pub max_perturb_retries: u32,
    pub max_terminal_regens: u32,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            c: 3.0,
            perturb_seed: 0,
            terminal_seed: 0,
            max_perturb_retries: 8,
            max_terminal_regens: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BuildError {
    NoSources,
    SourceOutOfRange {
        source: Vertex,
        n: usize,
    },
    /// Every perturbation seed tried left some pair with two shortest paths.
    PerturbationTies {
        attempts: u32,
        ties: u64,
    },
    /// Some `t_s -> t` stretch stayed longer than the bound after every
    /// terminal regeneration.
    TerminalSpacing {
        attempts: u32,
        worst: u32,
        bound: f64,
    },
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::NoSources => f.write_str("the source set is empty"),
            BuildError::SourceOutOfRange { source, n } => {
                write!(f, "source {source} is not a vertex (n = {n})")
            }
            BuildError::PerturbationTies { attempts, ties } => write!(
                f,
                "shortest paths not unique after {attempts} perturbation seeds ({ties} ties in the last)"
            ),
            BuildError::TerminalSpacing {
                attempts,
                worst,
                bound,
            } => write!(
                f,
                "terminal spacing {worst} exceeds {bound:.2} after {attempts} samples"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BuildError {}

/// Stored scalar entries per table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeReport {
    pub b0: u64,
    pub b1: u64,
    pub b2: u64,
    pub b3_b4: u64,
    pub b5: u64,
    pub near: u64,
    pub segments: u64,
    pub r1: u64,
    pub bst: u64,
    pub rmq: u64,
    pub r2: u64,
    pub intersection: u64,
    pub routes: u64,
}

impl SizeReport {
    pub fn total(&self) -> u64 {
        self.b0
            + self.b1
            + self.b2
            + self.b3_b4
            + self.b5
            + self.near
            + self.segments
            + self.r1
            + self.bst
            + self.rmq
            + self.r2
            + self.intersection
            + self.routes
    }

    pub fn rows(&self) -> [(&'static str, u64); 13] {
        [
            ("b0", self.b0),
            ("b1", self.b1),
            ("b2", self.b2),
            ("b3_b4", self.b3_b4),
            ("b5", self.b5),
            ("near", self.near),
            ("segments", self.segments),
            ("r1", self.r1),
            ("bst", self.bst),
            ("rmq", self.rmq),
            ("r2", self.r2),
            ("intersection", self.intersection),
            ("routes", self.routes),
        ]
    }
}

/// Build-time facts kept for reports.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildStats {
    pub perturb_attempts: u32,
    /// Tie events seen by each rejected perturbation, then the accepted one.
    pub ties: Vec<u64>,
    pub terminal_attempts: u32,
    /// Largest `|t_s t|` (or `|st|` when `t_s` is none) over all pairs.
    pub max_spacing: u32,
    pub spacing_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub n: usize,
    pub m: usize,
    pub sigma: usize,
    pub perturb_seed: u64,
    pub terminal_seed: u64,
    pub c_bits: u64,
}

impl Header {
    pub fn c(&self) -> f64 {
        f64::from_bits(self.c_bits)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oracle {
    pub(crate) header: Header,
    pub(crate) graph: Graph,
    pub(crate) pert: Perturbation,
    pub(crate) sources: Vec<Vertex>,
    /// Vertex to source index, `NONE` for non-sources.
    pub(crate) source_row: Vec<u32>,
    pub(crate) terminals: TerminalSet,
    /// `S ∪ T` in increasing order.
    pub(crate) roots: Vec<Vertex>,
    pub(crate) root_row: Vec<u32>,
    /// Terminal to index in `terminals.list()`.
    pub(crate) term_row: Vec<u32>,
    pub(crate) b0: Vec<Vec<PLen>>,
    pub(crate) b1: Vec<Vec<Vertex>>,
    pub(crate) b2: Vec<Vec<Vertex>>,
    pub(crate) power: Vec<PowerRow>,
    /// Per source, per terminal.
    pub(crate) b5: Vec<Vec<B5Block>>,
    /// Per source, per target.
    pub(crate) near: Vec<Vec<BTreeMap<EdgeId, Dist>>>,
    pub(crate) targets: Vec<TargetTables>,
    pub(crate) threshold: u32,
    pub(crate) stats: BuildStats,
    pub(crate) sizes: SizeReport,
}

pub(crate) fn log_bound(c: f64, n: usize, sigma: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    c * libm::sqrt(n as f64 / sigma as f64) * libm::log(n as f64)
}

pub fn build_oracle(
    g: &Graph,
    sources: &[Vertex],
    params: &OracleParams,
) -> Result<Oracle, BuildError> {
    let n = g.n();
    if sources.is_empty() {
        return Err(BuildError::NoSources);
    }
    if let Some(&s) = sources.iter().find(|&&s| s as usize >= n) {
        return Err(BuildError::SourceOutOfRange { source: s, n });
    }
    let mut src: Vec<Vertex> = sources.to_vec();
    src.sort_unstable();
    src.dedup();
    let sigma = src.len();

    let mut stats = BuildStats::default();
    let mut accepted = None;
    for attempt in 0..params.max_perturb_retries.max(1) {
        let p = perturb(g, params.perturb_seed.wrapping_add(attempt as u64));
        let ties = count_ties(g, &p);
        stats.ties.push(ties);
        stats.perturb_attempts = attempt + 1;
        if ties == 0 {
            accepted = Some(p);
            break;
        }
        log::warn!("perturbation attempt {attempt} produced {ties} ties; reseeding");
    }
    let Some(pert) = accepted else {
        return Err(BuildError::PerturbationTies {
            attempts: stats.perturb_attempts,
            ties: *stats.ties.last().unwrap(),
        });
    };

    let src_trees: Vec<SpTree> = par::map(sigma, |i| sssp(g, &pert, src[i]));
    let bound = log_bound(params.c, n, sigma);
    stats.spacing_bound = bound;
    let mut chosen = None;
    let mut worst_seen = 0;
    for attempt in 0..=params.max_terminal_regens {
        let seed = params.terminal_seed.wrapping_add(attempt as u64);
        let terms = sample_terminals(n, sigma, params.c, seed);
        let worst = src_trees
            .iter()
            .map(|tree| max_spacing(tree, &terms))
            .max()
            .unwrap_or(0);
        stats.terminal_attempts = attempt + 1;
        worst_seen = worst;
        if worst as f64 <= bound {
            stats.max_spacing = worst;
            chosen = Some(terms);
            break;
        }
        log::warn!("terminal sample {attempt} has spacing {worst} > {bound:.2}; resampling");
    }
    let Some(terminals) = chosen else {
        return Err(BuildError::TerminalSpacing {
            attempts: stats.terminal_attempts,
            worst: worst_seen,
            bound,
        });
    };

    let mut source_row = vec![NONE; n];
    for (i, &s) in src.iter().enumerate() {
        source_row[s as usize] = i as u32;
    }
    let mut term_row = vec![NONE; n];
    for (i, &x) in terminals.list().iter().enumerate() {
        term_row[x as usize] = i as u32;
    }
    let mut roots: Vec<Vertex> = src.iter().chain(terminals.list()).copied().collect();
    roots.sort_unstable();
    roots.dedup();
    let mut root_row = vec![NONE; n];
    for (i, &r) in roots.iter().enumerate() {
        root_row[r as usize] = i as u32;
    }

    let per_root = par::map(roots.len(), |i| {
        let r = roots[i];
        let tree = match source_row[r as usize] {
            NONE => sssp(g, &pert, r),
            k => src_trees[k as usize].clone(),
        };
        let rt = root_tables(g, &tree, &terminals, source_row[r as usize] != NONE);
        (tree.dist, rt)
    });
    let mut b0 = Vec::with_capacity(roots.len());
    let mut b2 = Vec::with_capacity(roots.len());
    let mut power = Vec::with_capacity(roots.len());
    let mut b1 = vec![Vec::new(); sigma];
    let mut b5 = vec![Vec::new(); sigma];
    let mut near = vec![Vec::new(); sigma];
    for (i, (dist, rt)) in per_root.into_iter().enumerate() {
        b0.push(dist);
        b2.push(rt.b2);
        power.push(rt.power);
        let k = source_row[roots[i] as usize];
        if k != NONE {
            b1[k as usize] = rt.b1.unwrap();
            b5[k as usize] = rt.b5.unwrap();
            near[k as usize] = rt.near.unwrap();
        }
    }

    let threshold = libm::floor(bound) as u32;
    let ctx = TargetCtx {
        g,
        p: &pert,
        sources: &src,
        terminals: &terminals,
        threshold,
    };
    let targets: Vec<TargetTables> = par::map(n, |t| {
        let mut finder = DetourFinder::new(n);
        build_target(&ctx, t as Vertex, &mut finder, false).0
    });

    let mut oracle = Oracle {
        header: Header {
            n,
            m: g.m(),
            sigma,
            perturb_seed: pert.seed(),
            terminal_seed: terminals.seed,
            c_bits: params.c.to_bits(),
        },
        graph: g.clone(),
        pert,
        sources: src,
        source_row,
        terminals,
        roots,
        root_row,
        term_row,
        b0,
        b1,
        b2,
        power,
        b5,
        near,
        targets,
        threshold,
        stats,
        sizes: SizeReport::default(),
    };
    oracle.sizes = oracle.count_sizes();
    Ok(oracle)
}

fn max_spacing(tree: &SpTree, terms: &TerminalSet) -> u32 {
    let row = tables::b1_row(tree, terms);
    tree.order
        .iter()
        .map(|&t| {
            let ts = row[t as usize];
            let h = tree.dist[t as usize].hops;
            if ts == NONE {
                h
            } else {
                h - tree.dist[ts as usize].hops
            }
        })
        .max()
        .unwrap_or(0)
}

impl Oracle {
    fn count_sizes(&self) -> SizeReport {
        let mut s = SizeReport {
            b0: 2 * self.b0.iter().map(|r| r.len() as u64).sum::<u64>(),
            b1: self.b1.iter().map(|r| r.len() as u64).sum(),
            b2: self.b2.iter().map(|r| r.len() as u64).sum(),
            b3_b4: self.power.iter().map(|r| r.entries() as u64).sum(),
            b5: self.b5.iter().flatten().map(|b| b.valid() as u64).sum(),
            near: 2 * self
                .near
                .iter()
                .flatten()
                .map(|m| m.len() as u64)
                .sum::<u64>(),
            ..SizeReport::default()
        };
        for t in &self.targets {
            s.segments += 6 * t.sigma.segments.len() as u64 + 2 * t.sigma.nodes.len() as u64;
            s.r1 += t.r1.len() as u64;
            for c in &t.bst {
                s.bst += 3 * c.nodes.len() as u64;
                s.rmq += c.rmq.cells() as u64;
            }
            s.r2 += 3 * t.r2_len() as u64;
            s.intersection += 2 * (t.int1.len() + t.int2.len()) as u64;
            s.routes += t
                .routes
                .values()
                .map(|r| 4 * r.heavy.len() as u64 + r.light.len() as u64)
                .sum::<u64>();
        }
        s
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.pert
    }

    pub fn sources(&self) -> &[Vertex] {
        &self.sources
    }

    pub fn is_source(&self, v: Vertex) -> bool {
        (v as usize) < self.source_row.len() && self.source_row[v as usize] != NONE
    }

    pub fn terminals(&self) -> &TerminalSet {
        &self.terminals
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub fn sizes(&self) -> &SizeReport {
        &self.sizes
    }

    fn row(&self, x: Vertex) -> usize {
        let r = self.root_row[x as usize];
        assert!(r != NONE, "vertex {x} is not a source or terminal");
        r as usize
    }

    /// `B₀ᵖ(x, y)` for `x ∈ S ∪ T`.
    pub fn b0p(&self, x: Vertex, y: Vertex) -> PLen {
        self.b0[self.row(x)][y as usize]
    }

    pub fn b0(&self, x: Vertex, y: Vertex) -> Dist {
        self.b0p(x, y).dist()
    }

    /// `B₁(s, t)`, `None` when no terminal lies on the path.
    pub fn b1(&self, s: Vertex, t: Vertex) -> Option<Vertex> {
        let v = self.b1[self.source_row[s as usize] as usize][t as usize];
        (v != NONE).then_some(v)
    }

    /// `B₂(x, y)`, `None` for `y = x` or `y` unreachable.
    pub fn b2(&self, x: Vertex, y: Vertex) -> Option<Vertex> {
        let v = self.b2[self.row(x)][y as usize];
        (v != NONE).then_some(v)
    }

    /// `B₃(x, y, i)` for `y ∈ T`: `x`-`y` distance avoiding the `2^i`-th edge
    /// from `x`.
    pub fn b3(&self, x: Vertex, y: Vertex, i: u32) -> Option<Dist> {
        debug_assert!(self.terminals.contains(y));
        self.power[self.row(y)].get(x, i)
    }

    /// `B₄(s, x, i)`: `s`-`x` distance avoiding the `2^i`-th edge from `x`.
    pub fn b4(&self, s: Vertex, x: Vertex, i: u32) -> Option<Dist> {
        self.power[self.row(s)].get(x, i)
    }

    pub fn b5(&self, s: Vertex, x: Vertex, i: u32, j: u32) -> Option<Dist> {
        let a = self.source_row[s as usize] as usize;
        let b = self.term_row[x as usize] as usize;
        self.b5[a][b].get(i, j)
    }

    pub fn near_map(&self, s: Vertex, t: Vertex) -> &BTreeMap<EdgeId, Dist> {
        &self.near[self.source_row[s as usize] as usize][t as usize]
    }

    pub fn target(&self, t: Vertex) -> &TargetTables {
        &self.targets[t as usize]
    }

    /// Rebuilds the per-target structures for `t` with build-time detail
    /// kept, for statistics.
    pub fn target_witness(&self, t: Vertex) -> TargetWitness {
        let ctx = TargetCtx {
            g: &self.graph,
            p: &self.pert,
            sources: &self.sources,
            terminals: &self.terminals,
            threshold: self.threshold,
        };
        let mut finder = DetourFinder::new(self.graph.n());
        build_target(&ctx, t, &mut finder, true).1.unwrap()
    }

    /// Corrupts one stored `B₀` entry so that verification has something to
    /// catch. Returns the `(x, y)` pair touched.
    pub fn inject_fault_for_testing(&mut self) -> Option<(Vertex, Vertex)> {
        let s = *self.sources.first()?;
        let row = self.row(s);
        let y = (0..self.graph.n()).find(|&y| y as Vertex != s && self.b0[row][y].is_finite())?;
        self.b0[row][y].hops += 1;
        Some((s, y as Vertex))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn rejects_bad_sources() {
        let g = gen::path(3);
        let p = OracleParams::default();
        assert_eq!(
            build_oracle(&g, &[], &p).unwrap_err(),
            BuildError::NoSources
        );
        assert_eq!(
            build_oracle(&g, &[3], &p).unwrap_err(),
            BuildError::SourceOutOfRange { source: 3, n: 3 }
        );
    }

    #[test]
    fn p3_tables() {
        let g = gen::path(3);
        let o = build_oracle(&g, &[0], &OracleParams::default()).unwrap();
        assert_eq!(o.b0(0, 2), Dist::new(2));
        for t in 0..3 {
            if let Some(ts) = o.b1(0, t) {
                assert!(o.terminals().contains(ts));
            }
        }
        assert_eq!(o.b2(0, 2), Some(0));
        assert_eq!(o.b2(0, 0), None);
    }

    #[test]
    fn k3_all_terminals() {
        let g = gen::complete(3);
        let o = build_oracle(&g, &[0, 1, 2], &OracleParams::default()).unwrap();
        assert_eq!(o.terminals().len(), 3);
        for v in 0..3 {
            assert_eq!(o.b1(0, v), Some(v));
        }
        assert!(o.sizes().total() > 0);
    }
}
