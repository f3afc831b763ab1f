//! Machine-readable stats records. Field order is the key order in the
//! emitted JSON and is kept stable.

use std::collections::BTreeMap;

use repath_core::verify::{LemmaStats, Mismatch, ScalingReport, VerifyReport};
use repath_core::Oracle;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Seeds {
    pub perturb: u64,
    pub terminal: u64,
    /// Seed used to draw random sources, if any.
    pub sources: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct OracleStats {
    pub n: usize,
    pub m: usize,
    pub sigma: usize,
    pub sources: Vec<u32>,
    pub c: f64,
    pub seeds: Seeds,
    pub terminals: usize,
    pub intersection_radius: u32,
    pub perturb_attempts: u32,
    pub terminal_attempts: u32,
    pub max_spacing: u32,
    pub spacing_bound: f64,
    pub entries: BTreeMap<&'static str, u64>,
    pub total_entries: u64,
}

pub fn oracle_stats(o: &Oracle, source_seed: Option<u64>) -> OracleStats {
    let h = o.header();
    let st = o.stats();
    OracleStats {
        n: h.n,
        m: h.m,
        sigma: h.sigma,
        sources: o.sources().to_vec(),
        c: h.c(),
        seeds: Seeds {
            perturb: h.perturb_seed,
            terminal: h.terminal_seed,
            sources: source_seed,
        },
        terminals: o.terminals().len(),
        intersection_radius: o.threshold(),
        perturb_attempts: st.perturb_attempts,
        terminal_attempts: st.terminal_attempts,
        max_spacing: st.max_spacing,
        spacing_bound: st.spacing_bound,
        entries: o.sizes().rows().into_iter().collect(),
        total_entries: o.sizes().total(),
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyStats<'a> {
    pub oracle: OracleStats,
    pub passed: bool,
    pub queries: u64,
    pub mismatch_count: usize,
    /// The first mismatches, capped.
    pub mismatches: &'a [Mismatch],
    pub below_base: u64,
    pub asymmetric: u64,
    pub fallbacks: u64,
    pub max_probes: u32,
    pub probe_ceiling: f64,
    pub lemma_violations: u32,
    pub lemmas: &'a LemmaStats,
}

pub fn verify_stats<'a>(
    o: &Oracle,
    r: &'a VerifyReport,
    source_seed: Option<u64>,
) -> VerifyStats<'a> {
    VerifyStats {
        oracle: oracle_stats(o, source_seed),
        passed: r.passed() && r.lemmas.violations() == 0,
        queries: r.queries,
        mismatch_count: r.mismatches.len(),
        mismatches: &r.mismatches[..r.mismatches.len().min(100)],
        below_base: r.below_base,
        asymmetric: r.asymmetric,
        fallbacks: r.fallbacks,
        max_probes: r.max_probes,
        probe_ceiling: r.probe_ceiling,
        lemma_violations: r.lemmas.violations(),
        lemmas: &r.lemmas,
    }
}

#[derive(Debug, Serialize)]
pub struct BenchStats<'a> {
    pub grid: &'a str,
    pub c: f64,
    pub perturb_seed: u64,
    pub terminal_seed: u64,
    pub report: &'a ScalingReport,
}

/// Human summary of a verification run.
pub fn verify_summary(r: &VerifyReport) -> String {
    let l = &r.lemmas;
    let mut out = format!(
        "n={} m={} sigma={} queries={} mismatches={} fallbacks={} max_probes={} (ceiling {:.0})\n",
        r.n,
        r.m,
        r.sigma,
        r.queries,
        r.mismatches.len(),
        r.fallbacks,
        r.max_probes,
        r.probe_ceiling
    );
    out += &format!(
        "spacing {}/{:.2}  R1 distinct max {}  contiguity violations {}  bad/good {}/{}  route parts max {}/{}  R2 max per target {} ({:.3} sqrt(n sigma))\n",
        l.max_spacing,
        l.spacing_bound,
        l.max_r1_distinct,
        l.contiguity_violations,
        l.bad,
        l.good,
        l.max_route_parts,
        l.route_bound,
        l.max_r2_per_target,
        l.r2_constant
    );
    for m in r.mismatches.iter().take(20) {
        out += &format!(
            "mismatch: s={} t={} e={} got {} expected {}\n",
            m.s, m.t, m.e, m.got, m.expected
        );
    }
    out
}
