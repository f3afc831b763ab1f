use repath_core::fixtures;
use repath_core::verify::exhaustive_check;
use repath_core::OracleParams;

#[test]
fn every_fixture_matches_bfs() {
    let params = OracleParams::default();
    let mut failed = Vec::new();
    for f in fixtures::all() {
        let r = exhaustive_check(&f.graph, &f.sources, &params).expect("build");
        eprintln!(
            "{:<32} queries={:>8} mismatches={} fallbacks={} max_probes={} lemma_violations={} merge_diverge={} at_top={} hulls={} bad/good={}/{}",
            f.name,
            r.queries,
            r.mismatches.len(),
            r.fallbacks,
            r.max_probes,
            r.lemmas.violations(),
            r.lemmas.merge_diverge,
            r.lemmas.r2_at_top,
            r.lemmas.hull_overlaps,
            r.lemmas.bad,
            r.lemmas.good
        );
        if !r.passed() || r.lemmas.violations() != 0 {
            failed.push((
                f.name.clone(),
                r.mismatches.iter().take(5).cloned().collect::<Vec<_>>(),
            ));
        }
    }
    assert!(failed.is_empty(), "{failed:?}");
}
