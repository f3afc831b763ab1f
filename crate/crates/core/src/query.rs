//! Answering `Q(s, t, e)` from the stored tables.

use core::cell::Cell;
use core::fmt;

use crate::dist::Dist;
use crate::graph::{EdgeId, Vertex};
use crate::oracle::tables::floor_log2;
use crate::oracle::Oracle;
use crate::perturb::sssp;
use crate::replacement::{DetourFinder, TreePath};
use crate::NONE;

/// Where the failed edge sits relative to the `s -> t` path. For on-path
/// edges the endpoints come ordered, the one closer to `s` first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgePosition {
    Off,
    Near(Vertex, Vertex),
    Far(Vertex, Vertex),
}

/// Which candidate produced the answer. Diagnostic only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    EdgeOffPath,
    Near,
    ThroughTerminal,
    R1,
    R2,
    Fallback,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::EdgeOffPath => "edge-off-path",
            Provenance::Near => "near",
            Provenance::ThroughTerminal => "through-terminal",
            Provenance::R1 => "r1",
            Provenance::R2 => "r2",
            Provenance::Fallback => "fallback",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryAnswer {
    pub distance: Dist,
    pub provenance: Provenance,
    /// Table lookups, range-minimum queries and map searches performed.
    pub probes: u32,
    /// The intersection lookup missed and the answer came from a direct
    /// search instead.
    pub fell_back: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryError {
    NotASource(Vertex),
    VertexOutOfRange(Vertex),
    EdgeOutOfRange(EdgeId),
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryError::NotASource(s) => write!(f, "vertex {s} is not a source"),
            QueryError::VertexOutOfRange(v) => write!(f, "vertex {v} does not exist"),
            QueryError::EdgeOutOfRange(e) => write!(f, "edge {e} does not exist"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for QueryError {}

struct Probe<'a> {
    o: &'a Oracle,
    count: Cell<u32>,
}

impl Probe<'_> {
    fn hit(&self, k: u32) {
        self.count.set(self.count.get() + k);
    }
    fn b0(&self, x: Vertex, y: Vertex) -> Dist {
        self.hit(1);
        self.o.b0(x, y)
    }
}

impl Oracle {
    fn check(&self, s: Vertex, t: Vertex, e: EdgeId) -> Result<(), QueryError> {
        let n = self.graph.n();
        for v in [s, t] {
            if v as usize >= n {
                return Err(QueryError::VertexOutOfRange(v));
            }
        }
        if !self.is_source(s) {
            return Err(QueryError::NotASource(s));
        }
        if e as usize >= self.graph.m() {
            return Err(QueryError::EdgeOutOfRange(e));
        }
        Ok(())
    }

    pub fn edge_on_path(
        &self,
        s: Vertex,
        t: Vertex,
        e: EdgeId,
    ) -> Result<EdgePosition, QueryError> {
        self.check(s, t, e)?;
        let pr = Probe {
            o: self,
            count: Cell::new(0),
        };
        Ok(self.position(&pr, s, t, e))
    }

    fn position(&self, pr: &Probe<'_>, s: Vertex, t: Vertex, e: EdgeId) -> EdgePosition {
        let (a, b) = self.graph.endpoints(e);
        let st = self.b0p(s, t);
        pr.hit(1);
        if !st.is_finite() {
            return EdgePosition::Off;
        }
        let (u, v) = if self.b0p(s, a) < self.b0p(s, b) {
            (a, b)
        } else {
            (b, a)
        };
        pr.hit(2);
        if self.near_map(s, t).contains_key(&e) {
            pr.hit(1);
            return EdgePosition::Near(u, v);
        }
        pr.hit(2);
        let Some(ts) = self.b1(s, t) else {
            return EdgePosition::Off;
        };
        let through = |w: Vertex| self.b0p(s, w) + self.b0p(ts, w) + self.b0p(ts, t) == st;
        pr.hit(6);
        if through(u) && through(v) {
            EdgePosition::Far(u, v)
        } else {
            EdgePosition::Off
        }
    }

    pub fn query(&self, s: Vertex, t: Vertex, e: EdgeId) -> Result<QueryAnswer, QueryError> {
        self.check(s, t, e)?;
        let pr = Probe {
            o: self,
            count: Cell::new(0),
        };
        let answer = |distance, provenance, fell_back, pr: &Probe<'_>| QueryAnswer {
            distance,
            provenance,
            probes: pr.count.get(),
            fell_back,
        };
        match self.position(&pr, s, t, e) {
            EdgePosition::Off => Ok(answer(pr.b0(s, t), Provenance::EdgeOffPath, false, &pr)),
            EdgePosition::Near(..) => {
                pr.hit(1);
                let d = self.near_map(s, t)[&e];
                Ok(answer(d, Provenance::Near, false, &pr))
            }
            EdgePosition::Far(u, v) => {
                let ts = self.b1(s, t).unwrap();
                pr.hit(1);
                let mut best = (
                    self.through_terminal(&pr, s, ts, t, u, v),
                    Provenance::ThroughTerminal,
                );
                let Some(x0) = self.find_int(&pr, s, u, t) else {
                    let d = self.fallback(s, t, e);
                    log::warn!(
                        "intersection lookup missed for ({s}, {t}, {e}); used direct search"
                    );
                    let out = if d < best.0 {
                        (d, Provenance::Fallback)
                    } else {
                        best
                    };
                    return Ok(answer(out.0, out.1, true, &pr));
                };
                let r1 = self.far_r1(&pr, s, t, x0);
                if r1 < best.0 {
                    best = (r1, Provenance::R1);
                }
                let r2 = self.far_r2(&pr, s, t, x0, u, v);
                if r2 < best.0 {
                    best = (r2, Provenance::R2);
                }
                Ok(answer(best.0, best.1, false, &pr))
            }
        }
    }

    /// Best replacement passing through `t_s`, for `e = (u, v)` on `s -> t_s`.
    fn through_terminal(
        &self,
        pr: &Probe<'_>,
        s: Vertex,
        ts: Vertex,
        t: Vertex,
        u: Vertex,
        v: Vertex,
    ) -> Dist {
        let tail = pr.b0(ts, t);
        let sv = pr.b0(s, v).raw();
        let tu = pr.b0(ts, u).raw();
        pr.hit(1);
        if sv.is_power_of_two() {
            return self.b3(s, ts, floor_log2(sv)).unwrap_or(Dist::INF) + tail;
        }
        if tu.is_power_of_two() {
            return self.b4(s, ts, floor_log2(tu)).unwrap_or(Dist::INF) + tail;
        }
        let k = floor_log2(sv);
        let j = floor_log2(tu);
        pr.hit(5);
        let ul = self.b2(s, v).unwrap();
        let ur = self.b2(ts, u).unwrap();
        let left = pr.b0(s, ul) + self.b3(ul, ts, k).unwrap_or(Dist::INF);
        let right = self.b4(s, ur, j).unwrap_or(Dist::INF) + pr.b0(ts, ur);
        let mid = self.b5(s, ts, k, j).unwrap_or(Dist::INF);
        left.min(right).min(mid) + tail
    }

    /// `Int(u, t)`, or `None` when neither index resolves it.
    fn find_int(&self, pr: &Probe<'_>, s: Vertex, u: Vertex, t: Vertex) -> Option<Vertex> {
        let tt = self.target(t);
        pr.hit(1);
        if let Some(&x) = tt.int1.get(&u) {
            return Some(x);
        }
        pr.hit(1);
        let us = self.b1(s, u)?;
        // u_s must sit within the I₁ radius above u for Int(u_s) = Int(u)
        pr.hit(2);
        let gap = self.b0(s, u).raw() - self.b0(s, us).raw();
        if gap > self.threshold {
            return None;
        }
        pr.hit(1);
        tt.int2.get(&us).copied()
    }

    /// Paths diverging above `Int(u, t)` and merging below `t_s`.
    fn far_r1(&self, pr: &Probe<'_>, s: Vertex, t: Vertex, x0: Vertex) -> Dist {
        let tt = self.target(t);
        let st = pr.b0(s, t).raw();
        let depth = |w: Vertex| st - pr.b0(s, w).raw();
        let d0 = depth(x0);
        pr.hit(1);
        let Some(route) = tt.routes.get(&s) else {
            return Dist::INF;
        };
        let mut best = Dist::INF;
        for run in &route.heavy {
            pr.hit(1);
            let lo = d0.max(run.low_depth);
            if run.exit_depth <= lo {
                continue;
            }
            let chain = &tt.bst[run.chain as usize];
            let top = tt.sigma.chains[run.chain as usize].top_depth;
            let m = chain.min_in(lo, run.exit_depth);
            pr.hit(3);
            if m.is_finite() {
                let cand = Dist::new(m.raw() - (top - run.exit_depth) + (st - run.exit_depth));
                best = best.min(cand);
            }
        }
        for &seg in &route.light {
            pr.hit(1);
            let sg = &tt.sigma.segments[seg as usize];
            if sg.lower_depth < d0 {
                continue;
            }
            let r = tt.r1[seg as usize];
            best = best.min(r + (st - sg.upper_depth));
        }
        best
    }

    /// Paths diverging inside the segment that holds `e`.
    fn far_r2(
        &self,
        pr: &Probe<'_>,
        s: Vertex,
        t: Vertex,
        x0: Vertex,
        u: Vertex,
        v: Vertex,
    ) -> Dist {
        let tt = self.target(t);
        let st = pr.b0(s, t).raw();
        let d0 = st - pr.b0(s, x0).raw();
        let du = st - pr.b0(s, u).raw();
        let dv = st - pr.b0(s, v).raw();
        pr.hit(1);
        let Some(i) = tt.sigma.node_index(x0) else {
            return Dist::INF;
        };
        let seg = tt.sigma.node_down[i];
        if seg == NONE {
            return Dist::INF;
        }
        pr.hit(1);
        match tt.r2[seg as usize].range(du..).next() {
            Some((_, entry)) if entry.last_depth <= dv => Dist::new(entry.hops + st - d0),
            _ => Dist::INF,
        }
    }

    /// Direct preferred-path search for the rare query the intersection
    /// indexes cannot place.
    fn fallback(&self, s: Vertex, t: Vertex, e: EdgeId) -> Dist {
        let tree = sssp(&self.graph, &self.pert, s);
        let path = TreePath::new(&self.graph, &self.pert, tree.tree_path(t).unwrap());
        let k = path.position_of_edge(e).unwrap();
        let mut finder = DetourFinder::new(self.graph.n());
        finder
            .preferred(&self.graph, &self.pert, &path, k)
            .map_or(Dist::INF, |d| Dist::new(d.hops))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::oracle::{build_oracle, OracleParams};
    use crate::replacement::brute_replacement_dist;

    fn exhaustive(g: &crate::Graph, sources: &[Vertex]) {
        let o = build_oracle(g, sources, &OracleParams::default()).unwrap();
        for &s in sources {
            for t in 0..g.n() as Vertex {
                for e in 0..g.m() as EdgeId {
                    let got = o.query(s, t, e).unwrap();
                    assert_eq!(
                        got.distance,
                        brute_replacement_dist(g, s, t, e),
                        "({s}, {t}, {e})"
                    );
                }
            }
        }
    }

    #[test]
    fn small_graphs_agree_with_bfs() {
        exhaustive(&gen::path(3), &[0]);
        exhaustive(&gen::cycle(4), &[0]);
        exhaustive(&gen::complete(3), &[0, 1, 2]);
        exhaustive(&gen::cycle(12), &[0, 5]);
        exhaustive(&gen::grid(4, 4), &[0, 7]);
    }

    #[test]
    fn p3_bridge_is_infinite() {
        let g = gen::path(3);
        let o = build_oracle(&g, &[0], &OracleParams::default()).unwrap();
        let e = g.edge_between(1, 2).unwrap();
        assert_eq!(o.query(0, 2, e).unwrap().distance, Dist::INF);
    }

    #[test]
    fn domain_errors() {
        let g = gen::path(3);
        let o = build_oracle(&g, &[0], &OracleParams::default()).unwrap();
        assert_eq!(o.query(1, 2, 0), Err(QueryError::NotASource(1)));
        assert_eq!(o.query(0, 9, 0), Err(QueryError::VertexOutOfRange(9)));
        assert_eq!(o.query(0, 2, 5), Err(QueryError::EdgeOutOfRange(5)));
    }
}
