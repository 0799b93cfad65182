//! Single-level spanner constructions: the greedy weighted spanner and the
//! metric-closure subsetwise spanner, plus the stretch verifier used
//! throughout the test suites.

use crate::distortion::{DistortionError, DistortionFn};
use crate::graph::{EdgeSet, Graph, GraphError, VertexId};
use crate::oracle::{self, OracleError, PairSet};
use crate::shortest::{apsp, dijkstra_filtered, expand_paths, metric_closure};
use crate::weight::{to_f64, Weight};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpannerError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Distortion(#[from] DistortionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("greedy stretch must satisfy t >= 1")]
    StretchBelowOne,
    #[error("non-multiplicative distortion needs the exact oracle, but the closure has {edges} edges (max {max})")]
    ClosureTooLarge { edges: usize, max: usize },
    #[error("constructed spanner failed stretch verification on pair ({0}, {1})")]
    VerificationFailed(VertexId, VertexId),
}

/// Greedy weighted spanner: scan edges by nondecreasing weight (ties by
/// identifier) and keep an edge iff the current spanner distance between its
/// endpoints exceeds t times its weight. The output always contains the MST.
pub fn greedy_spanner(g: &Graph, t: &Weight) -> Result<EdgeSet, SpannerError> {
    if *t < Weight::from_integer(1) {
        return Err(SpannerError::StretchBelowOne);
    }
    g.ensure_connected()?;
    let mut order: Vec<usize> = g.edge_ids().collect();
    order.sort_by(|&a, &b| g.edge_weight(a).cmp(g.edge_weight(b)).then(a.cmp(&b)));
    let mut selected = EdgeSet::new();
    // Adjacency over selected edges, maintained incrementally.
    let mut adj: Vec<Vec<(usize, Weight)>> = vec![Vec::new(); g.vertex_count()];
    for id in order {
        let e = g.edge(id);
        let cutoff = *t * g.edge_weight(id);
        if !within_cutoff(&adj, e.u, e.v, &cutoff) {
            selected.insert(id, g.edge_weight(id));
            adj[e.u].push((e.v, *g.edge_weight(id)));
            adj[e.v].push((e.u, *g.edge_weight(id)));
        }
    }
    Ok(selected)
}

/// Truncated Dijkstra: is d(source, target) <= cutoff in the partial spanner?
fn within_cutoff(adj: &[Vec<(usize, Weight)>], source: usize, target: usize, cutoff: &Weight) -> bool {
    let mut dist: Vec<Option<Weight>> = vec![None; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(Weight::from_integer(0));
    heap.push(Reverse((Weight::from_integer(0), source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > *cutoff {
            return false;
        }
        if x == target {
            return true;
        }
        if dist[x].as_ref() != Some(&d) {
            continue;
        }
        for (y, w) in &adj[x] {
            let cand = d + w;
            if cand <= *cutoff {
                match &dist[*y] {
                    Some(cur) if *cur <= cand => {}
                    _ => {
                        dist[*y] = Some(cand);
                        heap.push(Reverse((cand, *y)));
                    }
                }
            }
        }
    }
    false
}

/// One terminal pair from a stretch check, with the exact ratios achieved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StretchWitness {
    pub pair: (VertexId, VertexId),
    /// d_{E'}(u,v) / f(d_G(u,v)); `None` when the pair is unreachable in E'.
    pub ratio: Option<Weight>,
    /// d_{E'}(u,v) / d_G(u,v) for the same pair.
    pub stretch: Option<Weight>,
}

impl StretchWitness {
    pub fn ratio_f64(&self) -> f64 {
        self.ratio.as_ref().map(to_f64).unwrap_or(f64::INFINITY)
    }

    pub fn stretch_f64(&self) -> f64 {
        self.stretch.as_ref().map(to_f64).unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StretchReport {
    pub ok: bool,
    /// Pair maximizing d_{E'} / f(d_G); `None` when no pairs were checked.
    pub worst: Option<StretchWitness>,
}

/// Verifies d_{E'}(u, v) <= f(d_G(u, v)) for every requested pair and reports
/// the argmax of d_{E'}/f(d_G). Unreachable pairs report as not ok with an
/// infinite ratio.
pub fn check_stretch(
    g: &Graph,
    edges: &EdgeSet,
    pairs: &[(VertexId, VertexId)],
    f: &DistortionFn,
) -> Result<StretchReport, SpannerError> {
    let table = apsp(g)?;
    let mut by_source: std::collections::BTreeMap<usize, Vec<(usize, VertexId, VertexId)>> =
        Default::default();
    for &(a, b) in pairs {
        let (da, db) = (g.dense_of(a)?, g.dense_of(b)?);
        if da == db {
            continue;
        }
        by_source.entry(da.min(db)).or_default().push((da.max(db), a, b));
    }
    let mut ok = true;
    let mut worst: Option<StretchWitness> = None;
    for (src, targets) in by_source {
        let (dist, _) = dijkstra_filtered(g, src, |eid| edges.contains(eid));
        for (dst, a, b) in targets {
            let base = table.dist(src, dst);
            let budget = f.eval(base)?;
            let witness = match &dist[dst] {
                Some(d) => {
                    if *d > budget {
                        ok = false;
                    }
                    StretchWitness {
                        pair: (a, b),
                        ratio: Some(*d / budget),
                        stretch: Some(*d / base),
                    }
                }
                None => {
                    ok = false;
                    StretchWitness { pair: (a, b), ratio: None, stretch: None }
                }
            };
            let beats = match (&witness.ratio, worst.as_ref().map(|w| &w.ratio)) {
                (_, None) => true,
                (None, Some(Some(_))) => true,
                (None, Some(None)) => false,
                (Some(_), Some(None)) => false,
                (Some(r), Some(Some(cur))) => r > cur,
            };
            if beats {
                worst = Some(witness);
            }
        }
    }
    Ok(StretchReport { ok, worst })
}

/// All unordered pairs over a terminal set.
pub fn terminal_pairs(terminals: &[VertexId]) -> Vec<(VertexId, VertexId)> {
    let mut pairs = Vec::new();
    for i in 0..terminals.len() {
        for j in (i + 1)..terminals.len() {
            pairs.push((terminals[i], terminals[j]));
        }
    }
    pairs
}

/// Wall time per construction phase. The closure build (all-pairs shortest
/// paths) is reported separately from the spanner subroutine since it
/// usually dominates.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpannerTimings {
    pub closure_ms: u128,
    pub subroutine_ms: u128,
    pub expand_verify_ms: u128,
}

/// A subsetwise spanner: edge set, the terminals it serves, the distortion it
/// was built for, and the worst stretch actually achieved.
#[derive(Debug, Clone)]
pub struct SubsetSpanner {
    pub edges: EdgeSet,
    pub terminals: Vec<VertexId>,
    pub distortion: DistortionFn,
    pub worst: Option<StretchWitness>,
    pub timings: SpannerTimings,
}

/// Metric-closure subsetwise spanner: build the closure over the terminals,
/// run an f-spanner subroutine on it (greedy for multiplicative f, the exact
/// oracle otherwise), and expand the surviving closure edges back into the
/// graph. The stretch invariant is verified before returning.
pub fn subsetwise_spanner(
    g: &Graph,
    terminals: &[VertexId],
    f: &DistortionFn,
) -> Result<SubsetSpanner, SpannerError> {
    let mut terms = terminals.to_vec();
    terms.sort_unstable();
    terms.dedup();
    for &t in &terms {
        g.dense_of(t)?;
    }
    if terms.len() <= 1 {
        return Ok(SubsetSpanner {
            edges: EdgeSet::new(),
            terminals: terms,
            distortion: f.clone(),
            worst: None,
            timings: SpannerTimings::default(),
        });
    }
    g.ensure_connected()?;
    let started = std::time::Instant::now();
    let closure = metric_closure(g, &terms)?;
    let closure_ms = started.elapsed().as_millis();

    let started = std::time::Instant::now();
    let selected = match f.multiplicative_stretch() {
        Some(t) => greedy_spanner(closure.graph(), t)?,
        None => {
            let m = closure.graph().edge_count();
            if m > oracle::SOLVE_EXACT_MAX_EDGES {
                return Err(SpannerError::ClosureTooLarge {
                    edges: m,
                    max: oracle::SOLVE_EXACT_MAX_EDGES,
                });
            }
            let pairs = PairSet::all_pairs(closure.graph());
            oracle::solve_exact(closure.graph(), &pairs, f)?
        }
    };
    let subroutine_ms = started.elapsed().as_millis();

    let started = std::time::Instant::now();
    let edges = expand_paths(&closure, &selected, g)?;
    let report = check_stretch(g, &edges, &terminal_pairs(&terms), f)?;
    if !report.ok {
        let pair = report.worst.as_ref().map(|w| w.pair).unwrap_or((0, 0));
        return Err(SpannerError::VerificationFailed(pair.0, pair.1));
    }
    let expand_verify_ms = started.elapsed().as_millis();
    Ok(SubsetSpanner {
        edges,
        terminals: terms,
        distortion: f.clone(),
        worst: report.worst,
        timings: SpannerTimings { closure_ms, subroutine_ms, expand_verify_ms },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::weight::{wfrac, wint};

    #[test]
    fn greedy_on_cycle4_depends_on_stretch() {
        let g = cycle4();
        // t=3: detour 3 <= 3*1, last scanned edge skipped.
        let s = greedy_spanner(&g, &wint(3)).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        // t=2: detour 3 > 2*1, all four edges kept.
        let s = greedy_spanner(&g, &wint(2)).unwrap();
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn greedy_on_a_tree_returns_the_tree() {
        let g = star4();
        for t in [wint(1), wfrac(3, 2), wint(10)] {
            let s = greedy_spanner(&g, &t).unwrap();
            assert_eq!(s.len(), 3);
        }
    }

    #[test]
    fn greedy_rejects_stretch_below_one() {
        assert!(matches!(
            greedy_spanner(&cycle4(), &wfrac(1, 2)),
            Err(SpannerError::StretchBelowOne)
        ));
    }

    #[test]
    fn greedy_contains_mst_and_respects_stretch() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(11);
        for trial in 0..30 {
            let n = rng.gen_range(5..10);
            let mut g = Graph::new(0..n);
            for v in 1..n {
                let u = rng.gen_range(0..v);
                g.add_edge(u, v, wint(rng.gen_range(1..10))).unwrap();
            }
            for _ in 0..n {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    let _ = g.add_edge(u, v, wint(rng.gen_range(1..10)));
                }
            }
            let t = [wint(1), wfrac(6, 5), wint(2), wint(4)][trial % 4];
            let s = greedy_spanner(&g, &t).unwrap();
            let mst = g.mst().unwrap();
            assert!(mst.is_subset(&s), "greedy output must contain the MST");
            let f = DistortionFn::multiplicative(t).unwrap();
            let all: Vec<u32> = g.vertex_ids().to_vec();
            let report = check_stretch(&g, &s, &terminal_pairs(&all), &f).unwrap();
            assert!(report.ok);
        }
    }

    #[test]
    fn check_stretch_examples() {
        let g = path3();
        let e = EdgeSet::from_ids(&g, [0, 1]).unwrap();
        let report = check_stretch(&g, &e, &[(1, 3)], &DistortionFn::identity()).unwrap();
        assert!(report.ok);

        let g = cycle4();
        let e = EdgeSet::from_ids(&g, [0, 1, 2]).unwrap();
        let pairs = terminal_pairs(&[1, 2, 3, 4]);
        let f2 = DistortionFn::multiplicative(wint(2)).unwrap();
        let report = check_stretch(&g, &e, &pairs, &f2).unwrap();
        assert!(!report.ok);
        let worst = report.worst.unwrap();
        // The dropped edge (1,4) forces a detour of length 3.
        assert_eq!(worst.pair, (1, 4));
        assert_eq!(worst.stretch, Some(wint(3)));
        assert_eq!(worst.ratio, Some(wfrac(3, 2)));

        let f3 = DistortionFn::multiplicative(wint(3)).unwrap();
        let report = check_stretch(&g, &e, &pairs, &f3).unwrap();
        assert!(report.ok);
    }

    #[test]
    fn check_stretch_flags_unreachable_pairs() {
        let g = cycle4();
        let e = EdgeSet::from_ids(&g, [0]).unwrap();
        let report = check_stretch(&g, &e, &[(1, 3)], &DistortionFn::identity()).unwrap();
        assert!(!report.ok);
        let worst = report.worst.unwrap();
        assert_eq!(worst.ratio, None);
        assert!(worst.ratio_f64().is_infinite());
    }

    #[test]
    fn subsetwise_on_star4_keeps_all_spokes() {
        let g = star4();
        let f = DistortionFn::multiplicative(wint(2)).unwrap();
        let s = subsetwise_spanner(&g, &[1, 2, 3], &f).unwrap();
        assert_eq!(s.edges.iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(s.edges.weight(), &wint(3));
        // Every terminal pair sits at distance 2 <= 2*2.
        let worst = s.worst.unwrap();
        assert!(worst.ratio.unwrap() <= wint(1));
    }

    #[test]
    fn subsetwise_on_path3_is_the_unique_connection() {
        let g = path3();
        for f in [
            DistortionFn::identity(),
            DistortionFn::multiplicative(wint(3)).unwrap(),
            DistortionFn::additive(wint(2)).unwrap(),
        ] {
            let s = subsetwise_spanner(&g, &[1, 3], &f).unwrap();
            assert_eq!(s.edges.iter().collect::<Vec<_>>(), vec![0, 1]);
            assert_eq!(s.edges.weight(), &wint(2));
        }
    }

    #[test]
    fn subsetwise_single_terminal_is_empty() {
        let g = cycle4();
        let s = subsetwise_spanner(&g, &[2], &DistortionFn::identity()).unwrap();
        assert!(s.edges.is_empty());
    }

    #[test]
    fn non_multiplicative_guard_trips_on_large_closures() {
        // 8 terminals give a 28-edge closure, above the oracle guard.
        let mut text = String::new();
        for i in 0..9 {
            text.push_str(&format!("{} {} 1\n", i, i + 1));
        }
        let g = Graph::parse(&text).unwrap();
        let f = DistortionFn::additive(wint(2)).unwrap();
        let terms: Vec<u32> = (0..8).collect();
        assert!(matches!(
            subsetwise_spanner(&g, &terms, &f),
            Err(SpannerError::ClosureTooLarge { edges: 28, .. })
        ));
    }
}
