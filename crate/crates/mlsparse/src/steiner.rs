//! Steiner trees: the metric-closure 2-approximation and an exact
//! Dreyfus-Wagner style dynamic program for desk-sized oracle checks.

use crate::graph::{EdgeSet, Graph, GraphError, VertexId};
use crate::shortest::{apsp, expand_paths, metric_closure};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SteinerError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("instance too large for the exact solver: |T| <= {max_t} and |V| <= {max_v} required")]
    GuardExceeded { max_t: usize, max_v: usize },
}

pub const EXACT_MAX_TERMINALS: usize = 10;
pub const EXACT_MAX_VERTICES: usize = 20;

/// Kruskal restricted to the member edges of `set`; returns a spanning forest
/// of the subgraph, ties broken by edge identifier.
pub(crate) fn restricted_mst(g: &Graph, set: &EdgeSet) -> EdgeSet {
    forced_mst(g, set, &EdgeSet::new())
}

/// Kruskal over `set` where every member of `forced` (assumed acyclic) is
/// taken first. Used by merges that must not drop edges already committed to
/// a higher level.
pub(crate) fn forced_mst(g: &Graph, set: &EdgeSet, forced: &EdgeSet) -> EdgeSet {
    let mut dsu: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
        if dsu[x] != x {
            let r = find(dsu, dsu[x]);
            dsu[x] = r;
        }
        dsu[x]
    }
    let mut out = EdgeSet::new();
    let take = |dsu: &mut Vec<usize>, out: &mut EdgeSet, id: usize| {
        let e = g.edge(id);
        let (ru, rv) = (find(dsu, e.u), find(dsu, e.v));
        if ru != rv {
            dsu[ru.max(rv)] = ru.min(rv);
            out.insert(id, g.edge_weight(id));
        }
    };
    for id in forced.iter() {
        take(&mut dsu, &mut out, id);
    }
    let mut order: Vec<usize> = set.iter().filter(|id| !forced.contains(*id)).collect();
    order.sort_by(|&a, &b| g.edge_weight(a).cmp(g.edge_weight(b)).then(a.cmp(&b)));
    for id in order {
        take(&mut dsu, &mut out, id);
    }
    out
}

/// Iteratively removes edges incident to non-terminal degree-1 vertices until
/// a fixpoint. Edges in `keep` are never removed.
pub(crate) fn prune_nonterminal_leaves(
    g: &Graph,
    set: &EdgeSet,
    terminals: &[VertexId],
    keep: &EdgeSet,
) -> EdgeSet {
    let mut is_terminal = vec![false; g.vertex_count()];
    for &t in terminals {
        if let Ok(d) = g.dense_of(t) {
            is_terminal[d] = true;
        }
    }
    let mut out = set.clone();
    loop {
        let mut degree = vec![0usize; g.vertex_count()];
        let mut incident: Vec<Option<usize>> = vec![None; g.vertex_count()];
        for id in out.iter() {
            let e = g.edge(id);
            degree[e.u] += 1;
            degree[e.v] += 1;
            incident[e.u] = Some(id);
            incident[e.v] = Some(id);
        }
        let mut removed = false;
        for v in 0..g.vertex_count() {
            if degree[v] == 1 && !is_terminal[v] {
                let id = incident[v].unwrap();
                if out.contains(id) && !keep.contains(id) {
                    // Re-check the degree against the current set: earlier
                    // removals in this sweep may have touched this vertex.
                    let deg_now =
                        out.iter().filter(|&e| g.edge(e).u == v || g.edge(e).v == v).count();
                    if deg_now == 1 {
                        out.remove(id, g.edge_weight(id));
                        removed = true;
                    }
                }
            }
        }
        if !removed {
            return out;
        }
    }
}

/// Metric-closure 2-approximation: expand the MST of the closure back into the
/// graph, re-tree the expansion, and prune non-terminal leaves. The result is
/// a tree spanning `terminals` with weight at most the closure-MST weight.
pub fn steiner_2approx(g: &Graph, terminals: &[VertexId]) -> Result<EdgeSet, SteinerError> {
    g.ensure_connected()?;
    let mut terms = terminals.to_vec();
    terms.sort_unstable();
    terms.dedup();
    if terms.len() <= 1 {
        if let Some(&t) = terms.first() {
            g.dense_of(t)?;
        }
        return Ok(EdgeSet::new());
    }
    let closure = metric_closure(g, &terms)?;
    let closure_mst = closure.graph().mst()?;
    let expanded = expand_paths(&closure, &closure_mst, g)?;
    let tree = restricted_mst(g, &expanded);
    Ok(prune_nonterminal_leaves(g, &tree, &terms, &EdgeSet::new()))
}

/// Exact minimum-weight Steiner tree by dynamic programming over terminal
/// subsets. Guarded to desk scale.
pub fn steiner_exact(g: &Graph, terminals: &[VertexId]) -> Result<EdgeSet, SteinerError> {
    g.ensure_connected()?;
    let mut terms = terminals.to_vec();
    terms.sort_unstable();
    terms.dedup();
    for &t in &terms {
        g.dense_of(t)?;
    }
    if terms.len() > EXACT_MAX_TERMINALS || g.vertex_count() > EXACT_MAX_VERTICES {
        return Err(SteinerError::GuardExceeded {
            max_t: EXACT_MAX_TERMINALS,
            max_v: EXACT_MAX_VERTICES,
        });
    }
    if terms.len() <= 1 {
        return Ok(EdgeSet::new());
    }
    let table = apsp(g)?;
    let n = g.vertex_count();
    let k = terms.len();
    let tdense: Vec<usize> = terms.iter().map(|&t| g.dense_of(t).unwrap()).collect();

    // dp[mask][v] = weight of the cheapest tree connecting {terms[i] : i in
    // mask} together with vertex v.
    let full = (1usize << k) - 1;
    let inf = || -> Option<Weight> { None };
    let mut dp: Vec<Vec<Option<Weight>>> = vec![vec![inf(); n]; full + 1];
    #[derive(Clone)]
    enum Choice {
        /// Shortest path from v to a single terminal.
        Leaf(usize),
        /// Walk the canonical path v..u, then split mask at u.
        Via { u: usize, split: usize },
    }
    let mut choice: Vec<Vec<Option<Choice>>> = vec![vec![None; n]; full + 1];

    for (i, &td) in tdense.iter().enumerate() {
        let mask = 1usize << i;
        for v in 0..n {
            dp[mask][v] = Some(*table.dist(v, td));
            choice[mask][v] = Some(Choice::Leaf(i));
        }
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        // Merge two subtrees at a common vertex. Fixing the lowest bit in one
        // side enumerates each unordered split once.
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut merged: Vec<Option<(Weight, usize)>> = vec![None; n];
        let mut sub = rest;
        loop {
            // `low | sub` over all subsets of `rest` enumerates each unordered
            // split of `mask` exactly once; sub == rest leaves right empty.
            let left = low | sub;
            let right = mask ^ left;
            if right != 0 {
                for v in 0..n {
                    if let (Some(a), Some(b)) = (&dp[left][v], &dp[right][v]) {
                        let cand = *a + *b;
                        match &merged[v] {
                            Some((cur, _)) if *cur <= cand => {}
                            _ => merged[v] = Some((cand, left)),
                        }
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        // Attach via a shortest path to the merge point.
        for v in 0..n {
            for (u, m) in merged.iter().enumerate() {
                if let Some((mw, split)) = m {
                    let cand = *mw + table.dist(u, v);
                    match &dp[mask][v] {
                        Some(cur) if *cur <= cand => {}
                        _ => {
                            dp[mask][v] = Some(cand);
                            choice[mask][v] = Some(Choice::Via { u, split: *split });
                        }
                    }
                }
            }
        }
    }

    // Reconstruct edges.
    let mut out = EdgeSet::new();
    let mut stack = vec![(full, tdense[0])];
    while let Some((mask, v)) = stack.pop() {
        match choice[mask][v].clone().expect("dp complete") {
            Choice::Leaf(i) => {
                for eid in table.path_edges(v, tdense[i]) {
                    out.insert(eid, g.edge_weight(eid));
                }
            }
            Choice::Via { u, split } => {
                for eid in table.path_edges(v, u) {
                    out.insert(eid, g.edge_weight(eid));
                }
                stack.push((split, u));
                stack.push((mask ^ split, u));
            }
        }
    }
    debug_assert_eq!(out.weight(), dp[full][tdense[0]].as_ref().unwrap());
    Ok(out)
}

/// True iff `set` is acyclic and all terminals lie in one of its components.
pub fn spans_and_acyclic(g: &Graph, set: &EdgeSet, terminals: &[VertexId]) -> bool {
    let mut dsu: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
        if dsu[x] != x {
            let r = find(dsu, dsu[x]);
            dsu[x] = r;
        }
        dsu[x]
    }
    for id in set.iter() {
        let e = g.edge(id);
        let (ru, rv) = (find(&mut dsu, e.u), find(&mut dsu, e.v));
        if ru == rv {
            return false;
        }
        dsu[ru.max(rv)] = ru.min(rv);
    }
    let mut roots = terminals.iter().filter_map(|&t| g.dense_of(t).ok());
    if let Some(first) = roots.next() {
        let r0 = find(&mut dsu, first);
        roots.all(|t| find(&mut dsu, t) == r0)
    } else {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::weight::wint;

    #[test]
    fn star4_two_approx_dedups_through_the_center() {
        let g = star4();
        let t = steiner_2approx(&g, &[1, 2, 3]).unwrap();
        assert_eq!(t.iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(t.weight(), &wint(3));
        // The closure MST weighs 4; expansion shares the center.
        let closure = metric_closure(&g, &[1, 2, 3]).unwrap();
        assert_eq!(closure.graph().mst().unwrap().weight(), &wint(4));
    }

    #[test]
    fn path3_two_approx_is_the_path() {
        let g = path3();
        let t = steiner_2approx(&g, &[1, 3]).unwrap();
        assert_eq!(t.iter().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(t.weight(), &wint(2));
    }

    #[test]
    fn single_terminal_yields_empty_tree() {
        let g = cycle4();
        assert!(steiner_2approx(&g, &[2]).unwrap().is_empty());
        assert!(steiner_exact(&g, &[2]).unwrap().is_empty());
    }

    #[test]
    fn exact_values_on_fixtures() {
        assert_eq!(steiner_exact(&star4(), &[1, 2, 3]).unwrap().weight(), &wint(3));
        assert_eq!(steiner_exact(&path3(), &[1, 3]).unwrap().weight(), &wint(2));
        // T = V on the 4-cycle: equals the MST weight.
        let g = cycle4();
        assert_eq!(steiner_exact(&g, &[1, 2, 3, 4]).unwrap().weight(), &wint(3));
    }

    #[test]
    fn exact_guard_trips() {
        let mut text = String::new();
        for i in 0..21 {
            text.push_str(&format!("{} {} 1\n", i, i + 1));
        }
        let g = Graph::parse(&text).unwrap();
        assert!(matches!(
            steiner_exact(&g, &[0, 21]),
            Err(SteinerError::GuardExceeded { .. })
        ));
    }

    #[test]
    fn exact_beats_detour() {
        // Steiner point saves weight: star where the direct terminal-terminal
        // edges are expensive.
        let g = Graph::parse("0 1 1\n0 2 1\n0 3 1\n1 2 3\n2 3 3").unwrap();
        let t = steiner_exact(&g, &[1, 2, 3]).unwrap();
        assert_eq!(t.weight(), &wint(3));
        assert!(spans_and_acyclic(&g, &t, &[1, 2, 3]));
    }

    #[test]
    fn approx_is_within_factor_two_and_a_tree() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..40 {
            let n = rng.gen_range(4..9);
            let mut text = String::new();
            for v in 1..n {
                let u = rng.gen_range(0..v);
                text.push_str(&format!("{} {} {}\n", u, v, rng.gen_range(1..10)));
            }
            let mut g = Graph::parse(&text).unwrap();
            // A few random extra edges, skipping duplicates.
            for _ in 0..3 {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    let _ = g.add_edge(u, v, wint(rng.gen_range(1..10)));
                }
            }
            let k = rng.gen_range(2..=4.min(n as usize));
            let mut terms: Vec<u32> = (0..n).collect();
            for i in (1..terms.len()).rev() {
                terms.swap(i, rng.gen_range(0..=i));
            }
            terms.truncate(k);
            let approx = steiner_2approx(&g, &terms).unwrap();
            let exact = steiner_exact(&g, &terms).unwrap();
            assert!(*approx.weight() <= wint(2) * exact.weight());
            assert!(spans_and_acyclic(&g, &approx, &terms));
            // Two-approximation chain: the closure MST alone is within 2x.
            let closure = metric_closure(&g, &terms).unwrap();
            assert!(*closure.graph().mst().unwrap().weight() <= wint(2) * exact.weight());
            assert!(approx.weight() <= closure.graph().mst().unwrap().weight());
        }
    }
}
