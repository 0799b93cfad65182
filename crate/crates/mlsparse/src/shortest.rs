//! All-pairs shortest paths, metric closure and path back-expansion.

use crate::graph::{EdgeSet, Graph, GraphError, VertexId};
use crate::weight::Weight;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Exact shortest-path distances plus enough parent structure to reconstruct
/// one canonical path per pair. Ties are broken toward the smallest
/// predecessor identifier, so reconstruction is deterministic.
#[derive(Debug, Clone)]
pub struct ShortestPathTable {
    /// dist[s][v] over dense indices
    dist: Vec<Vec<Weight>>,
    /// pred[s][v] = (predecessor vertex, edge id) on the canonical s-v path
    pred: Vec<Vec<Option<(usize, usize)>>>,
}

/// Per-vertex distances from one source; `None` marks unreachable vertices.
pub type DistanceVec = Vec<Option<Weight>>;
/// Per-vertex (predecessor, edge id) pairs along canonical shortest paths.
pub type PredecessorVec = Vec<Option<(usize, usize)>>;

/// Single-source Dijkstra over an edge filter. Returns (dist, pred) with the
/// same smallest-predecessor tie rule as the full table. `None` distances are
/// unreachable.
pub fn dijkstra_filtered(
    g: &Graph,
    source: usize,
    mut allow_edge: impl FnMut(usize) -> bool,
) -> (DistanceVec, PredecessorVec) {
    let n = g.vertex_count();
    let mut dist: Vec<Option<Weight>> = vec![None; n];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(Weight, usize)>> = BinaryHeap::new();
    dist[source] = Some(Weight::from_integer(0));
    heap.push(Reverse((Weight::from_integer(0), source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, eid) in g.neighbors(x) {
            if !allow_edge(eid) {
                continue;
            }
            let cand = d + g.edge_weight(eid);
            match &dist[y] {
                Some(cur) if *cur < cand => {}
                Some(cur) if *cur == cand => {
                    // Same distance: keep the smallest predecessor.
                    if let Some((p, _)) = pred[y] {
                        if x < p {
                            pred[y] = Some((x, eid));
                        }
                    }
                }
                _ => {
                    dist[y] = Some(cand);
                    pred[y] = Some((x, eid));
                    heap.push(Reverse((cand, y)));
                }
            }
        }
    }
    (dist, pred)
}

pub fn apsp(g: &Graph) -> Result<ShortestPathTable, GraphError> {
    g.ensure_connected()?;
    let n = g.vertex_count();
    let mut dist = Vec::with_capacity(n);
    let mut pred = Vec::with_capacity(n);
    for s in 0..n {
        let (d, p) = dijkstra_filtered(g, s, |_| true);
        dist.push(d.into_iter().map(|x| x.expect("connected graph")).collect());
        pred.push(p);
    }
    Ok(ShortestPathTable { dist, pred })
}

impl ShortestPathTable {
    pub fn dist(&self, u: usize, v: usize) -> &Weight {
        &self.dist[u][v]
    }

    pub fn dist_ids(&self, g: &Graph, a: VertexId, b: VertexId) -> Result<Weight, GraphError> {
        Ok(self.dist[g.dense_of(a)?][g.dense_of(b)?])
    }

    /// Edge ids of the canonical shortest path from `u` to `v`.
    pub fn path_edges(&self, u: usize, v: usize) -> Vec<usize> {
        let mut edges = Vec::new();
        let mut cur = v;
        while cur != u {
            let (p, eid) = self.pred[u][cur].expect("connected graph");
            edges.push(eid);
            cur = p;
        }
        edges.reverse();
        edges
    }

    pub fn vertex_count(&self) -> usize {
        self.dist.len()
    }
}

/// Maximum shortest-path distance over all vertex pairs.
pub fn diameter(g: &Graph) -> Result<Weight, GraphError> {
    let table = apsp(g)?;
    let n = g.vertex_count();
    let mut best = Weight::from_integer(0);
    for u in 0..n {
        for v in (u + 1)..n {
            if *table.dist(u, v) > best {
                best = *table.dist(u, v);
            }
        }
    }
    Ok(best)
}

/// Metric closure of a graph over a terminal set: the complete graph on the
/// terminals where edge (u, v) weighs d_G(u, v), together with a map from each
/// closure edge back to the edges of one witnessing shortest path.
#[derive(Debug, Clone)]
pub struct ClosureGraph {
    graph: Graph,
    /// closure edge id -> parent edge ids of the witnessing path
    paths: Vec<Vec<usize>>,
    terminals: Vec<VertexId>,
}

impl ClosureGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn witness_path(&self, closure_edge: usize) -> Result<&[usize], GraphError> {
        self.paths
            .get(closure_edge)
            .map(|v| v.as_slice())
            .ok_or(GraphError::UnknownEdge(closure_edge))
    }
}

pub fn metric_closure(g: &Graph, terminals: &[VertexId]) -> Result<ClosureGraph, GraphError> {
    if terminals.is_empty() {
        return Err(GraphError::EmptyTerminals);
    }
    let mut terms: Vec<VertexId> = terminals.to_vec();
    terms.sort_unstable();
    terms.dedup();
    for &t in &terms {
        g.dense_of(t)?;
    }
    let table = apsp(g)?;
    let mut closure = Graph::new(terms.iter().copied());
    let mut paths = Vec::new();
    for i in 0..terms.len() {
        for j in (i + 1)..terms.len() {
            let (du, dv) = (g.dense_of(terms[i])?, g.dense_of(terms[j])?);
            let w = *table.dist(du, dv);
            let id = closure.add_edge(terms[i], terms[j], w)?;
            debug_assert_eq!(id, paths.len());
            paths.push(table.path_edges(du, dv));
        }
    }
    Ok(ClosureGraph { graph: closure, paths, terminals: terms })
}

/// Union (with dedup) of the witnessing paths of the selected closure edges.
pub fn expand_paths(closure: &ClosureGraph, selected: &EdgeSet, parent: &Graph) -> Result<EdgeSet, GraphError> {
    let mut out = EdgeSet::new();
    for cid in selected.iter() {
        for &eid in closure.witness_path(cid)? {
            out.insert(eid, parent.edge_weight(eid));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::weight::{wfrac, wint};

    #[test]
    fn path3_distance() {
        let g = path3();
        let t = apsp(&g).unwrap();
        assert_eq!(t.dist_ids(&g, 1, 3).unwrap(), wint(2));
    }

    #[test]
    fn tri_routes_around_the_heavy_edge() {
        let g = tri();
        let t = apsp(&g).unwrap();
        // a=0, c=2: direct edge weighs 3, detour through b weighs 2.
        assert_eq!(t.dist_ids(&g, 0, 2).unwrap(), wint(2));
        let path = t.path_edges(g.dense_of(0).unwrap(), g.dense_of(2).unwrap());
        assert_eq!(path, vec![0, 1]);
    }

    #[test]
    fn cycle4_distance_by_symmetry() {
        let g = cycle4();
        let t = apsp(&g).unwrap();
        assert_eq!(t.dist_ids(&g, 1, 3).unwrap(), wint(2));
    }

    #[test]
    fn apsp_rejects_disconnected() {
        let g = Graph::parse("1 2 1\n3 4 1").unwrap();
        assert!(apsp(&g).is_err());
    }

    #[test]
    fn table_invariants_hold_on_fixtures() {
        for g in [path3(), star4(), tri(), cycle4()] {
            let t = apsp(&g).unwrap();
            let n = g.vertex_count();
            for u in 0..n {
                assert_eq!(t.dist(u, u), &wint(0));
                for v in 0..n {
                    // symmetry
                    assert_eq!(t.dist(u, v), t.dist(v, u));
                    // reconstructed path weight equals the distance exactly
                    let total: Weight =
                        t.path_edges(u, v).iter().map(|&e| *g.edge_weight(e)).sum();
                    assert_eq!(&total, t.dist(u, v));
                    for w in 0..n {
                        assert!(*t.dist(u, w) <= *t.dist(u, v) + t.dist(v, w));
                    }
                }
            }
        }
    }

    #[test]
    fn closure_of_path3_is_k2_with_pathmap() {
        let g = path3();
        let c = metric_closure(&g, &[1, 3]).unwrap();
        assert_eq!(c.graph().vertex_count(), 2);
        assert_eq!(c.graph().edge_count(), 1);
        assert_eq!(c.graph().edge_weight(0), &wint(2));
        assert_eq!(c.witness_path(0).unwrap(), &[0, 1]);
    }

    #[test]
    fn closure_of_star4_leaves_is_k3_of_twos() {
        let g = star4();
        let c = metric_closure(&g, &[1, 2, 3]).unwrap();
        assert_eq!(c.graph().edge_count(), 3);
        for id in c.graph().edge_ids() {
            assert_eq!(c.graph().edge_weight(id), &wint(2));
        }
        // Closure weights satisfy the triangle inequality.
        let t = apsp(c.graph()).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                for w in 0..3 {
                    assert!(*t.dist(u, w) <= *t.dist(u, v) + t.dist(v, w));
                }
            }
        }
    }

    #[test]
    fn closure_of_single_terminal_is_a_point() {
        let g = cycle4();
        let c = metric_closure(&g, &[2]).unwrap();
        assert_eq!(c.graph().vertex_count(), 1);
        assert_eq!(c.graph().edge_count(), 0);
        assert!(metric_closure(&g, &[]).is_err());
        assert!(metric_closure(&g, &[99]).is_err());
    }

    #[test]
    fn expansion_unions_witness_paths() {
        let g = star4();
        let c = metric_closure(&g, &[1, 2, 3]).unwrap();
        // Closure edges in lexicographic order: (1,2)=0, (1,3)=1, (2,3)=2.
        let sel = EdgeSet::from_ids(c.graph(), [0, 1]).unwrap();
        let e = expand_paths(&c, &sel, &g).unwrap();
        let ids: Vec<usize> = e.iter().collect();
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(e.weight(), &wint(3));

        let empty = expand_paths(&c, &EdgeSet::new(), &g).unwrap();
        assert!(empty.is_empty());

        let gp = path3();
        let cp = metric_closure(&gp, &[1, 3]).unwrap();
        let sel = EdgeSet::from_ids(cp.graph(), [0]).unwrap();
        let e = expand_paths(&cp, &sel, &gp).unwrap();
        assert_eq!(e.iter().collect::<Vec<_>>(), vec![0, 1]);

        let mut bogus = EdgeSet::new();
        bogus.insert(7, &wint(1));
        assert!(expand_paths(&cp, &bogus, &gp).is_err());
    }

    #[test]
    fn diameters_of_fixtures() {
        assert_eq!(diameter(&path3()).unwrap(), wint(2));
        assert_eq!(diameter(&cycle4()).unwrap(), wint(2));
        assert_eq!(diameter(&tri()).unwrap(), wint(2));
    }

    #[test]
    fn fractional_weights_stay_exact() {
        let g = Graph::parse("1 2 0.1\n2 3 0.2\n1 3 0.4").unwrap();
        let t = apsp(&g).unwrap();
        assert_eq!(t.dist_ids(&g, 1, 3).unwrap(), wfrac(3, 10));
    }
}
