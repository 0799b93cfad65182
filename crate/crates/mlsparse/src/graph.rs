//! Weighted undirected graphs with stable vertex identifiers.
//!
//! Vertices are arbitrary integer identifiers; internally they are mapped to
//! dense indices in ascending identifier order, which is also the total vertex
//! order used by the oracle. Edges are numbered in insertion order and those
//! identifiers drive every tie-break in the crate.

use crate::weight::{format_weight, parse_weight, to_f64, Weight};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: parse error: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: weight must be positive")]
    NonpositiveWeight { line: usize },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: VertexId, v: VertexId },
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("terminal set is empty")]
    EmptyTerminals,
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    /// Dense endpoint indices with `u < v`.
    pub u: usize,
    pub v: usize,
}

/// Immutable weighted undirected graph.
#[derive(Debug, Clone)]
pub struct Graph {
    ids: Vec<VertexId>,
    index: BTreeMap<VertexId, usize>,
    edges: Vec<Edge>,
    weights: Vec<Weight>,
    /// adjacency: vertex -> sorted list of (neighbor, edge id)
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Self {
        let mut ids: Vec<VertexId> = vertices.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        let index = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj = vec![Vec::new(); ids.len()];
        Graph { ids, index, edges: Vec::new(), weights: Vec::new(), adj }
    }

    /// Adds an edge between external identifiers. The edge id is the number of
    /// edges added before it.
    pub fn add_edge(&mut self, a: VertexId, b: VertexId, w: Weight) -> Result<usize, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if w <= Weight::zero() {
            return Err(GraphError::NonpositiveWeight { line: 0 });
        }
        let ia = *self.index.get(&a).ok_or(GraphError::UnknownVertex(a))?;
        let ib = *self.index.get(&b).ok_or(GraphError::UnknownVertex(b))?;
        let (u, v) = if ia < ib { (ia, ib) } else { (ib, ia) };
        if self.adj[u].iter().any(|&(n, _)| n == v) {
            return Err(GraphError::DuplicateEdge { u: a.min(b), v: a.max(b) });
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v });
        self.weights.push(w);
        self.adj[u].push((v, id));
        self.adj[v].push((u, id));
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn id_of(&self, dense: usize) -> VertexId {
        self.ids[dense]
    }

    pub fn dense_of(&self, id: VertexId) -> Result<usize, GraphError> {
        self.index.get(&id).copied().ok_or(GraphError::UnknownVertex(id))
    }

    pub fn contains_vertex(&self, id: VertexId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn edge_weight(&self, id: usize) -> &Weight {
        &self.weights[id]
    }

    /// External endpoint identifiers of an edge, smaller one first.
    pub fn edge_endpoints(&self, id: usize) -> (VertexId, VertexId) {
        let e = self.edges[id];
        (self.ids[e.u], self.ids[e.v])
    }

    pub fn neighbors(&self, dense: usize) -> &[(usize, usize)] {
        &self.adj[dense]
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = usize> {
        0..self.edges.len()
    }

    pub fn total_weight(&self) -> Weight {
        self.weights.iter().sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.ids.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.ids.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.ids.len()
    }

    pub fn ensure_connected(&self) -> Result<(), GraphError> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(GraphError::Disconnected)
        }
    }

    /// Parses the edge-list format: one `u v w` triple per line, `#` starts a
    /// comment, blank lines are ignored. Duplicate pairs are an error;
    /// connectivity is not required here (solver entry points check it).
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        struct Raw {
            line: usize,
            a: VertexId,
            b: VertexId,
            w: Weight,
        }
        let mut raw = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let mut it = line.split_whitespace();
            let (a, b, w) = match (it.next(), it.next(), it.next(), it.next()) {
                (Some(a), Some(b), Some(w), None) => (a, b, w),
                _ => {
                    return Err(GraphError::Parse {
                        line: lineno,
                        msg: "expected `u v w`".into(),
                    })
                }
            };
            let a: VertexId = a.parse().map_err(|_| GraphError::Parse {
                line: lineno,
                msg: format!("invalid vertex `{a}`"),
            })?;
            let b: VertexId = b.parse().map_err(|_| GraphError::Parse {
                line: lineno,
                msg: format!("invalid vertex `{b}`"),
            })?;
            let w = parse_weight(w).map_err(|e| GraphError::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if w <= Weight::zero() {
                return Err(GraphError::NonpositiveWeight { line: lineno });
            }
            raw.push(Raw { line: lineno, a, b, w });
        }
        let mut g = Graph::new(raw.iter().flat_map(|r| [r.a, r.b]));
        for r in &raw {
            g.add_edge(r.a, r.b, r.w).map_err(|e| match e {
                GraphError::DuplicateEdge { u, v } => GraphError::DuplicateEdge { u, v },
                GraphError::NonpositiveWeight { .. } => {
                    GraphError::NonpositiveWeight { line: r.line }
                }
                other => other,
            })?;
        }
        Ok(g)
    }

    /// Serializes in the same edge-list format, edges in identifier order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for id in self.edge_ids() {
            let (a, b) = self.edge_endpoints(id);
            out.push_str(&format!("{a} {b} {}\n", format_weight(self.edge_weight(id))));
        }
        out
    }

    /// Minimum spanning tree by Kruskal, ties broken by edge identifier.
    pub fn mst(&self) -> Result<EdgeSet, GraphError> {
        self.ensure_connected()?;
        let mut order: Vec<usize> = self.edge_ids().collect();
        order.sort_by(|&a, &b| self.weights[a].cmp(&self.weights[b]).then(a.cmp(&b)));
        let mut dsu = Dsu::new(self.vertex_count());
        let mut set = EdgeSet::new();
        for id in order {
            let e = self.edges[id];
            if dsu.union(e.u, e.v) {
                set.insert(id, self.edge_weight(id));
            }
        }
        Ok(set)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.vertex_count(), self.edge_count())
    }
}

/// Set of edge identifiers of a parent graph with a cached total weight.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSet {
    ids: std::collections::BTreeSet<usize>,
    weight: Weight,
}

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet { ids: Default::default(), weight: Weight::zero() }
    }

    pub fn from_ids(graph: &Graph, ids: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let mut set = EdgeSet::new();
        for id in ids {
            if id >= graph.edge_count() {
                return Err(GraphError::UnknownEdge(id));
            }
            set.insert(id, graph.edge_weight(id));
        }
        Ok(set)
    }

    pub fn insert(&mut self, id: usize, w: &Weight) -> bool {
        if self.ids.insert(id) {
            self.weight += w;
            true
        } else {
            false
        }
    }

    pub fn remove(&mut self, id: usize, w: &Weight) -> bool {
        if self.ids.remove(&id) {
            self.weight -= w;
            true
        } else {
            false
        }
    }

    pub fn contains(&self, id: usize) -> bool {
        self.ids.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Total weight of the member edges.
    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.ids.iter().copied()
    }

    pub fn union(&self, other: &EdgeSet, graph: &Graph) -> EdgeSet {
        let mut out = self.clone();
        for id in other.iter() {
            out.insert(id, graph.edge_weight(id));
        }
        out
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.ids.is_subset(&other.ids)
    }

    pub fn weight_f64(&self) -> f64 {
        to_f64(&self.weight)
    }
}

impl FromIterator<(usize, Weight)> for EdgeSet {
    fn from_iter<T: IntoIterator<Item = (usize, Weight)>>(iter: T) -> Self {
        let mut set = EdgeSet::new();
        for (id, w) in iter {
            set.insert(id, &w);
        }
        set
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            false
        } else {
            self.parent[ra.max(rb)] = ra.min(rb);
            true
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::weight::wint;

    /// Path on {1,2,3}, both weights 1.
    pub fn path3() -> Graph {
        Graph::parse("1 2 1\n2 3 1").unwrap()
    }

    /// Star with center 0 and leaves 1,2,3, unit weights.
    pub fn star4() -> Graph {
        Graph::parse("0 1 1\n0 2 1\n0 3 1").unwrap()
    }

    /// Triangle a=0, b=1, c=2 with w(ab)=1, w(bc)=1, w(ac)=3.
    pub fn tri() -> Graph {
        Graph::parse("0 1 1\n1 2 1\n0 2 3").unwrap()
    }

    /// 4-cycle 1-2-3-4-1 with unit weights.
    pub fn cycle4() -> Graph {
        let mut g = Graph::new([1, 2, 3, 4]);
        g.add_edge(1, 2, wint(1)).unwrap();
        g.add_edge(2, 3, wint(1)).unwrap();
        g.add_edge(3, 4, wint(1)).unwrap();
        g.add_edge(4, 1, wint(1)).unwrap();
        g
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::weight::wint;

    #[test]
    fn parses_path3_and_star4() {
        let g = path3();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_endpoints(0), (1, 2));
        assert_eq!(g.edge_endpoints(1), (2, 3));
        let s = star4();
        assert_eq!(s.vertex_count(), 4);
        assert_eq!(s.edge_count(), 3);
        assert_eq!(s.dense_of(0).unwrap(), 0);
    }

    #[test]
    fn duplicate_edge_is_an_error() {
        let err = Graph::parse("1 2 1\n1 2 2").unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge { u: 1, v: 2 });
        // Also when given in the opposite order.
        let err = Graph::parse("1 2 1\n2 1 2").unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge { u: 1, v: 2 });
    }

    #[test]
    fn parse_rejects_bad_lines() {
        assert!(matches!(Graph::parse("1 2"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(Graph::parse("1 2 x"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(
            Graph::parse("1 2 1\n2 3 0"),
            Err(GraphError::NonpositiveWeight { line: 2 })
        ));
        assert!(matches!(Graph::parse("1 1 1"), Err(GraphError::SelfLoop(1))));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let g = Graph::parse("# a comment\n\n1 2 1 # trailing\n2 3 1\n").unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn disconnected_is_warned_not_rejected_at_parse() {
        let g = Graph::parse("1 2 1\n3 4 1").unwrap();
        assert!(!g.is_connected());
        assert_eq!(g.ensure_connected(), Err(GraphError::Disconnected));
    }

    #[test]
    fn mst_of_a_tree_is_the_tree() {
        let g = path3();
        let t = g.mst().unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.weight(), &wint(2));
    }

    #[test]
    fn mst_of_cycle4_drops_highest_identifier_edge() {
        let g = cycle4();
        let t = g.mst().unwrap();
        assert_eq!(t.weight(), &wint(3));
        let ids: Vec<usize> = t.iter().collect();
        assert_eq!(ids, vec![0, 1, 2]);
    }

    #[test]
    fn edge_set_weight_tracks_members() {
        let g = cycle4();
        let mut s = EdgeSet::new();
        assert!(s.insert(0, g.edge_weight(0)));
        assert!(!s.insert(0, g.edge_weight(0)));
        assert!(s.insert(3, g.edge_weight(3)));
        assert_eq!(s.weight(), &wint(2));
        assert!(s.remove(0, g.edge_weight(0)));
        assert_eq!(s.weight(), &wint(1));
        assert!(EdgeSet::from_ids(&g, [9]).is_err());
    }

    #[test]
    fn edge_list_round_trips() {
        let g = tri();
        let text = g.to_edge_list();
        let h = Graph::parse(&text).unwrap();
        assert_eq!(h.to_edge_list(), text);
    }
}
