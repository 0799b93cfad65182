//! Exact minimum-weight pairwise spanners at desk scale.
//!
//! The in-process solver explores edge subsets by branch and bound, checking
//! feasibility combinatorially (shortest paths on the candidate subgraph)
//! rather than through an LP relaxation, which keeps it valid for arbitrary
//! distortion functions. Models can also be exported in CPLEX-LP text form
//! for external solvers.

mod model;
mod lp_export;

pub use lp_export::{export_lp, lp_string};
pub use model::{build_ilp, ConstraintSense, IlpConstraint, IlpModel};

use crate::distortion::{DistortionError, DistortionFn};
use crate::graph::{EdgeSet, Graph, GraphError, VertexId};
use crate::multilevel::{LevelCostFn, MultiLevelError, MultiLevelSolution, TerminalHierarchy};
use crate::shortest::apsp;
use crate::weight::Weight;
use num_traits::Zero;

pub const SOLVE_EXACT_MAX_EDGES: usize = 24;
pub const MULTILEVEL_ASSIGNMENT_GUARD: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Distortion(#[from] DistortionError),
    #[error(transparent)]
    MultiLevel(#[from] MultiLevelError),
    #[error("the pair set is empty")]
    EmptyPairs,
    #[error("pair ({0}, {0}) is degenerate")]
    DegeneratePair(VertexId),
    #[error("instance has {edges} edges, above the exact-solver guard of {max} (export the LP instead)")]
    GuardExceeded { edges: usize, max: usize },
    #[error("grade-assignment search space {assignments} exceeds the guard {guard}")]
    MultilevelGuardExceeded { assignments: u128, guard: u128 },
}

/// Unordered vertex pairs, stored over dense indices with u < v in the
/// ascending-identifier vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    pairs: Vec<(usize, usize)>,
}

impl PairSet {
    pub fn from_ids(g: &Graph, raw: &[(VertexId, VertexId)]) -> Result<Self, OracleError> {
        let mut pairs = Vec::with_capacity(raw.len());
        for &(a, b) in raw {
            if a == b {
                return Err(OracleError::DegeneratePair(a));
            }
            let (da, db) = (g.dense_of(a)?, g.dense_of(b)?);
            pairs.push((da.min(db), da.max(db)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(PairSet { pairs })
    }

    pub fn all_pairs(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        for u in 0..n {
            for v in (u + 1)..n {
                pairs.push((u, v));
            }
        }
        PairSet { pairs }
    }

    /// All pairs within a terminal set.
    pub fn over_terminals(g: &Graph, terminals: &[VertexId]) -> Result<Self, OracleError> {
        let mut raw = Vec::new();
        for i in 0..terminals.len() {
            for j in (i + 1)..terminals.len() {
                if terminals[i] != terminals[j] {
                    raw.push((terminals[i], terminals[j]));
                }
            }
        }
        Self::from_ids(g, &raw)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (usize, usize)> {
        self.pairs.iter()
    }
}

/// Distance from `source` within the edges enabled in `mask`, stopping early
/// once every requested target is settled. Returns None entries for
/// unreachable vertices.
fn masked_dists(g: &Graph, mask: u32, source: usize) -> Vec<Option<Weight>> {
    use std::cmp::Reverse;
    let mut dist: Vec<Option<Weight>> = vec![None; g.vertex_count()];
    let mut heap = std::collections::BinaryHeap::new();
    dist[source] = Some(Weight::zero());
    heap.push(Reverse((Weight::zero(), source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if dist[x].as_ref() != Some(&d) {
            continue;
        }
        for &(y, eid) in g.neighbors(x) {
            if mask & (1 << eid) == 0 {
                continue;
            }
            let cand = d + g.edge_weight(eid);
            match &dist[y] {
                Some(cur) if *cur <= cand => {}
                _ => {
                    dist[y] = Some(cand);
                    heap.push(Reverse((cand, y)));
                }
            }
        }
    }
    dist
}

/// Checks every pair budget within the masked subgraph.
fn mask_feasible(g: &Graph, mask: u32, by_source: &[(usize, Vec<(usize, Weight)>)]) -> bool {
    for (source, targets) in by_source {
        let dist = masked_dists(g, mask, *source);
        for (target, budget) in targets {
            match &dist[*target] {
                Some(d) if d <= budget => {}
                _ => return false,
            }
        }
    }
    true
}

fn group_budgets(pairs: &[(usize, usize, Weight)]) -> Vec<(usize, Vec<(usize, Weight)>)> {
    let mut map: std::collections::BTreeMap<usize, Vec<(usize, Weight)>> = Default::default();
    for (u, v, b) in pairs {
        map.entry(*u).or_default().push((*v, *b));
    }
    map.into_iter().collect()
}

/// Compares two edge-id sets (as bitmasks) by their ascending id lists.
fn lex_smaller(a: u32, b: u32) -> bool {
    let mut ia = a;
    let mut ib = b;
    while ia != 0 && ib != 0 {
        let la = ia.trailing_zeros();
        let lb = ib.trailing_zeros();
        if la != lb {
            return la < lb;
        }
        ia &= ia - 1;
        ib &= ib - 1;
    }
    // Prefix of the other: the shorter list compares smaller.
    ia == 0 && ib != 0
}

struct ExactSearch<'a> {
    g: &'a Graph,
    order: Vec<usize>,
    by_source: Vec<(usize, Vec<(usize, Weight)>)>,
    best_mask: u32,
    best_weight: Weight,
}

impl ExactSearch<'_> {
    fn offer(&mut self, mask: u32) {
        let weight: Weight =
            (0..self.g.edge_count()).filter(|e| mask & (1 << e) != 0).map(|e| *self.g.edge_weight(e)).sum();
        if weight < self.best_weight
            || (weight == self.best_weight && lex_smaller(mask, self.best_mask))
        {
            self.best_weight = weight;
            self.best_mask = mask;
        }
    }

    /// DFS over the edges in `order[depth..]`; `excluded` holds decided-out
    /// edges, `included_weight` the total of decided-in ones.
    fn dfs(&mut self, depth: usize, excluded: u32, included_weight: &Weight) {
        if *included_weight > self.best_weight {
            return;
        }
        // Everything undecided stays in: the optimistic candidate.
        let full = (1u32 << self.g.edge_count()) - 1;
        let optimistic = full & !excluded;
        if !mask_feasible(self.g, optimistic, &self.by_source) {
            return;
        }
        self.offer(optimistic);
        if depth == self.order.len() {
            return;
        }
        let eid = self.order[depth];
        let bit = 1u32 << eid;
        self.dfs(depth + 1, excluded | bit, included_weight);
        let w = *included_weight + self.g.edge_weight(eid);
        if w <= self.best_weight {
            self.dfs(depth + 1, excluded, &w);
        }
    }
}

/// Minimum-weight edge set such that every pair satisfies its distortion
/// budget. Exact: equals exhaustive enumeration over all edge subsets, with
/// ties broken toward the lexicographically smallest sorted edge-id list.
pub fn solve_exact(g: &Graph, pairs: &PairSet, f: &DistortionFn) -> Result<EdgeSet, OracleError> {
    if pairs.is_empty() {
        return Err(OracleError::EmptyPairs);
    }
    g.ensure_connected()?;
    if g.edge_count() > SOLVE_EXACT_MAX_EDGES {
        return Err(OracleError::GuardExceeded {
            edges: g.edge_count(),
            max: SOLVE_EXACT_MAX_EDGES,
        });
    }
    let table = apsp(g)?;
    let mut budgets = Vec::with_capacity(pairs.len());
    for &(u, v) in pairs.iter() {
        budgets.push((u, v, f.eval(table.dist(u, v))?));
    }
    let by_source = group_budgets(&budgets);
    let full = (1u32 << g.edge_count()) - 1;
    debug_assert!(
        mask_feasible(g, full, &by_source),
        "f(x) >= x makes the full graph feasible"
    );

    // Order decisions by descending weight so heavy edges are settled first.
    let mut order: Vec<usize> = g.edge_ids().collect();
    order.sort_by(|&a, &b| g.edge_weight(b).cmp(g.edge_weight(a)).then(a.cmp(&b)));

    let mut search = ExactSearch {
        g,
        order,
        by_source,
        best_mask: full,
        best_weight: g.total_weight(),
    };
    search.dfs(0, 0, &Weight::zero());
    let ids: Vec<usize> = (0..g.edge_count()).filter(|e| search.best_mask & (1 << e) != 0).collect();
    Ok(EdgeSet::from_ids(g, ids)?)
}

/// Exhaustive reference: scans every edge subset. Test oracle for
/// `solve_exact`; same tie-break.
pub fn solve_exact_bruteforce(
    g: &Graph,
    pairs: &PairSet,
    f: &DistortionFn,
) -> Result<EdgeSet, OracleError> {
    if pairs.is_empty() {
        return Err(OracleError::EmptyPairs);
    }
    g.ensure_connected()?;
    let table = apsp(g)?;
    let mut budgets = Vec::with_capacity(pairs.len());
    for &(u, v) in pairs.iter() {
        budgets.push((u, v, f.eval(table.dist(u, v))?));
    }
    let by_source = group_budgets(&budgets);
    let m = g.edge_count();
    let mut best: Option<(Weight, u32)> = None;
    for mask in 0..(1u32 << m) {
        if !mask_feasible(g, mask, &by_source) {
            continue;
        }
        let weight: Weight =
            (0..m).filter(|e| mask & (1 << e) != 0).map(|e| *g.edge_weight(e)).sum();
        let better = match &best {
            None => true,
            Some((bw, bm)) => weight < *bw || (weight == *bw && lex_smaller(mask, *bm)),
        };
        if better {
            best = Some((weight, mask));
        }
    }
    let (_, mask) = best.expect("full graph is feasible");
    let ids: Vec<usize> = (0..m).filter(|e| mask & (1 << e) != 0).collect();
    Ok(EdgeSet::from_ids(g, ids)?)
}

/// Per-level pair budgets for the multilevel search.
struct LevelBudgets {
    by_source: Vec<(usize, Vec<(usize, Weight)>)>,
}

struct MultilevelSearch<'a> {
    g: &'a Graph,
    ell: usize,
    order: Vec<usize>,
    levels: Vec<LevelBudgets>,
    level_costs: Vec<Weight>,
    best_cost: Weight,
    best_grades: Vec<usize>,
    grades: Vec<usize>,
}

impl MultilevelSearch<'_> {
    /// decided_ge[i-1] = edges already assigned grade >= i.
    fn dfs(
        &mut self,
        depth: usize,
        decided_ge: &mut Vec<u32>,
        undecided: u32,
        partial_cost: &Weight,
        suffix_top_cost: &[Weight],
    ) {
        if *partial_cost >= self.best_cost {
            return;
        }
        // Optimistic completion: all undecided edges at the top grade.
        let candidate_cost = *partial_cost + suffix_top_cost[depth];
        if candidate_cost < self.best_cost {
            self.best_cost = candidate_cost;
            let mut grades = self.grades.clone();
            for &eid in &self.order[depth..] {
                grades[eid] = self.ell;
            }
            self.best_grades = grades;
        }
        if depth == self.order.len() {
            return;
        }
        let eid = self.order[depth];
        let bit = 1u32 << eid;
        let w = *self.g.edge_weight(eid);
        for grade in 0..=self.ell {
            let added_cost = if grade == 0 {
                Weight::zero()
            } else {
                self.level_costs[grade - 1] * w
            };
            let cost = *partial_cost + added_cost;
            if cost >= self.best_cost {
                continue;
            }
            for lvl in decided_ge.iter_mut().take(grade) {
                *lvl |= bit;
            }
            // Levels above `grade` lose this edge from their optimistic
            // graph; recheck only those.
            let next_undecided = undecided & !bit;
            let mut ok = true;
            for i in (grade + 1)..=self.ell {
                let allowed = decided_ge[i - 1] | next_undecided;
                if !mask_feasible(self.g, allowed, &self.levels[i - 1].by_source) {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.grades[eid] = grade;
                self.dfs(depth + 1, decided_ge, next_undecided, &cost, suffix_top_cost);
                self.grades[eid] = 0;
            }
            for lvl in decided_ge.iter_mut().take(grade) {
                *lvl &= !bit;
            }
        }
    }
}

/// Brute-force optimum of the multi-level problem for the spanner sparsifier:
/// minimizes Σ_e g(y(e))·w(e) over all grade assignments y: E -> {0..ell}
/// such that for every level i the edges of grade >= i form a subsetwise
/// f-spanner over T_i. The search prunes but provably returns the same
/// assignment cost as plain enumeration.
pub fn solve_exact_multilevel(
    g: &Graph,
    hierarchy: &TerminalHierarchy,
    f: &DistortionFn,
    cost_fn: &LevelCostFn,
) -> Result<MultiLevelSolution, OracleError> {
    solve_exact_multilevel_with_guard(g, hierarchy, f, cost_fn, MULTILEVEL_ASSIGNMENT_GUARD)
}

/// `solve_exact_multilevel` with an explicit bound on the size of the
/// enumerated assignment space (ell+1)^|E|.
pub fn solve_exact_multilevel_with_guard(
    g: &Graph,
    hierarchy: &TerminalHierarchy,
    f: &DistortionFn,
    cost_fn: &LevelCostFn,
    guard: u128,
) -> Result<MultiLevelSolution, OracleError> {
    g.ensure_connected()?;
    hierarchy.validate_vertices(g)?;
    let ell = hierarchy.level_count();
    let assignments = (ell as u128 + 1)
        .checked_pow(g.edge_count() as u32)
        .unwrap_or(u128::MAX);
    if assignments > guard {
        return Err(OracleError::MultilevelGuardExceeded { assignments, guard });
    }
    let table = apsp(g)?;
    let mut levels = Vec::with_capacity(ell);
    for i in 1..=ell {
        let terms = hierarchy.terminals_vec(i);
        let mut budgets = Vec::new();
        for a in 0..terms.len() {
            for b in (a + 1)..terms.len() {
                let (u, v) = (g.dense_of(terms[a])?, g.dense_of(terms[b])?);
                let (u, v) = (u.min(v), u.max(v));
                budgets.push((u, v, f.eval(table.dist(u, v))?));
            }
        }
        levels.push(LevelBudgets { by_source: group_budgets(&budgets) });
    }
    let level_costs: Vec<Weight> = (1..=ell).map(|i| cost_fn.eval(i)).collect();

    let mut order: Vec<usize> = g.edge_ids().collect();
    order.sort_by(|&a, &b| g.edge_weight(b).cmp(g.edge_weight(a)).then(a.cmp(&b)));

    // suffix_top_cost[d] = cost of finishing order[d..] at the top grade.
    let top = level_costs[ell - 1];
    let mut suffix_top_cost = vec![Weight::zero(); order.len() + 1];
    for d in (0..order.len()).rev() {
        suffix_top_cost[d] =
            suffix_top_cost[d + 1] + top * g.edge_weight(order[d]);
    }

    // The all-top-grade assignment is always feasible (f(x) >= x), so seed
    // the incumbent just above it and let the root offer claim it.
    let m = g.edge_count();
    let mut search = MultilevelSearch {
        g,
        ell,
        order,
        levels,
        level_costs,
        best_cost: suffix_top_cost[0] + Weight::from_integer(1),
        best_grades: vec![ell; m],
        grades: vec![0; m],
    };
    let mut decided_ge = vec![0u32; ell];
    let undecided = if m == 0 { 0 } else { (1u32 << m) - 1 };
    search.dfs(0, &mut decided_ge, undecided, &Weight::zero(), &suffix_top_cost);

    Ok(MultiLevelSolution::from_grades(g, &search.best_grades, ell)?)
}

/// Plain mixed-radix enumeration of every grade assignment. Test oracle for
/// the pruned search.
pub fn solve_exact_multilevel_bruteforce(
    g: &Graph,
    hierarchy: &TerminalHierarchy,
    f: &DistortionFn,
    cost_fn: &LevelCostFn,
) -> Result<MultiLevelSolution, OracleError> {
    g.ensure_connected()?;
    let ell = hierarchy.level_count();
    let table = apsp(g)?;
    let mut levels = Vec::with_capacity(ell);
    for i in 1..=ell {
        let terms = hierarchy.terminals_vec(i);
        let mut budgets = Vec::new();
        for a in 0..terms.len() {
            for b in (a + 1)..terms.len() {
                let (u, v) = (g.dense_of(terms[a])?, g.dense_of(terms[b])?);
                let (u, v) = (u.min(v), u.max(v));
                budgets.push((u, v, f.eval(table.dist(u, v))?));
            }
        }
        levels.push(LevelBudgets { by_source: group_budgets(&budgets) });
    }
    let m = g.edge_count();
    let mut grades = vec![0usize; m];
    let mut best: Option<(Weight, Vec<usize>)> = None;
    loop {
        let mut feasible = true;
        for i in 1..=ell {
            let mut mask = 0u32;
            for (eid, &y) in grades.iter().enumerate() {
                if y >= i {
                    mask |= 1 << eid;
                }
            }
            if !mask_feasible(g, mask, &levels[i - 1].by_source) {
                feasible = false;
                break;
            }
        }
        if feasible {
            let cost: Weight = grades
                .iter()
                .enumerate()
                .filter(|(_, &y)| y > 0)
                .map(|(eid, &y)| cost_fn.eval(y) * g.edge_weight(eid))
                .sum();
            if best.as_ref().is_none_or(|(bc, _)| cost < *bc) {
                best = Some((cost, grades.clone()));
            }
        }
        // Increment the mixed-radix counter.
        let mut pos = 0;
        loop {
            if pos == m {
                let (_, grades) = best.expect("all-top assignment is feasible");
                return Ok(MultiLevelSolution::from_grades(g, &grades, ell)?);
            }
            if grades[pos] < ell {
                grades[pos] += 1;
                break;
            }
            grades[pos] = 0;
            pos += 1;
        }
    }
}
