//! The rounding algorithm over a quantizer, the merge operator, and the
//! composite strategy that searches over rounding sets.

use crate::distortion::DistortionFn;
use crate::graph::{EdgeSet, Graph, GraphError, VertexId};
use crate::multilevel::{
    best_q, LevelCostFn, MultiLevelError, MultiLevelSolution, Quantizer, TerminalHierarchy,
};
use crate::oracle::{self, OracleError, PairSet};
use crate::spanner::{subsetwise_spanner, SpannerError};
use crate::steiner::{
    forced_mst, prune_nonterminal_leaves, restricted_mst, steiner_2approx, steiner_exact,
    SteinerError,
};
use crate::weight::Weight;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RoundingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    MultiLevel(#[from] MultiLevelError),
    #[error(transparent)]
    Spanner(#[from] SpannerError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Steiner(#[from] SteinerError),
}

/// The admissible sparsifier family: it fixes both the single-level objective
/// and the merge operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SparsifierKind {
    Spanner(DistortionFn),
    SteinerTree,
}

/// A single-level subroutine: produces an admissible sparsifier over any
/// terminal subset.
pub trait SingleLevelSolver {
    fn solve(&self, g: &Graph, terminals: &[VertexId]) -> Result<EdgeSet, RoundingError>;
    fn name(&self) -> &'static str;
}

/// Exact pairwise-spanner oracle over all terminal pairs.
pub struct OracleSolver {
    pub distortion: DistortionFn,
}

impl SingleLevelSolver for OracleSolver {
    fn solve(&self, g: &Graph, terminals: &[VertexId]) -> Result<EdgeSet, RoundingError> {
        if terminals.len() <= 1 {
            return Ok(EdgeSet::new());
        }
        let pairs = PairSet::over_terminals(g, terminals)?;
        Ok(oracle::solve_exact(g, &pairs, &self.distortion)?)
    }

    fn name(&self) -> &'static str {
        "oracle"
    }
}

/// Metric-closure subsetwise spanner subroutine.
pub struct MetricClosureSolver {
    pub distortion: DistortionFn,
}

impl SingleLevelSolver for MetricClosureSolver {
    fn solve(&self, g: &Graph, terminals: &[VertexId]) -> Result<EdgeSet, RoundingError> {
        Ok(subsetwise_spanner(g, terminals, &self.distortion)?.edges)
    }

    fn name(&self) -> &'static str {
        "metric-closure"
    }
}

/// Steiner 2-approximation subroutine.
pub struct SteinerApproxSolver;

impl SingleLevelSolver for SteinerApproxSolver {
    fn solve(&self, g: &Graph, terminals: &[VertexId]) -> Result<EdgeSet, RoundingError> {
        Ok(steiner_2approx(g, terminals)?)
    }

    fn name(&self) -> &'static str {
        "steiner-2approx"
    }
}

/// Exact Steiner tree subroutine (guard-sized instances only).
pub struct SteinerExactSolver;

impl SingleLevelSolver for SteinerExactSolver {
    fn solve(&self, g: &Graph, terminals: &[VertexId]) -> Result<EdgeSet, RoundingError> {
        Ok(steiner_exact(g, terminals)?)
    }

    fn name(&self) -> &'static str {
        "steiner-exact"
    }
}

/// Merge operator ⊕. Spanners merge by union. Steiner merges take the union,
/// re-tree it when it acquired a cycle, and prune non-terminal leaves.
pub fn merge(
    kind: &SparsifierKind,
    s1: &EdgeSet,
    s2: &EdgeSet,
    terminals: &[VertexId],
    g: &Graph,
) -> EdgeSet {
    let union = s1.union(s2, g);
    match kind {
        SparsifierKind::Spanner(_) => union,
        SparsifierKind::SteinerTree => {
            let tree = restricted_mst(g, &union);
            prune_nonterminal_leaves(g, &tree, terminals, &EdgeSet::new())
        }
    }
}

/// Merge that never drops edges of `protected`; keeps nested level sets
/// nested when folding new sparsifiers into lower levels.
fn merge_into(
    kind: &SparsifierKind,
    protected: &EdgeSet,
    addition: &EdgeSet,
    terminals: &[VertexId],
    g: &Graph,
) -> EdgeSet {
    let union = protected.union(addition, g);
    match kind {
        SparsifierKind::Spanner(_) => union,
        SparsifierKind::SteinerTree => {
            let tree = forced_mst(g, &union, protected);
            prune_nonterminal_leaves(g, &tree, terminals, protected)
        }
    }
}

/// Assembles the level sets of the rounding algorithm from sparsifiers
/// computed at the quantizer levels: G_i is the merge of every computed
/// sparsifier above level i together with the one serving it from below.
fn assemble(
    g: &Graph,
    hierarchy: &TerminalHierarchy,
    q: &Quantizer,
    kind: &SparsifierKind,
    solved: &BTreeMap<usize, EdgeSet>,
) -> Result<MultiLevelSolution, RoundingError> {
    let ell = hierarchy.level_count();
    // Fold downward through the quantizer levels.
    let mut acc: BTreeMap<usize, EdgeSet> = BTreeMap::new();
    let mut running: Option<EdgeSet> = None;
    for &j in q.levels().iter().rev() {
        let h_j = &solved[&j];
        let merged = match &running {
            None => h_j.clone(),
            Some(higher) => {
                merge_into(kind, higher, h_j, &hierarchy.terminals_vec(j), g)
            }
        };
        acc.insert(j, merged.clone());
        running = Some(merged);
    }
    let levels: Vec<EdgeSet> =
        (1..=ell).map(|i| acc[&q.serving_level(i)].clone()).collect();
    Ok(MultiLevelSolution::new(g, levels)?)
}

/// Rounding algorithm: solve the single-level problem at the quantizer levels
/// only and merge downward. Output nesting is verified on construction.
pub fn round_mlags(
    g: &Graph,
    hierarchy: &TerminalHierarchy,
    q: &Quantizer,
    kind: &SparsifierKind,
    solver: &dyn SingleLevelSolver,
) -> Result<MultiLevelSolution, RoundingError> {
    assert_eq!(q.level_count(), hierarchy.level_count());
    hierarchy.validate_vertices(g)?;
    let mut solved = BTreeMap::new();
    for &j in q.levels() {
        let h_j = solver.solve(g, &hierarchy.terminals_vec(j))?;
        solved.insert(j, h_j);
    }
    assemble(g, hierarchy, q, kind, &solved)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositeMode {
    /// Try every quantizer containing level 1 and keep the cheapest result.
    Enumerate,
    /// Solve each level once, pick the quantizer minimizing the merge bound
    /// for the measured minima, and run the rounding algorithm on it.
    Measured,
}

pub const ENUMERATE_MAX_LEVELS: usize = 20;

#[derive(Debug, Clone)]
pub struct CompositeOutcome {
    pub solution: MultiLevelSolution,
    pub chosen_q: Quantizer,
    pub cost: Weight,
    /// Weight of the single-level sparsifier computed at each level (1-based).
    pub level_weights: Vec<Weight>,
    /// Cost of the assembled solution per candidate quantizer (enumerate
    /// mode only).
    pub per_q_costs: Vec<(Quantizer, Weight)>,
}

pub fn composite(
    g: &Graph,
    hierarchy: &TerminalHierarchy,
    kind: &SparsifierKind,
    solver: &dyn SingleLevelSolver,
    cost_fn: &LevelCostFn,
    mode: CompositeMode,
) -> Result<CompositeOutcome, RoundingError> {
    hierarchy.validate_vertices(g)?;
    let ell = hierarchy.level_count();
    if mode == CompositeMode::Enumerate && ell > ENUMERATE_MAX_LEVELS {
        return Err(RoundingError::MultiLevel(MultiLevelError::TooManyLevels {
            got: ell,
            max: ENUMERATE_MAX_LEVELS,
        }));
    }
    // One solve per level, shared across every candidate quantizer.
    let mut solved = BTreeMap::new();
    for j in 1..=ell {
        solved.insert(j, solver.solve(g, &hierarchy.terminals_vec(j))?);
    }
    let level_weights: Vec<Weight> = (1..=ell).map(|j| *solved[&j].weight()).collect();

    match mode {
        CompositeMode::Enumerate => {
            let mut per_q_costs = Vec::new();
            let mut best: Option<(Quantizer, MultiLevelSolution, Weight)> = None;
            for q in Quantizer::enumerate_all(ell) {
                let solution = assemble(g, hierarchy, &q, kind, &solved)?;
                let cost = solution.cost(g, cost_fn);
                per_q_costs.push((q.clone(), cost));
                if best.as_ref().is_none_or(|(_, _, c)| cost < *c) {
                    best = Some((q, solution, cost));
                }
            }
            let (chosen_q, solution, cost) = best.expect("at least one quantizer");
            Ok(CompositeOutcome { solution, chosen_q, cost, level_weights, per_q_costs })
        }
        CompositeMode::Measured => {
            let (chosen_q, _) = best_q(&level_weights, cost_fn)?;
            let solution = assemble(g, hierarchy, &chosen_q, kind, &solved)?;
            let cost = solution.cost(g, cost_fn);
            Ok(CompositeOutcome {
                solution,
                chosen_q,
                cost,
                level_weights,
                per_q_costs: Vec::new(),
            })
        }
    }
}
