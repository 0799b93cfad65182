//! Multi-level sparsification: nested terminal sets, level cost scaling,
//! quantizers, the rounding and composite algorithms, and the grade-of-service
//! view of a nested solution.

mod best_q;
mod mc_spanner;
mod quantizer;
mod rounding;

pub use best_q::{best_q, merge_cost_bound};
pub use mc_spanner::{ml_metric_closure_spanner, LevelStretch, MlSpannerOutput};
pub use quantizer::{quantizer_profile, Quantizer, QuantizerProfile};
pub use rounding::{
    composite, merge, round_mlags, CompositeMode, CompositeOutcome, MetricClosureSolver,
    OracleSolver, RoundingError, SingleLevelSolver, SparsifierKind, SteinerApproxSolver,
    SteinerExactSolver, ENUMERATE_MAX_LEVELS,
};

use crate::graph::{EdgeSet, Graph, GraphError, VertexId};
use crate::weight::{format_weight, parse_weight, Weight};
use num_traits::Zero;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MultiLevelError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("terminal sets must be nested: T_{level} is not a subset of T_{}", level - 1)]
    NotNested { level: usize },
    #[error("the top level terminal set is empty")]
    EmptyTopLevel,
    #[error("level count must be at least 1")]
    NoLevels,
    #[error("level cost must be positive and nondecreasing")]
    BadCostFn,
    #[error("quantizer must contain level 1 and stay within 1..=ell")]
    BadQuantizer,
    #[error("terminal file line {line}: {msg}")]
    TerminalParse { line: usize, msg: String },
    #[error("solution line {line}: {msg}")]
    SolutionParse { line: usize, msg: String },
    #[error("negative entry in the level-minimum vector")]
    NegativeMin,
    #[error("enumerate mode supports at most {max} levels, got {got}")]
    TooManyLevels { got: usize, max: usize },
}

/// Nested terminal sets T_1 ⊇ T_2 ⊇ … ⊇ T_ell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalHierarchy {
    levels: Vec<BTreeSet<VertexId>>,
}

impl TerminalHierarchy {
    pub fn new(levels: Vec<BTreeSet<VertexId>>) -> Result<Self, MultiLevelError> {
        if levels.is_empty() {
            return Err(MultiLevelError::NoLevels);
        }
        for i in 1..levels.len() {
            if !levels[i].is_subset(&levels[i - 1]) {
                return Err(MultiLevelError::NotNested { level: i + 1 });
            }
        }
        if levels.last().unwrap().is_empty() {
            return Err(MultiLevelError::EmptyTopLevel);
        }
        Ok(TerminalHierarchy { levels })
    }

    pub fn validate_vertices(&self, g: &Graph) -> Result<(), GraphError> {
        for set in &self.levels {
            for &v in set {
                g.dense_of(v)?;
            }
        }
        Ok(())
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Terminals on level `i` (1-based).
    pub fn terminals(&self, i: usize) -> &BTreeSet<VertexId> {
        &self.levels[i - 1]
    }

    pub fn terminals_vec(&self, i: usize) -> Vec<VertexId> {
        self.levels[i - 1].iter().copied().collect()
    }

    /// Parses the terminal file format: one `v level` pair per line, where
    /// `level` is the highest level at which `v` is a terminal.
    pub fn parse(text: &str, level_count: Option<usize>) -> Result<Self, MultiLevelError> {
        let mut assignments: Vec<(VertexId, usize)> = Vec::new();
        let mut max_level = 0usize;
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
            let (v, lvl) = match (it.next(), it.next(), it.next()) {
                (Some(v), Some(l), None) => (v, l),
                _ => {
                    return Err(MultiLevelError::TerminalParse {
                        line: lineno,
                        msg: "expected `v level`".into(),
                    })
                }
            };
            let v: VertexId = v.parse().map_err(|_| MultiLevelError::TerminalParse {
                line: lineno,
                msg: format!("invalid vertex `{v}`"),
            })?;
            let lvl: usize = lvl.parse().map_err(|_| MultiLevelError::TerminalParse {
                line: lineno,
                msg: format!("invalid level `{lvl}`"),
            })?;
            if lvl == 0 {
                return Err(MultiLevelError::TerminalParse {
                    line: lineno,
                    msg: "levels are 1-based".into(),
                });
            }
            max_level = max_level.max(lvl);
            assignments.push((v, lvl));
        }
        let ell = level_count.unwrap_or(max_level);
        if ell == 0 {
            return Err(MultiLevelError::NoLevels);
        }
        let mut levels = vec![BTreeSet::new(); ell];
        for (v, lvl) in assignments {
            for set in levels.iter_mut().take(lvl.min(ell)) {
                set.insert(v);
            }
        }
        TerminalHierarchy::new(levels)
    }

    pub fn to_text(&self) -> String {
        // Highest level per terminal.
        let mut out = String::new();
        for &v in &self.levels[0] {
            let top = (1..=self.level_count()).rev().find(|&i| self.levels[i - 1].contains(&v));
            out.push_str(&format!("{v} {}\n", top.unwrap()));
        }
        out
    }
}

/// Level cost scaling g: {1..ell} -> positive reals, nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelCostFn {
    /// g(i) = i
    Linear,
    /// g(i) = c
    Constant(Weight),
    /// explicit values for g(1), …, g(ell)
    Table(Vec<Weight>),
}

impl LevelCostFn {
    pub fn constant(c: Weight) -> Result<Self, MultiLevelError> {
        if c <= Weight::zero() {
            return Err(MultiLevelError::BadCostFn);
        }
        Ok(LevelCostFn::Constant(c))
    }

    pub fn table(values: Vec<Weight>) -> Result<Self, MultiLevelError> {
        if values.is_empty() || values[0] <= Weight::zero() {
            return Err(MultiLevelError::BadCostFn);
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(MultiLevelError::BadCostFn);
        }
        Ok(LevelCostFn::Table(values))
    }

    pub fn eval(&self, i: usize) -> Weight {
        debug_assert!(i >= 1);
        match self {
            LevelCostFn::Linear => Weight::from_integer(i as i128),
            LevelCostFn::Constant(c) => *c,
            LevelCostFn::Table(v) => v[(i - 1).min(v.len() - 1)],
        }
    }

    pub fn parse(spec: &str) -> Result<Self, MultiLevelError> {
        let spec = spec.trim();
        if spec == "linear" {
            return Ok(LevelCostFn::Linear);
        }
        if let Some(rest) = spec.strip_prefix("constant:") {
            let c = parse_weight(rest).map_err(|_| MultiLevelError::BadCostFn)?;
            return Self::constant(c);
        }
        if let Some(rest) = spec.strip_prefix("table:") {
            let values: Result<Vec<_>, _> = rest.split(',').map(parse_weight).collect();
            return Self::table(values.map_err(|_| MultiLevelError::BadCostFn)?);
        }
        Err(MultiLevelError::BadCostFn)
    }
}

impl std::fmt::Display for LevelCostFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LevelCostFn::Linear => write!(f, "linear"),
            LevelCostFn::Constant(c) => write!(f, "constant:{}", format_weight(c)),
            LevelCostFn::Table(v) => {
                let parts: Vec<String> = v.iter().map(format_weight).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

/// A nested multi-level solution E_1 ⊇ E_2 ⊇ … ⊇ E_ell, equivalently a grade
/// map y(e) = max{i : e ∈ E_i}.
///
/// The cost of a solution charges each edge once at its grade:
/// COST = Σ_e g(y(e))·w(e), which equals the level-wise telescoping sum
/// Σ_i (g(i) − g(i−1))·W(E_i) with g(0) = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiLevelSolution {
    levels: Vec<EdgeSet>,
}

impl MultiLevelSolution {
    pub fn new(graph: &Graph, levels: Vec<EdgeSet>) -> Result<Self, MultiLevelError> {
        if levels.is_empty() {
            return Err(MultiLevelError::NoLevels);
        }
        for i in 1..levels.len() {
            if !levels[i].is_subset(&levels[i - 1]) {
                return Err(MultiLevelError::NotNested { level: i + 1 });
            }
        }
        for set in &levels {
            for id in set.iter() {
                if id >= graph.edge_count() {
                    return Err(MultiLevelError::Graph(GraphError::UnknownEdge(id)));
                }
            }
        }
        Ok(MultiLevelSolution { levels })
    }

    pub fn from_grades(graph: &Graph, grades: &[usize], ell: usize) -> Result<Self, MultiLevelError> {
        debug_assert_eq!(grades.len(), graph.edge_count());
        let mut levels = vec![EdgeSet::new(); ell];
        for (eid, &y) in grades.iter().enumerate() {
            for set in levels.iter_mut().take(y.min(ell)) {
                set.insert(eid, graph.edge_weight(eid));
            }
        }
        Self::new(graph, levels)
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Edge set on level `i` (1-based).
    pub fn level(&self, i: usize) -> &EdgeSet {
        &self.levels[i - 1]
    }

    pub fn levels(&self) -> &[EdgeSet] {
        &self.levels
    }

    /// Grade of service per edge: y(e) = max level containing e, 0 if absent.
    pub fn grades(&self, graph: &Graph) -> Vec<usize> {
        let mut y = vec![0usize; graph.edge_count()];
        for (i, set) in self.levels.iter().enumerate() {
            for id in set.iter() {
                y[id] = i + 1;
            }
        }
        y
    }

    /// Grade-sum cost: Σ_e g(y(e))·w(e).
    pub fn cost(&self, graph: &Graph, g: &LevelCostFn) -> Weight {
        let mut total = Weight::zero();
        for (eid, y) in self.grades(graph).iter().enumerate() {
            if *y > 0 {
                total += g.eval(*y) * graph.edge_weight(eid);
            }
        }
        total
    }

    /// Level-sum cost: Σ_i (g(i) − g(i−1))·W(E_i). Agrees with `cost` exactly.
    pub fn cost_levelwise(&self, g: &LevelCostFn) -> Weight {
        let mut total = Weight::zero();
        let mut prev = Weight::zero();
        for (i, set) in self.levels.iter().enumerate() {
            let gi = g.eval(i + 1);
            total += (gi - prev) * set.weight();
            prev = gi;
        }
        total
    }

    /// Rebuilds a solution from a grade map; inverse of `grades`.
    pub fn from_grade_map(
        graph: &Graph,
        grades: &[usize],
        ell: usize,
    ) -> Result<Self, MultiLevelError> {
        Self::from_grades(graph, grades, ell)
    }

    /// Text serialization: one `u v y(e)` line per graded edge, edge id order.
    pub fn to_text(&self, graph: &Graph) -> String {
        let mut out = String::new();
        for (eid, y) in self.grades(graph).iter().enumerate() {
            if *y > 0 {
                let (a, b) = graph.edge_endpoints(eid);
                out.push_str(&format!("{a} {b} {y}\n"));
            }
        }
        out
    }

    pub fn parse(text: &str, graph: &Graph, ell: usize) -> Result<Self, MultiLevelError> {
        let mut grades = vec![0usize; graph.edge_count()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = lineno + 1;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(MultiLevelError::SolutionParse {
                    line: lineno,
                    msg: "expected `u v grade`".into(),
                });
            }
            let bad = |msg: String| MultiLevelError::SolutionParse { line: lineno, msg };
            let a: VertexId = parts[0].parse().map_err(|_| bad("invalid vertex".into()))?;
            let b: VertexId = parts[1].parse().map_err(|_| bad("invalid vertex".into()))?;
            let y: usize = parts[2].parse().map_err(|_| bad("invalid grade".into()))?;
            let (da, db) = (graph.dense_of(a)?, graph.dense_of(b)?);
            let eid = graph
                .neighbors(da)
                .iter()
                .find(|&&(n, _)| n == db)
                .map(|&(_, e)| e)
                .ok_or_else(|| bad(format!("no edge ({a}, {b}) in the graph")))?;
            grades[eid] = y;
        }
        Self::from_grades(graph, &grades, ell)
    }
}
