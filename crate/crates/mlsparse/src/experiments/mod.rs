//! Experiment harness: seeded instance grids, bottom-up / top-down /
//! composite runs under the oracle and metric-closure subroutines, ratio
//! computation against the exact multi-level optimum, and CSV/SVG reporting.

mod gen;
mod plot;

pub use gen::{gen_er, gen_er_with, sample_terminals, DEFAULT_GEN_ATTEMPTS};
pub use plot::{parse_csv, plot_svg, quartiles, GroupBy, PlotKind};

use crate::distortion::DistortionFn;
use crate::graph::GraphError;
use crate::multilevel::{
    composite, CompositeMode, LevelCostFn, MetricClosureSolver, MultiLevelError, OracleSolver,
    Quantizer, RoundingError, SingleLevelSolver, SparsifierKind,
};
use crate::oracle::{solve_exact_multilevel_with_guard, OracleError};
use crate::util::derive_seed;
use crate::weight::{format_weight, to_f64, Weight};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExperimentError {
    #[error("bad experiment configuration: {0}")]
    BadConfig(String),
    #[error("could not generate an admissible instance for n={n}, seed={seed} within {attempts} attempts")]
    GenerationFailed { n: u32, seed: u64, attempts: usize },
    #[error("terminal sizes too small: n={n} with ell={ell} leaves fewer than 2 top-level terminals")]
    TerminalsTooSmall { n: usize, ell: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    MultiLevel(#[from] MultiLevelError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },
    #[error("no data to plot")]
    EmptyPlot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Subroutine {
    Oracle,
    MetricClosure,
}

impl Subroutine {
    pub fn name(&self) -> &'static str {
        match self {
            Subroutine::Oracle => "oracle",
            Subroutine::MetricClosure => "metric-closure",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ExperimentError> {
        match s {
            "oracle" => Ok(Subroutine::Oracle),
            "metric-closure" => Ok(Subroutine::MetricClosure),
            other => Err(ExperimentError::BadConfig(format!("unknown subroutine `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioMode {
    /// Divide by the exact multi-level optimum (guard-sized instances).
    Exact,
    /// Divide by min(BU, TD, CMP); for instances beyond the exact guards.
    Relative,
}

impl RatioMode {
    pub fn name(&self) -> &'static str {
        match self {
            RatioMode::Exact => "exact-ratio",
            RatioMode::Relative => "relative-ratio",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_values: Vec<u32>,
    pub ell_values: Vec<usize>,
    pub stretches: Vec<Weight>,
    pub trials: usize,
    pub seed: u64,
    pub subroutines: Vec<Subroutine>,
    pub mode: RatioMode,
    /// Edge cap for exact-mode instances, keeping both the per-level oracle
    /// and the multi-level optimum within their guards.
    pub exact_edge_cap: usize,
    pub gen_attempts: usize,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
    /// When false, the ms_* columns are written as 0 so repeated runs
    /// produce byte-identical CSV files.
    pub record_timing: bool,
}

/// Desk-scale exact-ratio grid defaults.
pub fn default_exact_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        n_values: vec![6, 8, 10],
        ell_values: vec![2, 3],
        stretches: default_stretches(),
        trials: 3,
        seed,
        subroutines: vec![Subroutine::Oracle, Subroutine::MetricClosure],
        mode: RatioMode::Exact,
        exact_edge_cap: 13,
        gen_attempts: 2000,
        jobs: 0,
        record_timing: true,
    }
}

/// The stretch grid used throughout the evaluation.
pub fn default_stretches() -> Vec<Weight> {
    vec![
        Weight::new(6, 5),
        Weight::new(7, 5),
        Weight::from_integer(2),
        Weight::from_integer(4),
    ]
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::BadConfig("trials must be >= 1".into()));
        }
        if self.n_values.is_empty() || self.ell_values.is_empty() || self.stretches.is_empty() {
            return Err(ExperimentError::BadConfig("empty parameter grid".into()));
        }
        if self.subroutines.is_empty() {
            return Err(ExperimentError::BadConfig("no subroutine selected".into()));
        }
        if self.stretches.iter().any(|t| *t < Weight::from_integer(1)) {
            return Err(ExperimentError::BadConfig("stretch values must be >= 1".into()));
        }
        if self.mode == RatioMode::Exact {
            let max = crate::oracle::SOLVE_EXACT_MAX_EDGES;
            if self.exact_edge_cap == 0 || self.exact_edge_cap > max {
                return Err(ExperimentError::BadConfig(format!(
                    "exact-ratio mode needs an edge cap in 1..={max} to stay within the oracle guards"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ResultRow {
    pub generator: String,
    pub n: u32,
    pub ell: usize,
    pub stretch: Weight,
    pub trial: usize,
    pub seed: u64,
    pub subroutine: Subroutine,
    pub cost_bu: Weight,
    pub cost_td: Weight,
    pub cost_cmp: Weight,
    pub baseline: Weight,
    pub ratio_bu: f64,
    pub ratio_td: f64,
    pub ratio_cmp: f64,
    pub ms_bu: u128,
    pub ms_td: u128,
    pub ms_cmp: u128,
    pub ms_baseline: u128,
}

pub const CSV_HEADER: &str = "generator,n,ell,t,trial,seed,subroutine,cost_bu,cost_td,cost_cmp,baseline,ratio_bu,ratio_td,ratio_cmp,ms_bu,ms_td,ms_cmp,ms_baseline";

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.generator,
            r.n,
            r.ell,
            format_weight(&r.stretch),
            r.trial,
            r.seed,
            r.subroutine.name(),
            format_weight(&r.cost_bu),
            format_weight(&r.cost_td),
            format_weight(&r.cost_cmp),
            format_weight(&r.baseline),
            r.ratio_bu,
            r.ratio_td,
            r.ratio_cmp,
            r.ms_bu,
            r.ms_td,
            r.ms_cmp,
            r.ms_baseline
        ));
    }
    out
}

struct CellOutput {
    key: (u32, usize, Weight, usize),
    rows: Vec<ResultRow>,
}

/// Runs one instance under one subroutine: a composite enumerate pass whose
/// candidate list also contains the BU and TD quantizers.
fn run_instance(
    g: &crate::graph::Graph,
    h: &crate::multilevel::TerminalHierarchy,
    stretch: &Weight,
    subroutine: Subroutine,
    record_timing: bool,
) -> Result<(Weight, Weight, Weight, u128, u128, u128), ExperimentError> {
    let f = DistortionFn::Multiplicative(*stretch);
    let kind = SparsifierKind::Spanner(f.clone());
    let solver: Box<dyn SingleLevelSolver> = match subroutine {
        Subroutine::Oracle => Box::new(OracleSolver { distortion: f.clone() }),
        Subroutine::MetricClosure => Box::new(MetricClosureSolver { distortion: f.clone() }),
    };
    let ell = h.level_count();
    let started = Instant::now();
    let outcome =
        composite(g, h, &kind, solver.as_ref(), &LevelCostFn::Linear, CompositeMode::Enumerate)?;
    let elapsed = started.elapsed().as_millis();

    let bu = Quantizer::bottom_up(ell).expect("valid preset");
    let td = Quantizer::top_down(ell).expect("valid preset");
    let find = |q: &Quantizer| -> Weight {
        outcome
            .per_q_costs
            .iter()
            .find(|(cand, _)| cand == q)
            .map(|(_, c)| *c)
            .expect("preset quantizer enumerated")
    };
    let cost_bu = find(&bu);
    let cost_td = find(&td);
    let cost_cmp = outcome.cost;
    // The shared enumerate pass solves each level once; attribute its time to
    // all three variants rather than pretending they ran separately.
    let ms = if record_timing { elapsed } else { 0 };
    Ok((cost_bu, cost_td, cost_cmp, ms, ms, ms))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    cfg.validate()?;
    let run_all = || -> Result<Vec<ResultRow>, ExperimentError> {
        use rayon::prelude::*;
        let mut cells = Vec::new();
        for &n in &cfg.n_values {
            for &ell in &cfg.ell_values {
                for t in &cfg.stretches {
                    for trial in 0..cfg.trials {
                        cells.push((n, ell, *t, trial));
                    }
                }
            }
        }
        let outputs: Result<Vec<Option<CellOutput>>, ExperimentError> = cells
            .par_iter()
            .map(|(n, ell, t, trial)| match run_cell(cfg, *n, *ell, t, *trial) {
                Ok(cell) => Ok(Some(cell)),
                // Cells whose terminal-size precondition cannot hold are
                // skipped rather than aborting the whole grid.
                Err(ExperimentError::TerminalsTooSmall { .. }) => Ok(None),
                Err(e) => Err(e),
            })
            .collect();
        let mut outputs: Vec<CellOutput> = outputs?.into_iter().flatten().collect();
        outputs.sort_by_key(|a| a.key);
        Ok(outputs.into_iter().flat_map(|c| c.rows).collect())
    };
    if cfg.jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| ExperimentError::BadConfig(e.to_string()))?;
        pool.install(run_all)
    } else {
        run_all()
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    n: u32,
    ell: usize,
    stretch: &Weight,
    trial: usize,
) -> Result<CellOutput, ExperimentError> {
    let instance_seed = derive_seed(&[
        cfg.seed,
        n as u64,
        ell as u64,
        *stretch.numer() as u64,
        *stretch.denom() as u64,
        trial as u64,
    ]);
    let graph_seed = derive_seed(&[instance_seed, 0]);
    let terminal_seed = derive_seed(&[instance_seed, 1]);
    let cap = match cfg.mode {
        RatioMode::Exact => Some(cfg.exact_edge_cap),
        RatioMode::Relative => None,
    };
    let g = gen_er_with(n, graph_seed, cap, cfg.gen_attempts)?;
    let h = sample_terminals(&g, ell, terminal_seed)?;

    // Exact baseline is shared by every subroutine on this instance.
    let (baseline_exact, ms_baseline) = match cfg.mode {
        RatioMode::Exact => {
            let f = DistortionFn::Multiplicative(*stretch);
            let started = Instant::now();
            let opt = solve_exact_multilevel_with_guard(
                &g,
                &h,
                &f,
                &LevelCostFn::Linear,
                u128::MAX,
            )?;
            let ms = if cfg.record_timing { started.elapsed().as_millis() } else { 0 };
            (Some(opt.cost(&g, &LevelCostFn::Linear)), ms)
        }
        RatioMode::Relative => (None, 0),
    };

    let mut rows = Vec::new();
    for &sub in &cfg.subroutines {
        let (cost_bu, cost_td, cost_cmp, ms_bu, ms_td, ms_cmp) =
            run_instance(&g, &h, stretch, sub, cfg.record_timing)?;
        let baseline = match &baseline_exact {
            Some(b) => *b,
            None => cost_bu.min(cost_td).min(cost_cmp),
        };
        let ratio = |c: &Weight| to_f64(&(*c / baseline));
        rows.push(ResultRow {
            generator: "er".into(),
            n,
            ell,
            stretch: *stretch,
            trial,
            seed: instance_seed,
            subroutine: sub,
            ratio_bu: ratio(&cost_bu),
            ratio_td: ratio(&cost_td),
            ratio_cmp: ratio(&cost_cmp),
            cost_bu,
            cost_td,
            cost_cmp,
            baseline,
            ms_bu,
            ms_td,
            ms_cmp,
            ms_baseline,
        });
    }
    rows.sort_by_key(|r| r.subroutine);
    Ok(CellOutput { key: (n, ell, *stretch, trial), rows })
}

pub fn run_experiment_csv(cfg: &ExperimentConfig) -> Result<String, ExperimentError> {
    Ok(rows_to_csv(&run_experiment(cfg)?))
}
