//! Command-line surface for the mlsparse toolkit.
//!
//! Exit codes: 0 on success, 1 on compute/input errors, 2 on usage errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mlsparse::distortion::DistortionFn;
use mlsparse::experiments::{
    self, gen_er, parse_csv, plot_svg, sample_terminals, ExperimentConfig, GroupBy, PlotKind,
    RatioMode, Subroutine,
};
use mlsparse::graph::{EdgeSet, Graph, VertexId};
use mlsparse::multilevel::{
    composite, ml_metric_closure_spanner, quantizer_profile, round_mlags, CompositeMode,
    LevelCostFn, MetricClosureSolver, MultiLevelSolution, OracleSolver, Quantizer,
    SingleLevelSolver, SparsifierKind, SteinerApproxSolver, SteinerExactSolver,
    TerminalHierarchy,
};
use mlsparse::oracle::{build_ilp, export_lp, solve_exact, PairSet};
use mlsparse::ratio::{composite_guarantee, composite_guarantee_approx, guarantee_report, ratio_table};
use mlsparse::spanner::subsetwise_spanner;
use mlsparse::steiner::{steiner_2approx, steiner_exact};
use mlsparse::util::atomic_write;
use mlsparse::weight::{format_weight, parse_weight, to_f64, Weight};
use serde_json::json;
use std::path::{Path, PathBuf};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "mlsparse",
    about = "Multi-level graph sparsifiers: spanners, Steiner trees, oracles, guarantees, experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random connected graph in edge-list form
    Gen(GenArgs),
    /// Metric closure of a graph over a terminal set
    Closure(ClosureArgs),
    /// Subsetwise spanner via the metric-closure construction
    Spanner(SpannerArgs),
    /// Steiner tree over a terminal set (2-approximation or exact)
    Steiner(SteinerArgs),
    /// Exact minimum-weight pairwise spanner (in-process solver)
    Exact(ExactArgs),
    /// Export the pairwise spanner ILP in CPLEX-LP text form
    ExportIlp(ExportArgs),
    /// Multi-level solvers: rounding over a quantizer, composite, or the
    /// metric-closure multilevel spanner
    Multilevel(MultilevelArgs),
    /// Approximation guarantees: per-preset ratios and the composite t_ell
    Ratio(RatioArgs),
    /// Run the BU/TD/CMP experiment grid and emit CSV
    Experiment(ExperimentArgs),
    /// Render an experiment CSV as an SVG box or line plot
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of vertices (>= 3)
    #[arg(long)]
    n: u32,
    /// Seed; defaults to MLSPARSE_SEED or 0
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also sample a nested terminal hierarchy with this many levels
    #[arg(long)]
    ell: Option<usize>,
    /// Where to write the sampled terminals (`v level` lines)
    #[arg(long, requires = "ell")]
    terminals_out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ClosureArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Comma-separated terminal identifiers
    #[arg(long)]
    terminals: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SpannerArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, conflicts_with = "terminals_file")]
    terminals: Option<String>,
    /// Terminal file with `v level` lines; level-1 terminals are used
    #[arg(long)]
    terminals_file: Option<PathBuf>,
    /// Distortion: id, mult:<t>, add:<b>, linear:<a>,<b>
    #[arg(long, default_value = "id")]
    f: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SteinerArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    terminals: String,
    /// Exact dynamic program instead of the 2-approximation
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Pairs as `u,v` separated by semicolons, e.g. `1,3;2,4`
    #[arg(long)]
    pairs: String,
    #[arg(long, default_value = "id")]
    f: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    pairs: String,
    #[arg(long, default_value = "id")]
    f: String,
    /// Output LP file path
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum QPreset {
    Bu,
    Td,
    Powers2,
    Custom,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubroutineArg {
    Oracle,
    MetricClosure,
}

#[derive(Clone, Copy, ValueEnum)]
enum MlAlgorithm {
    Rounding,
    Composite,
    McMultilevel,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Spanner,
    Steiner,
}

#[derive(Args)]
struct MultilevelArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    terminals_file: PathBuf,
    #[arg(long, value_enum, default_value_t = MlAlgorithm::Rounding)]
    algorithm: MlAlgorithm,
    #[arg(long, value_enum, default_value_t = KindArg::Spanner)]
    kind: KindArg,
    #[arg(long, default_value = "id")]
    f: String,
    #[arg(long, default_value = "linear")]
    g: String,
    #[arg(long, value_enum, default_value_t = QPreset::Td)]
    q_preset: QPreset,
    /// Custom quantizer levels (with --q-preset custom), e.g. `1,4,6`
    #[arg(long)]
    q: Option<String>,
    #[arg(long, value_enum, default_value_t = SubroutineArg::Oracle)]
    subroutine: SubroutineArg,
    /// Composite search mode
    #[arg(long, default_value = "enumerate")]
    mode: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RatioArgs {
    /// Level count
    #[arg(long)]
    ell: usize,
    #[arg(long, default_value = "linear")]
    g: String,
    /// Emit a CSV table for 1..=ell instead of a single value
    #[arg(long)]
    table: bool,
    /// Skip exact certification and use floating point throughout
    #[arg(long)]
    approx: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Vertex counts, e.g. `6,8,10`
    #[arg(long, default_value = "6,8")]
    n: String,
    /// Level counts, e.g. `2,3`
    #[arg(long, default_value = "2")]
    ell: String,
    /// Stretch factors, e.g. `1.2,1.4,2,4`
    #[arg(long, default_value = "1.2,2")]
    t: String,
    #[arg(long, default_value_t = 2)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// oracle, metric-closure, or both
    #[arg(long, default_value = "both")]
    subroutine: String,
    /// exact-ratio or relative-ratio
    #[arg(long, default_value = "exact-ratio")]
    mode: String,
    /// Edge cap for exact-mode instance generation
    #[arg(long, default_value_t = 13)]
    exact_edge_cap: usize,
    /// Worker threads (0 = rayon default)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Zero the ms_* columns for byte-reproducible output
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    /// box or line
    #[arg(long, default_value = "box")]
    kind: String,
    /// n, ell, or t
    #[arg(long, default_value = "ell")]
    group_by: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    json: bool,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Closure(args) => cmd_closure(args),
        Command::Spanner(args) => cmd_spanner(args),
        Command::Steiner(args) => cmd_steiner(args),
        Command::Exact(args) => cmd_exact(args),
        Command::ExportIlp(args) => cmd_export(args),
        Command::Multilevel(args) => cmd_multilevel(args),
        Command::Ratio(args) => cmd_ratio(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn env_seed(arg: Option<u64>) -> u64 {
    arg.or_else(|| std::env::var("MLSPARSE_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

/// Writes the primary text output: to a file when a path was given, to
/// stdout otherwise. With `--json` and no path the text is suppressed so that
/// stdout carries exactly one JSON object.
fn emit(out: &Option<PathBuf>, text: &str, json: bool) -> Result<()> {
    match out {
        Some(path) => {
            atomic_write(path, text.as_bytes())
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None if !json => print!("{text}"),
        None => {}
    }
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let graph = Graph::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    if !graph.is_connected() {
        eprintln!("warning: {} is not connected", path.display());
    }
    Ok(graph)
}

fn parse_terminals(spec: &str) -> Result<Vec<VertexId>> {
    spec.split(',')
        .map(|s| s.trim().parse::<VertexId>().map_err(|_| anyhow!("invalid terminal `{s}`")))
        .collect()
}

fn parse_pairs(spec: &str) -> Result<Vec<(VertexId, VertexId)>> {
    spec.split(';')
        .map(|part| {
            let (a, b) = part
                .split_once(',')
                .ok_or_else(|| anyhow!("pair `{part}` is not of the form u,v"))?;
            Ok((
                a.trim().parse().map_err(|_| anyhow!("invalid vertex `{a}`"))?,
                b.trim().parse().map_err(|_| anyhow!("invalid vertex `{b}`"))?,
            ))
        })
        .collect()
}

fn parse_weight_list(spec: &str) -> Result<Vec<Weight>> {
    spec.split(',')
        .map(|s| parse_weight(s.trim()).map_err(|e| anyhow!(e)))
        .collect()
}

fn edge_lines(g: &Graph, set: &EdgeSet) -> String {
    let mut out = String::new();
    for id in set.iter() {
        let (a, b) = g.edge_endpoints(id);
        out.push_str(&format!("{a} {b} {}\n", format_weight(g.edge_weight(id))));
    }
    out
}

fn edge_json(g: &Graph, set: &EdgeSet) -> serde_json::Value {
    json!({
        "edges": set
            .iter()
            .map(|id| {
                let (a, b) = g.edge_endpoints(id);
                json!([a, b, format_weight(g.edge_weight(id))])
            })
            .collect::<Vec<_>>(),
        "count": set.len(),
        "weight": format_weight(set.weight()),
        "weight_f64": set.weight_f64(),
    })
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let seed = env_seed(args.seed);
    let g = gen_er(args.n, seed)?;
    let text = g.to_edge_list();
    emit(&args.out, &text, args.json)?;
    let mut terminal_sizes = Vec::new();
    if let Some(ell) = args.ell {
        let hierarchy = sample_terminals(&g, ell, seed.wrapping_add(1))?;
        terminal_sizes = (1..=ell).map(|i| hierarchy.terminals(i).len()).collect();
        match &args.terminals_out {
            Some(path) => atomic_write(path, hierarchy.to_text().as_bytes())
                .with_context(|| format!("writing {}", path.display()))?,
            None if !args.json => print!("{}", hierarchy.to_text()),
            None => {}
        }
    }
    if args.json {
        println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": "gen",
                "n": g.vertex_count(),
                "edges": g.edge_count(),
                "seed": seed,
                "terminal_sizes": terminal_sizes,
            })
        );
    } else if args.out.is_some() {
        eprintln!("generated n={} m={} (seed {seed})", g.vertex_count(), g.edge_count());
    }
    Ok(())
}

fn cmd_closure(args: ClosureArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let terms = parse_terminals(&args.terminals)?;
    let closure = mlsparse::shortest::metric_closure(&g, &terms)?;
    let text = closure.graph().to_edge_list();
    emit(&args.out, &text, args.json)?;
    if args.json {
        println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": "closure",
                "terminals": closure.terminals(),
                "edges": closure.graph().edge_count(),
                "total_weight": format_weight(&closure.graph().total_weight()),
            })
        );
    }
    Ok(())
}

fn cmd_spanner(args: SpannerArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let f = DistortionFn::parse(&args.f)?;
    let terms: Vec<VertexId> = match (&args.terminals, &args.terminals_file) {
        (Some(spec), None) => parse_terminals(spec)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            TerminalHierarchy::parse(&text, None)?.terminals_vec(1)
        }
        _ => bail!("exactly one of --terminals / --terminals-file is required"),
    };
    let spanner = subsetwise_spanner(&g, &terms, &f)?;
    emit(&args.out, &edge_lines(&g, &spanner.edges), args.json)?;
    if args.json {
        let worst = spanner.worst.as_ref();
        println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": "spanner",
                "distortion": f.to_string(),
                "terminals": spanner.terminals,
                "result": edge_json(&g, &spanner.edges),
                "worst_pair": worst.map(|w| json!([w.pair.0, w.pair.1])),
                "worst_ratio": worst.map(|w| w.ratio_f64()),
                "worst_stretch": worst.map(|w| w.stretch_f64()),
                "ms_closure": spanner.timings.closure_ms,
                "ms_subroutine": spanner.timings.subroutine_ms,
            })
        );
    } else {
        eprintln!(
            "spanner: {} edges, weight {}",
            spanner.edges.len(),
            format_weight(spanner.edges.weight())
        );
    }
    Ok(())
}

fn cmd_steiner(args: SteinerArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let terms = parse_terminals(&args.terminals)?;
    let tree = if args.exact {
        steiner_exact(&g, &terms)?
    } else {
        steiner_2approx(&g, &terms)?
    };
    emit(&args.out, &edge_lines(&g, &tree), args.json)?;
    if args.json {
        println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": "steiner",
                "exact": args.exact,
                "terminals": terms,
                "result": edge_json(&g, &tree),
            })
        );
    } else {
        eprintln!("steiner: {} edges, weight {}", tree.len(), format_weight(tree.weight()));
    }
    Ok(())
}

fn cmd_exact(args: ExactArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let f = DistortionFn::parse(&args.f)?;
    let pairs = PairSet::from_ids(&g, &parse_pairs(&args.pairs)?)?;
    let set = solve_exact(&g, &pairs, &f)?;
    emit(&args.out, &edge_lines(&g, &set), args.json)?;
    if args.json {
        println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": "exact",
                "distortion": f.to_string(),
                "pairs": pairs.len(),
                "result": edge_json(&g, &set),
            })
        );
    } else {
        eprintln!("exact: {} edges, weight {}", set.len(), format_weight(set.weight()));
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let f = DistortionFn::parse(&args.f)?;
    let pairs = PairSet::from_ids(&g, &parse_pairs(&args.pairs)?)?;
    let model = build_ilp(&g, &pairs, &f)?;
    export_lp(&model, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    if args.json {
        println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": "export-ilp",
                "variables": model.variable_count(),
                "constraints": model.constraint_count(),
                "out": args.out.display().to_string(),
            })
        );
    } else {
        eprintln!(
            "exported {} variables, {} constraints to {}",
            model.variable_count(),
            model.constraint_count(),
            args.out.display()
        );
    }
    Ok(())
}

fn cmd_multilevel(args: MultilevelArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let text = std::fs::read_to_string(&args.terminals_file)
        .with_context(|| format!("reading {}", args.terminals_file.display()))?;
    let hierarchy = TerminalHierarchy::parse(&text, None)?;
    let ell = hierarchy.level_count();
    let f = DistortionFn::parse(&args.f)?;
    let cost_fn = LevelCostFn::parse(&args.g)?;

    let kind = match args.kind {
        KindArg::Spanner => SparsifierKind::Spanner(f.clone()),
        KindArg::Steiner => SparsifierKind::SteinerTree,
    };
    let solver: Box<dyn SingleLevelSolver> = match (args.kind, args.subroutine) {
        (KindArg::Spanner, SubroutineArg::Oracle) => {
            Box::new(OracleSolver { distortion: f.clone() })
        }
        (KindArg::Spanner, SubroutineArg::MetricClosure) => {
            Box::new(MetricClosureSolver { distortion: f.clone() })
        }
        (KindArg::Steiner, SubroutineArg::Oracle) => Box::new(SteinerExactSolver),
        (KindArg::Steiner, SubroutineArg::MetricClosure) => Box::new(SteinerApproxSolver),
    };

    let (solution, extra): (MultiLevelSolution, serde_json::Value) = match args.algorithm {
        MlAlgorithm::Rounding => {
            let q = match args.q_preset {
                QPreset::Bu => Quantizer::bottom_up(ell)?,
                QPreset::Td => Quantizer::top_down(ell)?,
                QPreset::Powers2 => Quantizer::powers_of_two(ell)?,
                QPreset::Custom => {
                    let spec = args.q.as_ref().ok_or_else(|| anyhow!("--q required with custom preset"))?;
                    let levels: Vec<usize> = spec
                        .split(',')
                        .map(|s| s.trim().parse().map_err(|_| anyhow!("invalid level `{s}`")))
                        .collect::<Result<_>>()?;
                    Quantizer::new(levels, ell)?
                }
            };
            let profile = quantizer_profile(&cost_fn, &q);
            let solution = round_mlags(&g, &hierarchy, &q, &kind, solver.as_ref())?;
            (
                solution,
                json!({
                    "quantizer": q.to_string(),
                    "profile_a": format_weight(&profile.a),
                    "profile_b": format_weight(&profile.b),
                }),
            )
        }
        MlAlgorithm::Composite => {
            let mode = match args.mode.as_str() {
                "enumerate" => CompositeMode::Enumerate,
                "measured" => CompositeMode::Measured,
                other => bail!("unknown composite mode `{other}`"),
            };
            let outcome = composite(&g, &hierarchy, &kind, solver.as_ref(), &cost_fn, mode)?;
            (
                outcome.solution,
                json!({
                    "chosen_q": outcome.chosen_q.to_string(),
                    "level_weights": outcome
                        .level_weights
                        .iter()
                        .map(format_weight)
                        .collect::<Vec<_>>(),
                }),
            )
        }
        MlAlgorithm::McMultilevel => {
            let out = ml_metric_closure_spanner(&g, &hierarchy, &f)?;
            let per_level: Vec<serde_json::Value> = out
                .per_level
                .iter()
                .map(|l| {
                    json!({
                        "level": l.level,
                        "ok": l.report.ok,
                        "worst_ratio": l.report.worst.as_ref().map(|w| w.ratio_f64()),
                    })
                })
                .collect();
            (out.solution, json!({ "per_level": per_level }))
        }
    };

    let cost = solution.cost(&g, &cost_fn);
    emit(&args.out, &solution.to_text(&g), args.json)?;
    if args.json {
        println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": "multilevel",
                "levels": ell,
                "cost": format_weight(&cost),
                "cost_f64": to_f64(&cost),
                "level_sizes": (1..=ell).map(|i| solution.level(i).len()).collect::<Vec<_>>(),
                "detail": extra,
            })
        );
    } else {
        eprintln!("multilevel: cost {}", format_weight(&cost));
    }
    Ok(())
}

fn cmd_ratio(args: RatioArgs) -> Result<()> {
    let cost_fn = LevelCostFn::parse(&args.g)?;
    if args.table {
        let table = ratio_table(args.ell, &cost_fn, args.approx)?;
        emit(&args.out, &table, args.json)?;
        return Ok(());
    }
    let guarantee = if args.approx {
        composite_guarantee_approx(args.ell, &cost_fn)?
    } else {
        composite_guarantee(args.ell, &cost_fn)?
    };
    if args.json {
        let presets = if args.approx {
            serde_json::Value::Null
        } else {
            let report = guarantee_report(args.ell, &cost_fn, Weight::from_integer(1))?;
            json!(report
                .preset_ratios
                .iter()
                .map(|(name, r)| (name.clone(), format_weight(r)))
                .collect::<std::collections::BTreeMap<_, _>>())
        };
        println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": "ratio",
                "ell": args.ell,
                "t": guarantee.value,
                "t_exact": guarantee.exact.as_ref().map(|(t, _)| t.to_string()),
                "witness": guarantee.witness,
                "constraints": guarantee.constraints_generated,
                "preset_ratios": presets,
                "subroutine_factor": "1",
            })
        );
    } else {
        match &guarantee.exact {
            Some((t, _)) => println!("{t}"),
            None => println!("{}", guarantee.value),
        }
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let seed = env_seed(args.seed);
    let subroutines = match args.subroutine.as_str() {
        "both" => vec![Subroutine::Oracle, Subroutine::MetricClosure],
        other => vec![Subroutine::parse(other)?],
    };
    let mode = match args.mode.as_str() {
        "exact-ratio" | "exact" => RatioMode::Exact,
        "relative-ratio" | "relative" => RatioMode::Relative,
        other => bail!("unknown mode `{other}`"),
    };
    let cfg = ExperimentConfig {
        n_values: args
            .n
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| anyhow!("invalid n `{s}`")))
            .collect::<Result<_>>()?,
        ell_values: args
            .ell
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| anyhow!("invalid ell `{s}`")))
            .collect::<Result<_>>()?,
        stretches: parse_weight_list(&args.t)?,
        trials: args.trials,
        seed,
        subroutines,
        mode,
        exact_edge_cap: args.exact_edge_cap,
        gen_attempts: 2000,
        jobs: args.jobs,
        record_timing: !args.no_timing,
    };
    let csv = experiments::run_experiment_csv(&cfg)?;
    let rows = csv.lines().count().saturating_sub(1);
    emit(&args.out, &csv, args.json)?;
    if args.json {
        println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": "experiment",
                "rows": rows,
                "seed": seed,
                "mode": mode.name(),
            })
        );
    } else if args.out.is_some() {
        eprintln!("experiment: {rows} rows (seed {seed})");
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.csv)
        .with_context(|| format!("reading {}", args.csv.display()))?;
    let rows = parse_csv(&text)?;
    let kind = PlotKind::parse(&args.kind)?;
    let group_by = GroupBy::parse(&args.group_by)?;
    let svg = plot_svg(&rows, kind, group_by)?;
    atomic_write(&args.out, svg.as_bytes())
        .with_context(|| format!("writing {}", args.out.display()))?;
    if args.json {
        println!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": "plot",
                "rows": rows.len(),
                "out": args.out.display().to_string(),
            })
        );
    } else {
        eprintln!("plot: {} rows -> {}", rows.len(), args.out.display());
    }
    Ok(())
}
