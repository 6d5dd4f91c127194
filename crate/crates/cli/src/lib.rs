//! Command-line front end for fair diverse subset selection.

pub mod bench;
pub mod errors;
pub mod io;
pub mod record;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairdiv::clustering::fair_kcenter;
use fairdiv::disjoint::{fair_gmm, fair_swap};
use fairdiv::flow::fair_flow;
use fairdiv::gmm::gmm;
use fairdiv::oracle::{self, oracle_fair_kcenter, oracle_fair_maxmin};
use fairdiv::overlap::{self, fair_flow_overlap, fair_swap_overlap, OverlapSwapSearch};
use fairdiv::{
    Dataset, ElementId, FairnessSpec, MetricKind, SearchStrategy, Selection,
    DEFAULT_METRIC_TOLERANCE,
};

use errors::{CliError, CliResult};
use record::ResultRecord;

#[derive(Parser)]
#[command(
    name = "fairdiv",
    version,
    about = "Select maximally diverse subsets under per-group cardinality constraints"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a selection or clustering algorithm on a dataset
    Select(SelectArgs),
    /// Exact brute-force reference solver for small instances
    Oracle(OracleArgs),
    /// Random-instance benchmark harness with approximation-ratio checks
    Bench(bench::BenchArgs),
    /// Validate a precomputed distance matrix against the pseudometric axioms
    CheckMetric(CheckMetricArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatArg {
    Points,
    Matrix,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MetricArg {
    Euclidean,
    Manhattan,
    Precomputed,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SearchArg {
    Discrete,
    Continuous,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum AlgorithmArg {
    Gmm,
    FairSwap,
    FairGmm,
    FairFlow,
    FairSwapOverlap,
    FairFlowOverlap,
    FairKcenter,
    Oracle,
}

#[derive(Args)]
struct InputArgs {
    /// Points CSV (`id,groups,f1,...`) or square matrix CSV
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from --labels/--metric when omitted
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Sidecar `id,groups` file accompanying a matrix input
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Distance function
    #[arg(long, value_enum, default_value = "euclidean")]
    metric: MetricArg,
}

impl InputArgs {
    fn read(&self) -> CliResult<Dataset> {
        let matrix = match self.format {
            Some(FormatArg::Matrix) => true,
            Some(FormatArg::Points) => false,
            None => self.labels.is_some() || self.metric == MetricArg::Precomputed,
        };
        if matrix {
            let labels = self.labels.as_ref().ok_or_else(|| {
                CliError::parse("matrix input needs a --labels id,groups sidecar file")
            })?;
            if !matches!(self.metric, MetricArg::Precomputed) {
                return Err(CliError::parse(
                    "matrix input implies --metric precomputed",
                ));
            }
            io::read_matrix(&self.input, labels)
        } else {
            let kind = match self.metric {
                MetricArg::Euclidean => MetricKind::Euclidean,
                MetricArg::Manhattan => MetricKind::Manhattan,
                MetricArg::Precomputed => {
                    return Err(CliError::parse(
                        "--metric precomputed needs matrix input with --labels",
                    ))
                }
            };
            io::read_points(&self.input, kind)
        }
    }
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    algorithm: AlgorithmArg,
    /// Per-group counts, e.g. "urban=3,rural=2"; unlisted groups get 0
    #[arg(long)]
    constraints: Option<String>,
    /// Selection size for the unconstrained greedy algorithm
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "discrete")]
    search: SearchArg,
    /// Resolution of the continuous search grid
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Candidate-set budget for the exhaustive algorithms
    #[arg(long)]
    budget: Option<u64>,
    /// Group cap for the overlapping flow algorithm
    #[arg(long)]
    m_cap: Option<usize>,
    /// Write the result record here in addition to stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    constraints: String,
    /// maxmin (diversity) or kcenter (covering radius)
    #[arg(long, default_value = "maxmin")]
    objective: String,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckMetricArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Relative tolerance for the axiom checks
    #[arg(long, default_value_t = DEFAULT_METRIC_TOLERANCE)]
    tolerance: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn env_budget() -> Option<u64> {
    std::env::var("FAIRDIV_BUDGET").ok().and_then(|v| v.parse().ok())
}

fn env_m_cap() -> Option<usize> {
    std::env::var("FAIRDIV_M_CAP").ok().and_then(|v| v.parse().ok())
}

pub(crate) fn emit(record: &impl serde::Serialize, output: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(record)
        .map_err(|e| CliError { code: errors::EXIT_INTERNAL, message: e.to_string() })?;
    println!("{text}");
    if let Some(path) = output {
        std::fs::write(path, text + "\n")?;
    }
    Ok(())
}

fn run_select(args: SelectArgs) -> CliResult<()> {
    let ds = args.input.read()?;
    let budget = args.budget.or(env_budget()).unwrap_or(oracle::DEFAULT_BUDGET);
    let m_cap = args.m_cap.or(env_m_cap()).unwrap_or(overlap::DEFAULT_M_CAP);
    let search = match args.search {
        SearchArg::Discrete => SearchStrategy::Discrete,
        SearchArg::Continuous => SearchStrategy::Continuous { eps: args.eps },
    };
    let spec = match &args.constraints {
        Some(text) => Some(io::parse_constraints(text, &ds)?),
        None => None,
    };
    let need_spec = || -> CliResult<&FairnessSpec> {
        spec.as_ref()
            .ok_or_else(|| CliError::parse("--constraints is required for this algorithm"))
    };

    let start = Instant::now();
    match args.algorithm {
        AlgorithmArg::Gmm => {
            let k = args
                .k
                .or_else(|| spec.as_ref().map(|s| s.k_total()))
                .ok_or_else(|| CliError::parse("gmm needs --k or --constraints"))?;
            let all: Vec<ElementId> = ds.element_ids().collect();
            let state = gmm(&ds, &all, &[], k, args.seed)?;
            let sel = selection_from_ids(&ds, "gmm", state.selected);
            finish_selection(&ds, sel, start, args.output.as_deref())
        }
        AlgorithmArg::FairSwap => {
            let sel = fair_swap(&ds, need_spec()?, args.seed)?;
            finish_selection(&ds, sel, start, args.output.as_deref())
        }
        AlgorithmArg::FairGmm => {
            let sel = fair_gmm(&ds, need_spec()?, args.seed, budget)?;
            finish_selection(&ds, sel, start, args.output.as_deref())
        }
        AlgorithmArg::FairFlow => {
            let sel = fair_flow(&ds, need_spec()?, search, args.seed)?;
            finish_selection(&ds, sel, start, args.output.as_deref())
        }
        AlgorithmArg::FairSwapOverlap => {
            let swap_search = match args.search {
                SearchArg::Discrete => OverlapSwapSearch::Discrete,
                SearchArg::Continuous => {
                    return Err(CliError::parse(
                        "the overlapping swap solver only supports --search discrete",
                    ))
                }
            };
            let sel = fair_swap_overlap(&ds, need_spec()?, swap_search, args.seed)?;
            finish_selection(&ds, sel, start, args.output.as_deref())
        }
        AlgorithmArg::FairFlowOverlap => {
            let sel = fair_flow_overlap(&ds, need_spec()?, search, args.seed, m_cap)?;
            finish_selection(&ds, sel, start, args.output.as_deref())
        }
        AlgorithmArg::FairKcenter => {
            let res = fair_kcenter(&ds, need_spec()?, search, args.seed)?;
            let record =
                ResultRecord::from_clustering(&ds, &res, start.elapsed().as_millis() as u64);
            emit(&record, args.output.as_deref())
        }
        AlgorithmArg::Oracle => {
            let res = oracle_fair_maxmin(&ds, need_spec()?, budget)?;
            let record =
                ResultRecord::from_oracle(&ds, &res, false, start.elapsed().as_millis() as u64);
            emit(&record, args.output.as_deref())
        }
    }
}

fn selection_from_ids(ds: &Dataset, algorithm: &str, chosen: Vec<ElementId>) -> Selection {
    let diversity = if chosen.len() < 2 {
        f64::INFINITY
    } else {
        ds.diversity(&chosen).expect("non-empty")
    };
    let mut per_group_counts = vec![0usize; ds.num_groups()];
    for &u in &chosen {
        for g in ds.memberships(u) {
            per_group_counts[g.0] += 1;
        }
    }
    Selection {
        algorithm: algorithm.to_string(),
        chosen,
        diversity,
        per_group_counts,
        gamma_used: None,
        aborted: false,
        probes: 1,
        non_monotone_gamma: false,
    }
}

fn finish_selection(
    ds: &Dataset,
    sel: Selection,
    start: Instant,
    output: Option<&Path>,
) -> CliResult<()> {
    let record = ResultRecord::from_selection(ds, &sel, start.elapsed().as_millis() as u64);
    emit(&record, output)
}

fn run_oracle(args: OracleArgs) -> CliResult<()> {
    let ds = args.input.read()?;
    let spec = io::parse_constraints(&args.constraints, &ds)?;
    let budget = args.budget.or(env_budget()).unwrap_or(oracle::DEFAULT_BUDGET);
    let start = Instant::now();
    let (res, is_radius) = match args.objective.as_str() {
        "maxmin" => (oracle_fair_maxmin(&ds, &spec, budget)?, false),
        "kcenter" => (oracle_fair_kcenter(&ds, &spec, budget)?, true),
        other => {
            return Err(CliError::parse(format!(
                "unknown objective {other:?}, expected maxmin or kcenter"
            )))
        }
    };
    let record = ResultRecord::from_oracle(&ds, &res, is_radius, start.elapsed().as_millis() as u64);
    emit(&record, args.output.as_deref())
}

fn run_check_metric(args: CheckMetricArgs) -> CliResult<()> {
    let ds = args.input.read()?;
    let report = ds.validate_pseudometric(args.tolerance)?;
    emit(&report, args.output.as_deref())
}

/// Parse the process arguments, dispatch, and return the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Select(args) => run_select(args),
        Cmd::Oracle(args) => run_oracle(args),
        Cmd::Bench(args) => bench::run(args),
        Cmd::CheckMetric(args) => run_check_metric(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
