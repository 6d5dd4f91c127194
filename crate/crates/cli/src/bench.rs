//! Random-instance benchmark harness: approximation-ratio certification on
//! oracle-checkable sizes, or timing-only sweeps for larger inputs.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::Args;
use fairdiv::clustering::fair_kcenter;
use fairdiv::disjoint::{fair_gmm, fair_swap};
use fairdiv::flow::fair_flow;
use fairdiv::gmm::gmm;
use fairdiv::oracle::{self, oracle_fair_kcenter, oracle_fair_maxmin};
use fairdiv::overlap::{
    fair_flow_overlap, fair_swap_overlap, OverlapSwapSearch, SpernerBound, DEFAULT_M_CAP,
};
use fairdiv::synthetic::{clustered_disjoint, uniform_disjoint, uniform_overlapping, SyntheticInstance};
use fairdiv::{Dataset, ElementId, Error, SearchStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::errors::{CliError, CliResult};
use crate::emit;

#[derive(Args)]
pub struct BenchArgs {
    /// Smallest instance size
    #[arg(long, default_value_t = 8)]
    n_min: usize,
    /// Largest instance size
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    /// Per-group counts, e.g. "2,1"; the group count is the list length
    #[arg(long)]
    k: String,
    /// Instances per algorithm (ratio mode) or repetitions (timing mode)
    #[arg(long, default_value_t = 50)]
    instances: usize,
    /// Comma-separated algorithm names
    #[arg(long)]
    algorithms: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the oracle and record wall times at n-min and n-max instead
    #[arg(long)]
    timing_only: bool,
    /// Clustered point clouds instead of uniform ones
    #[arg(long)]
    clustered: bool,
    /// Random overlapping label sets instead of disjoint labels
    #[arg(long)]
    overlapping: bool,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Algo {
    Gmm,
    FairSwap,
    FairGmm,
    FairFlow,
    FairSwapOverlap,
    FairFlowOverlap,
    FairKcenter,
}

impl Algo {
    fn parse(name: &str) -> CliResult<Algo> {
        Ok(match name {
            "gmm" => Algo::Gmm,
            "fair-swap" => Algo::FairSwap,
            "fair-gmm" => Algo::FairGmm,
            "fair-flow" => Algo::FairFlow,
            "fair-swap-overlap" => Algo::FairSwapOverlap,
            "fair-flow-overlap" => Algo::FairFlowOverlap,
            "fair-kcenter" => Algo::FairKcenter,
            other => return Err(CliError::parse(format!("unknown algorithm {other:?}"))),
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Algo::Gmm => "gmm",
            Algo::FairSwap => "fair-swap",
            Algo::FairGmm => "fair-gmm",
            Algo::FairFlow => "fair-flow",
            Algo::FairSwapOverlap => "fair-swap-overlap",
            Algo::FairFlowOverlap => "fair-flow-overlap",
            Algo::FairKcenter => "fair-kcenter",
        }
    }

    fn is_radius_objective(&self) -> bool {
        matches!(self, Algo::FairKcenter)
    }

    /// Guaranteed worst-case ratio: a lower bound on achieved/optimal
    /// diversity, or an upper bound on radius/optimal radius.
    fn bound(&self, m: usize) -> f64 {
        match self {
            Algo::Gmm => 0.5,
            Algo::FairSwap | Algo::FairSwapOverlap => 0.25,
            Algo::FairGmm => 0.2,
            Algo::FairFlow => 1.0 / (3.0 * m as f64 - 1.0),
            Algo::FairFlowOverlap => {
                1.0 / (3.0 * SpernerBound::new(m as u32).antichain_max as f64 - 1.0)
            }
            Algo::FairKcenter => 3.0,
        }
    }
}

#[derive(Debug, Serialize)]
struct InstanceRecord {
    instance: usize,
    n: usize,
    m: usize,
    k: Vec<usize>,
    algorithm: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    opt: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    bound: f64,
    within_bound: bool,
    probes: usize,
    wall_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct Aggregate {
    count: usize,
    errors: usize,
    min_ratio: Option<f64>,
    mean_ratio: Option<f64>,
    all_within_bound: bool,
    mean_wall_ms: f64,
}

#[derive(Debug, Serialize)]
struct RatioReport {
    records: Vec<InstanceRecord>,
    aggregates: BTreeMap<&'static str, Aggregate>,
}

#[derive(Debug, Serialize)]
struct TimingRecord {
    algorithm: &'static str,
    n_small: usize,
    n_large: usize,
    wall_ms_small: f64,
    wall_ms_large: f64,
    ratio: f64,
}

#[derive(Debug, Serialize)]
struct TimingReport {
    repetitions: usize,
    records: Vec<TimingRecord>,
}

fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z ^ (z >> 31)
}

pub fn run(args: BenchArgs) -> CliResult<()> {
    let counts: Vec<usize> = args
        .k
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::parse(format!("bad --k list {:?}", args.k)))?;
    if counts.is_empty() {
        return Err(CliError::parse("--k must list at least one group count"));
    }
    let algos: Vec<Algo> = args
        .algorithms
        .split(',')
        .map(|s| Algo::parse(s.trim()))
        .collect::<CliResult<_>>()?;
    if algos.is_empty() {
        return Err(CliError::parse("--algorithms must list at least one name"));
    }
    let k_floor: usize = counts.iter().map(|&k| k.max(1)).sum();
    if args.n_min < k_floor + 1 || args.n_min > args.n_max {
        return Err(CliError::parse(format!(
            "need k+1 <= n-min <= n-max (k = {k_floor})"
        )));
    }

    if args.timing_only {
        run_timing(&args, &counts, &algos)
    } else {
        run_ratios(&args, &counts, &algos)
    }
}

fn generate(args: &BenchArgs, counts: &[usize], n: usize, seed: u64) -> SyntheticInstance {
    if args.overlapping {
        uniform_overlapping(n, counts, seed)
    } else if args.clustered {
        clustered_disjoint(n, counts, 4, 0.8, seed)
    } else {
        uniform_disjoint(n, counts, seed)
    }
}

fn run_algo(
    algo: Algo,
    inst: &SyntheticInstance,
    seed: u64,
) -> Result<(f64, usize), Error> {
    let ds = &inst.dataset;
    let spec = &inst.spec;
    match algo {
        Algo::Gmm => {
            let all: Vec<ElementId> = ds.element_ids().collect();
            let st = gmm(ds, &all, &[], spec.k_total(), seed)?;
            let div = diversity_of(ds, &st.selected);
            Ok((div, 1))
        }
        Algo::FairSwap => fair_swap(ds, spec, seed).map(|s| (s.diversity, s.probes)),
        Algo::FairGmm => {
            fair_gmm(ds, spec, seed, oracle::DEFAULT_BUDGET).map(|s| (s.diversity, s.probes))
        }
        Algo::FairFlow => {
            fair_flow(ds, spec, SearchStrategy::Discrete, seed).map(|s| (s.diversity, s.probes))
        }
        Algo::FairSwapOverlap => fair_swap_overlap(ds, spec, OverlapSwapSearch::Discrete, seed)
            .map(|s| (s.diversity, s.probes)),
        Algo::FairFlowOverlap => {
            fair_flow_overlap(ds, spec, SearchStrategy::Discrete, seed, DEFAULT_M_CAP)
                .map(|s| (s.diversity, s.probes))
        }
        Algo::FairKcenter => {
            fair_kcenter(ds, spec, SearchStrategy::Discrete, seed).map(|r| (r.radius, r.probes))
        }
    }
}

fn diversity_of(ds: &Dataset, ids: &[ElementId]) -> f64 {
    if ids.len() < 2 {
        f64::INFINITY
    } else {
        ds.diversity(ids).expect("non-empty")
    }
}

fn run_ratios(args: &BenchArgs, counts: &[usize], algos: &[Algo]) -> CliResult<()> {
    let budget = args
        .budget
        .or_else(|| std::env::var("FAIRDIV_BUDGET").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(oracle::DEFAULT_BUDGET);
    let m = counts.len();
    let mut records = Vec::new();

    for i in 0..args.instances {
        let inst_seed = mix(args.seed, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(inst_seed);
        let n = rng.gen_range(args.n_min..=args.n_max);
        let inst = generate(args, counts, n, rng.gen());

        for &algo in algos {
            let start = Instant::now();
            let outcome = run_algo(algo, &inst, inst_seed);
            let wall_ms = start.elapsed().as_millis() as u64;
            let bound = algo.bound(m);
            let record = match outcome {
                Err(e @ Error::BudgetExceeded { .. }) => InstanceRecord {
                    instance: i,
                    n,
                    m,
                    k: counts.to_vec(),
                    algorithm: algo.name(),
                    objective: None,
                    opt: None,
                    ratio: None,
                    bound,
                    within_bound: false,
                    probes: 0,
                    wall_ms,
                    error: Some(e.to_string()),
                },
                Err(e) => return Err(e.into()),
                Ok((objective, probes)) => {
                    let opt = if algo.is_radius_objective() {
                        oracle_fair_kcenter(&inst.dataset, &inst.spec, budget)?.opt_value
                    } else if algo == Algo::Gmm {
                        oracle::oracle_maxmin_unconstrained(
                            &inst.dataset,
                            inst.spec.k_total(),
                            budget,
                        )?
                        .opt_value
                    } else {
                        oracle_fair_maxmin(&inst.dataset, &inst.spec, budget)?.opt_value
                    };
                    let (ratio, within) = if algo.is_radius_objective() {
                        let r = if opt == 0.0 { 1.0 } else { objective / opt };
                        (r, r <= bound + 1e-9)
                    } else {
                        let r = if opt.is_infinite() {
                            if objective.is_infinite() {
                                1.0
                            } else {
                                0.0
                            }
                        } else if opt == 0.0 {
                            1.0
                        } else {
                            objective / opt
                        };
                        (r, r >= bound - 1e-9)
                    };
                    InstanceRecord {
                        instance: i,
                        n,
                        m,
                        k: counts.to_vec(),
                        algorithm: algo.name(),
                        objective: Some(objective.is_finite().then_some(objective)),
                        opt: Some(opt.is_finite().then_some(opt)),
                        ratio: Some(ratio),
                        bound,
                        within_bound: within,
                        probes,
                        wall_ms,
                        error: None,
                    }
                }
            };
            records.push(record);
        }
    }

    let mut aggregates = BTreeMap::new();
    for &algo in algos {
        let rs: Vec<&InstanceRecord> = records
            .iter()
            .filter(|r| r.algorithm == algo.name())
            .collect();
        let ratios: Vec<f64> = rs.iter().filter_map(|r| r.ratio).collect();
        let errors = rs.iter().filter(|r| r.error.is_some()).count();
        aggregates.insert(
            algo.name(),
            Aggregate {
                count: rs.len(),
                errors,
                min_ratio: ratios.iter().copied().reduce(f64::min),
                mean_ratio: (!ratios.is_empty())
                    .then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
                all_within_bound: rs.iter().all(|r| r.within_bound || r.error.is_some()),
                mean_wall_ms: rs.iter().map(|r| r.wall_ms as f64).sum::<f64>()
                    / rs.len().max(1) as f64,
            },
        );
    }

    emit(&RatioReport { records, aggregates }, args.output.as_deref())
}

fn run_timing(args: &BenchArgs, counts: &[usize], algos: &[Algo]) -> CliResult<()> {
    let reps = args.instances.clamp(1, 10);
    let mut records = Vec::new();
    for &algo in algos {
        let measure = |n: usize| -> CliResult<Duration> {
            let mut best = Duration::MAX;
            for r in 0..reps {
                let inst = generate(args, counts, n, mix(args.seed, 7000 + r as u64));
                let start = Instant::now();
                run_algo(algo, &inst, args.seed)?;
                best = best.min(start.elapsed());
            }
            Ok(best)
        };
        let small = measure(args.n_min)?;
        let large = measure(args.n_max)?;
        records.push(TimingRecord {
            algorithm: algo.name(),
            n_small: args.n_min,
            n_large: args.n_max,
            wall_ms_small: small.as_secs_f64() * 1e3,
            wall_ms_large: large.as_secs_f64() * 1e3,
            ratio: large.as_secs_f64() / small.as_secs_f64().max(1e-9),
        });
    }
    emit(
        &TimingReport {
            repetitions: reps,
            records,
        },
        args.output.as_deref(),
    )
}
