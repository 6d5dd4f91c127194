//! Fair k-center clustering via the flow reduction.
//!
//! Probes take a guess `gamma` of the optimum fair covering radius. A
//! farthest-first pass either certifies that no radius-`gamma` clustering
//! exists (abort) or yields well-spread pivots; each pivot offers its nearest
//! element of every group as a center candidate, and the flow network picks
//! one candidate per pivot under the group counts. A successful probe covers
//! the universe within `3 * gamma`.

use serde::Serialize;

use crate::dataset::{Dataset, ElementId, FairnessSpec, GroupId, GroupMode};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::gmm::{derive_seed, gmm, GmmState};
use crate::oracle::covering_radius;
use crate::search::{
    geometric_grid, search_smallest_feasible, sorted_guesses, SearchStrategy,
};

pub const ALG_FAIR_KCENTER: &str = "fair-kcenter";

/// Result of a clustering solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterResult {
    pub algorithm: String,
    pub centers: Vec<ElementId>,
    /// Largest distance from any element to its nearest center, recomputed
    /// over the whole universe. Infinite for aborted probes.
    pub radius: f64,
    pub per_group_counts: Vec<usize>,
    pub gamma_used: Option<f64>,
    pub aborted: bool,
    pub probes: usize,
    #[serde(default)]
    pub non_monotone_gamma: bool,
}

impl ClusterResult {
    fn from_centers(
        ds: &Dataset,
        centers: Vec<ElementId>,
        gamma_used: Option<f64>,
        probes: usize,
    ) -> ClusterResult {
        let all: Vec<ElementId> = ds.element_ids().collect();
        let radius = covering_radius(ds, &all, &centers);
        let mut per_group_counts = vec![0usize; ds.num_groups()];
        for &c in &centers {
            for g in ds.memberships(c) {
                per_group_counts[g.0] += 1;
            }
        }
        ClusterResult {
            algorithm: ALG_FAIR_KCENTER.to_string(),
            centers,
            radius,
            per_group_counts,
            gamma_used,
            aborted: false,
            probes,
            non_monotone_gamma: false,
        }
    }

    fn aborted(ds: &Dataset, gamma_used: Option<f64>) -> ClusterResult {
        ClusterResult {
            algorithm: ALG_FAIR_KCENTER.to_string(),
            centers: Vec::new(),
            radius: f64::INFINITY,
            per_group_counts: vec![0; ds.num_groups()],
            gamma_used,
            aborted: true,
            probes: 1,
            non_monotone_gamma: false,
        }
    }
}

struct ClusterContext<'a> {
    ds: &'a Dataset,
    spec: &'a FairnessSpec,
    seed: u64,
    /// Farthest-first order of k+1 pivots over the whole universe.
    order: GmmState,
    /// Per pivot, the nearest element of each group (ties to the smaller id).
    nearest: Vec<Vec<ElementId>>,
}

impl<'a> ClusterContext<'a> {
    fn new(ds: &'a Dataset, spec: &'a FairnessSpec, seed: u64) -> Result<Self> {
        let k = spec.k_total();
        let all: Vec<ElementId> = ds.element_ids().collect();
        let order = gmm(ds, &all, &[], k + 1, seed)?;
        debug_assert_eq!(order.selected.len(), k + 1);

        let mut nearest = Vec::with_capacity(k);
        for &pivot in order.selected.iter().take(k) {
            let mut best: Vec<Option<(f64, ElementId)>> = vec![None; ds.num_groups()];
            for u in ds.element_ids() {
                let d = ds.distance(u, pivot);
                for g in ds.memberships(u) {
                    match best[g.0] {
                        Some((bd, bu)) if d > bd || (d == bd && u >= bu) => {}
                        _ => best[g.0] = Some((d, u)),
                    }
                }
            }
            nearest.push(
                best.into_iter()
                    .map(|b| b.expect("every group has at least one element").1)
                    .collect(),
            );
        }
        Ok(ClusterContext {
            ds,
            spec,
            seed,
            order,
            nearest,
        })
    }

    fn probe(&self, gamma: f64) -> Result<ClusterResult> {
        if gamma.is_nan() || gamma < 0.0 {
            return Err(Error::Infeasible(format!("negative guess {gamma}")));
        }
        let k = self.spec.k_total();
        let gains = &self.order.marginal_gains;
        // the (k+1)-th pivot farther than 2*gamma from the rest certifies
        // that no k centers cover at radius gamma
        if gains[k] > 2.0 * gamma {
            return Ok(ClusterResult::aborted(self.ds, Some(gamma)));
        }
        let t = (1..=k)
            .find(|&t| gains[t] <= 2.0 * gamma)
            .expect("gains are non-increasing and gains[k] qualifies");
        let pivots = &self.order.selected[..t];

        // after truncation every element must sit within 2*gamma of a pivot
        let worst = {
            let mut worst: f64 = 0.0;
            for u in self.ds.element_ids() {
                let d = pivots
                    .iter()
                    .map(|&p| self.ds.distance(u, p))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
            worst
        };
        if worst > 2.0 * gamma {
            return Err(Error::Internal(format!(
                "pivot truncation left an element {worst} > 2*{gamma} away"
            )));
        }

        // candidate sets: per pivot, its nearest element of each group if it
        // lies within gamma; they are pairwise disjoint because the pivots
        // are more than 2*gamma apart
        let mut candidates: Vec<Vec<(GroupId, ElementId)>> = Vec::with_capacity(t);
        for (j, &pivot) in pivots.iter().enumerate() {
            let mut set = Vec::new();
            for g in self.ds.group_ids() {
                let x = self.nearest[j][g.0];
                if self.ds.distance(x, pivot) <= gamma {
                    set.push((g, x));
                }
            }
            candidates.push(set);
        }
        let mut seen = std::collections::HashSet::new();
        for set in &candidates {
            for &(_, x) in set {
                if !seen.insert(x) {
                    return Err(Error::Internal(format!(
                        "candidate {x:?} appears near two pivots"
                    )));
                }
            }
        }

        let caps: Vec<i64> = self.spec.counts().iter().map(|&c| c as i64).collect();
        let mut incidence = Vec::new();
        for g in 0..self.ds.num_groups() {
            for (j, set) in candidates.iter().enumerate() {
                if set.iter().any(|&(cg, _)| cg.0 == g) {
                    incidence.push((g, j));
                }
            }
        }
        let net = FlowNetwork::assignment(&caps, t, &incidence);
        let out = net.max_flow();
        net.verify(&out)?;
        if out.value < t as i64 {
            return Ok(ClusterResult::aborted(self.ds, Some(gamma)));
        }

        let mut centers = Vec::with_capacity(k);
        for (edge, &f) in net.edges().iter().zip(&out.edge_flow) {
            if f == 1 && edge.from != net.source() && edge.to != net.sink() {
                let g = edge.from - 1;
                let j = edge.to - 1 - self.ds.num_groups();
                let &(_, x) = candidates[j]
                    .iter()
                    .find(|&&(cg, _)| cg.0 == g)
                    .expect("flow edge implies a candidate");
                centers.push(x);
            }
        }

        // pad each group up to its exact count, farthest-first from the
        // centers picked so far; extra centers never increase the radius
        for g in self.ds.group_ids() {
            let have = centers
                .iter()
                .filter(|&&c| self.ds.memberships(c).contains(&g))
                .count();
            let deficit = self.spec.count(g).saturating_sub(have);
            if deficit > 0 {
                let extra = gmm(
                    self.ds,
                    self.ds.members(g),
                    &centers,
                    deficit,
                    derive_seed(self.seed, 7 + g.0 as u64),
                )?;
                centers.extend(extra.selected);
            }
        }

        let result = ClusterResult::from_centers(self.ds, centers, Some(gamma), 1);
        if result.radius > 3.0 * gamma {
            return Err(Error::Internal(format!(
                "probe produced radius {} above 3 * {gamma}",
                result.radius
            )));
        }
        Ok(result)
    }

    /// Pivots plus all per-pivot group candidates, the points whose pairwise
    /// distances drive the discrete guess list.
    fn pool(&self) -> Vec<ElementId> {
        let mut pool: Vec<ElementId> = self.order.selected.clone();
        for set in &self.nearest {
            pool.extend_from_slice(set);
        }
        pool.sort_unstable();
        pool.dedup();
        pool
    }
}

fn validate(ds: &Dataset, spec: &FairnessSpec) -> Result<()> {
    spec.validate(ds)?;
    if ds.mode() != GroupMode::Disjoint {
        return Err(Error::Infeasible(
            "fair k-center requires disjoint groups".into(),
        ));
    }
    Ok(())
}

/// Every point becomes a center when the counts use up the whole universe.
fn forced_full_selection(ds: &Dataset) -> ClusterResult {
    ClusterResult::from_centers(ds, ds.element_ids().collect(), None, 0)
}

/// One guess of the clustering solver; aborting is a normal outcome. A
/// non-aborted result has exactly the requested number of centers per group
/// and covering radius at most `3 * gamma`.
pub fn fair_kcenter_probe(
    ds: &Dataset,
    spec: &FairnessSpec,
    gamma: f64,
    seed: u64,
) -> Result<ClusterResult> {
    validate(ds, spec)?;
    if spec.k_total() == ds.len() {
        return Ok(forced_full_selection(ds));
    }
    ClusterContext::new(ds, spec, seed)?.probe(gamma)
}

/// Full clustering solver: searches for the smallest non-aborting radius
/// guess and keeps the best (smallest verified radius) probe evaluated.
///
/// The discrete guess list contains every pairwise distance of the pivot and
/// candidate pool together with its half, which covers every radius at which
/// a probe can change behavior; the largest pool distance can never abort.
pub fn fair_kcenter(
    ds: &Dataset,
    spec: &FairnessSpec,
    search: SearchStrategy,
    seed: u64,
) -> Result<ClusterResult> {
    validate(ds, spec)?;
    if spec.k_total() == ds.len() {
        return Ok(forced_full_selection(ds));
    }
    let ctx = ClusterContext::new(ds, spec, seed)?;

    let pool = ctx.pool();
    let mut deltas = Vec::new();
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            deltas.push(ds.distance(pool[i], pool[j]));
        }
    }
    let mut raw = vec![0.0];
    match search {
        SearchStrategy::Discrete => {
            for &d in &deltas {
                raw.push(d);
                raw.push(d / 2.0);
            }
        }
        SearchStrategy::Continuous { eps } => {
            if eps <= 0.0 {
                return Err(Error::Infeasible("eps must be positive".into()));
            }
            let pos: Vec<f64> = deltas.iter().copied().filter(|&d| d > 0.0).collect();
            if let (Some(lo), Some(hi)) = (
                pos.iter().copied().reduce(f64::min),
                pos.iter().copied().reduce(f64::max),
            ) {
                raw.extend(geometric_grid(lo / 2.0, hi, eps));
            }
        }
    }
    let guesses = sorted_guesses(raw);

    let out = search_smallest_feasible(&guesses, |g| {
        let res = ctx.probe(g)?;
        Ok((!res.aborted, res))
    })?;
    let mut best: Option<ClusterResult> = None;
    for rec in &out.records {
        if !rec.feasible {
            continue;
        }
        match &best {
            Some(b) if rec.result.radius >= b.radius => {}
            _ => best = Some(rec.result.clone()),
        }
    }
    let mut res = best.ok_or_else(|| {
        Error::Internal("every radius guess aborted although the request is feasible".into())
    })?;
    res.probes = out.records.len();
    res.non_monotone_gamma = out.non_monotone;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::MetricKind;
    use crate::flow::fair_flow;
    use crate::oracle::{oracle_fair_kcenter, oracle_fair_maxmin, DEFAULT_BUDGET};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(points: &[f64], labels: &[&str]) -> Dataset {
        Dataset::from_points(
            MetricKind::Euclidean,
            points.iter().map(|&x| vec![x]).collect(),
            labels.iter().map(|&l| vec![l.to_string()]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn tight_clusters_probe_within_three_gamma() {
        // three clusters of diameter 0.1 at mutual distance 10
        let pts = [0.0, 0.1, 10.0, 10.1, 20.0, 20.1];
        let labels = ["a", "a", "b", "b", "c", "c"];
        let ds = line(&pts, &labels);
        let spec = FairnessSpec::new(vec![1, 1, 1]);
        let res = fair_kcenter_probe(&ds, &spec, 0.1, 0).unwrap();
        assert!(!res.aborted);
        assert!(res.radius <= 0.3 + 1e-12);
        assert_eq!(res.per_group_counts, vec![1, 1, 1]);
        let opt = oracle_fair_kcenter(&ds, &spec, DEFAULT_BUDGET).unwrap();
        assert!(res.radius <= 3.0 * opt.opt_value + 1e-9);
    }

    #[test]
    fn tiny_gamma_aborts_on_spread_points() {
        let ds = line(&[0.0, 5.0, 10.0, 15.0], &["a", "a", "b", "b"]);
        let spec = FairnessSpec::new(vec![1, 1]);
        let res = fair_kcenter_probe(&ds, &spec, 0.5, 0).unwrap();
        assert!(res.aborted);
    }

    #[test]
    fn counts_using_whole_universe_force_all_centers() {
        let ds = line(&[0.0, 5.0, 9.0], &["a", "a", "b"]);
        let spec = FairnessSpec::new(vec![2, 1]);
        let res = fair_kcenter(&ds, &spec, SearchStrategy::Discrete, 0).unwrap();
        assert_eq!(res.centers.len(), 3);
        assert_eq!(res.radius, 0.0);
    }

    #[test]
    fn coincident_points_cluster_at_radius_zero() {
        let ds = line(&[3.0, 3.0, 3.0], &["a", "a", "b"]);
        let spec = FairnessSpec::new(vec![1, 1]);
        let res = fair_kcenter(&ds, &spec, SearchStrategy::Discrete, 0).unwrap();
        assert!(!res.aborted);
        assert_eq!(res.radius, 0.0);
        assert_eq!(res.per_group_counts, vec![1, 1]);
    }

    fn random_disjoint(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (Dataset, FairnessSpec) {
        loop {
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)])
                .collect();
            let labels: Vec<Vec<String>> = (0..n)
                .map(|i| vec![format!("g{}", if i < m { i } else { rng.gen_range(0..m) })])
                .collect();
            let ds = Dataset::from_points(MetricKind::Euclidean, points, labels).unwrap();
            if ds.num_groups() != m {
                continue;
            }
            let counts: Vec<usize> = (0..m)
                .map(|g| rng.gen_range(1..=ds.members(GroupId(g)).len().min(2)))
                .collect();
            let spec = FairnessSpec::new(counts);
            if spec.validate(&ds).is_ok() && spec.k_total() < n {
                return (ds, spec);
            }
        }
    }

    #[test]
    fn driver_stays_within_three_times_the_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..25 {
            let (ds, spec) = random_disjoint(&mut rng, 10, 2);
            let opt = oracle_fair_kcenter(&ds, &spec, DEFAULT_BUDGET).unwrap();
            let res = fair_kcenter(&ds, &spec, SearchStrategy::Discrete, trial).unwrap();
            assert!(!res.aborted);
            assert_eq!(res.per_group_counts, spec.counts());
            assert!(
                res.radius <= 3.0 * opt.opt_value + 1e-9,
                "trial {trial}: {} vs 3 * {}",
                res.radius,
                opt.opt_value
            );
        }
    }

    #[test]
    fn single_group_matches_classic_greedy_quality() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for trial in 0..15 {
            let (ds, _) = random_disjoint(&mut rng, 9, 1);
            let k = rng.gen_range(1..4usize);
            let spec = FairnessSpec::new(vec![k]);
            if spec.validate(&ds).is_err() || k >= ds.len() {
                continue;
            }
            let opt = oracle_fair_kcenter(&ds, &spec, DEFAULT_BUDGET).unwrap();
            let res = fair_kcenter(&ds, &spec, SearchStrategy::Discrete, trial).unwrap();
            assert!(res.radius <= 3.0 * opt.opt_value + 1e-9);
        }
    }

    #[test]
    fn continuous_search_works() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let (ds, spec) = random_disjoint(&mut rng, 10, 2);
        let opt = oracle_fair_kcenter(&ds, &spec, DEFAULT_BUDGET).unwrap();
        let res = fair_kcenter(&ds, &spec, SearchStrategy::Continuous { eps: 0.05 }, 1).unwrap();
        assert!(res.radius <= 3.0 * 1.05 * opt.opt_value + 1e-9);
    }

    /// On a six-point line with one center per color the clustering optimum
    /// and the diversity optimum are different sets, and the two solvers
    /// land on different answers as well.
    #[test]
    fn clustering_and_diversity_optima_differ() {
        let ds = line(
            &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            &["w", "w", "w", "b", "b", "b"],
        );
        let spec = FairnessSpec::new(vec![1, 1]);
        let copt = oracle_fair_kcenter(&ds, &spec, DEFAULT_BUDGET).unwrap();
        let dopt = oracle_fair_maxmin(&ds, &spec, DEFAULT_BUDGET).unwrap();
        assert_eq!(copt.witness, vec![ElementId(1), ElementId(4)]);
        assert_eq!(dopt.witness, vec![ElementId(0), ElementId(5)]);
        assert_ne!(copt.witness, dopt.witness);

        let cres = fair_kcenter(&ds, &spec, SearchStrategy::Discrete, 0).unwrap();
        let dres = fair_flow(&ds, &spec, SearchStrategy::Discrete, 0).unwrap();
        let mut c = cres.centers.clone();
        c.sort_unstable();
        let mut d = dres.chosen.clone();
        d.sort_unstable();
        assert_ne!(c, d, "solvers should separate on this configuration");
    }
}
