//! Exact brute-force reference solvers for small instances.
//!
//! These establish ground truth for the approximation bounds of every
//! heuristic in this crate. They are exponential and guarded by an explicit
//! enumeration budget.

use crate::combo::{binomial, Combinations};
use crate::dataset::{Dataset, ElementId, FairnessSpec, GroupMode};
use crate::error::{Error, Result};

/// Default cap on the number of candidate sets an exhaustive pass may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Exact optimum over all feasible selections.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub opt_value: f64,
    /// Lexicographically smallest optimal subset, ascending ids.
    pub witness: Vec<ElementId>,
    /// Number of feasible candidate sets enumerated.
    pub enumerated: u64,
}

/// Maximum diversity over all selections meeting the fairness constraints:
/// exact counts in disjoint mode, lower bounds (with any selection size up
/// to the sum of the counts) in overlapping mode.
pub fn oracle_fair_maxmin(ds: &Dataset, spec: &FairnessSpec, budget: u64) -> Result<OracleResult> {
    spec.validate(ds)?;
    match ds.mode() {
        GroupMode::Disjoint => disjoint_maxmin(ds, spec, budget),
        GroupMode::Overlapping => overlapping_maxmin(ds, spec, budget),
    }
}

/// Maximum diversity over all `k`-subsets, ignoring group labels.
pub fn oracle_maxmin_unconstrained(ds: &Dataset, k: usize, budget: u64) -> Result<OracleResult> {
    if k == 0 || k > ds.len() {
        return Err(Error::Infeasible(format!(
            "cannot select {k} of {} elements",
            ds.len()
        )));
    }
    let required = binomial(ds.len() as u64, k as u64);
    check_budget(required, budget)?;

    let all: Vec<ElementId> = ds.element_ids().collect();
    let mut best = Best::new();
    let mut enumerated = 0u64;
    for combo in Combinations::new(all.len(), k) {
        enumerated += 1;
        let ids: Vec<ElementId> = combo.iter().map(|&i| all[i]).collect();
        let div = set_diversity(ds, &ids);
        best.offer(div, &ids);
    }
    best.into_result(ds, enumerated)
}

/// Minimum covering radius over all fair center sets (disjoint mode).
pub fn oracle_fair_kcenter(ds: &Dataset, spec: &FairnessSpec, budget: u64) -> Result<OracleResult> {
    spec.validate(ds)?;
    if ds.mode() != GroupMode::Disjoint {
        return Err(Error::Infeasible(
            "the clustering oracle requires disjoint groups".into(),
        ));
    }
    let mut required: u128 = 1;
    for g in ds.group_ids() {
        required = required
            .saturating_mul(binomial(ds.members(g).len() as u64, spec.count(g) as u64));
    }
    check_budget(required, budget)?;

    let mut best: Option<(f64, Vec<ElementId>)> = None;
    let mut enumerated = 0u64;
    let all: Vec<ElementId> = ds.element_ids().collect();
    for_each_fair_set(ds, spec, &mut |centers| {
        enumerated += 1;
        let radius = covering_radius(ds, &all, centers);
        let mut sorted = centers.to_vec();
        sorted.sort_unstable();
        match &best {
            Some((r, w)) if radius > *r || (radius == *r && sorted >= *w) => {}
            _ => best = Some((radius, sorted)),
        }
    });
    let (opt_value, witness) =
        best.ok_or_else(|| Error::Infeasible("no feasible center set".into()))?;
    Ok(OracleResult {
        opt_value,
        witness,
        enumerated,
    })
}

/// Covering radius of `centers` over `universe`: the largest distance from
/// any element to its nearest center.
pub fn covering_radius(ds: &Dataset, universe: &[ElementId], centers: &[ElementId]) -> f64 {
    let mut radius: f64 = 0.0;
    for &u in universe {
        let d = centers
            .iter()
            .map(|&c| ds.distance(u, c))
            .fold(f64::INFINITY, f64::min);
        if d > radius {
            radius = d;
        }
    }
    radius
}

fn check_budget(required: u128, budget: u64) -> Result<()> {
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

fn set_diversity(ds: &Dataset, ids: &[ElementId]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let d = ds.distance(ids[i], ids[j]);
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// Tracks the best (diversity, witness) pair; ties resolve toward the
/// lexicographically smallest sorted id sequence.
struct Best {
    value: f64,
    witness: Option<Vec<ElementId>>,
}

impl Best {
    fn new() -> Self {
        Best {
            value: f64::NEG_INFINITY,
            witness: None,
        }
    }

    fn offer(&mut self, div: f64, ids: &[ElementId]) {
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        match &self.witness {
            Some(w) if div < self.value || (div == self.value && sorted >= *w) => {}
            _ => {
                self.value = div;
                self.witness = Some(sorted);
            }
        }
    }

    fn into_result(self, ds: &Dataset, enumerated: u64) -> Result<OracleResult> {
        let witness = self
            .witness
            .ok_or_else(|| Error::Infeasible("no feasible selection".into()))?;
        // independent recomputation; must match the tracked value exactly
        let recomputed = set_diversity(ds, &witness);
        debug_assert_eq!(recomputed, self.value);
        Ok(OracleResult {
            opt_value: recomputed,
            witness,
            enumerated,
        })
    }
}

fn disjoint_maxmin(ds: &Dataset, spec: &FairnessSpec, budget: u64) -> Result<OracleResult> {
    let mut required: u128 = 1;
    for g in ds.group_ids() {
        required = required
            .saturating_mul(binomial(ds.members(g).len() as u64, spec.count(g) as u64));
    }
    check_budget(required, budget)?;

    // Product of per-group combinations with a partial-min prune: once the
    // accumulated min distance drops strictly below the best value found so
    // far, no completion can win (ties survive for the lexicographic pick).
    struct Search<'a> {
        ds: &'a Dataset,
        spec: &'a FairnessSpec,
        best: Best,
        enumerated: u64,
    }

    impl Search<'_> {
        fn rec(&mut self, g: usize, acc: &mut Vec<ElementId>, cur_min: f64) {
            if g == self.ds.num_groups() {
                self.enumerated += 1;
                self.best.offer(cur_min, acc);
                return;
            }
            let complete = g + 1 == self.ds.num_groups();
            let members = self.ds.members(crate::dataset::GroupId(g));
            for combo in Combinations::new(members.len(), self.spec.counts()[g]) {
                let mut m = cur_min;
                let base = acc.len();
                for &i in &combo {
                    let u = members[i];
                    for &v in acc.iter() {
                        let d = self.ds.distance(u, v);
                        if d < m {
                            m = d;
                        }
                    }
                    acc.push(u);
                }
                // fully assembled candidates are always recorded; only
                // partial prefixes that cannot recover get pruned
                if complete || m >= self.best.value {
                    self.rec(g + 1, acc, m);
                }
                acc.truncate(base);
            }
        }
    }

    let mut search = Search {
        ds,
        spec,
        best: Best::new(),
        enumerated: 0,
    };
    let mut acc = Vec::with_capacity(spec.k_total());
    search.rec(0, &mut acc, f64::INFINITY);
    let enumerated = search.enumerated;
    search.best.into_result(ds, enumerated)
}

/// Visit every selection with exactly `k_i` elements per group, as the
/// product of per-group combinations in lexicographic order.
fn for_each_fair_set(ds: &Dataset, spec: &FairnessSpec, visit: &mut impl FnMut(&[ElementId])) {
    fn rec(
        ds: &Dataset,
        spec: &FairnessSpec,
        g: usize,
        acc: &mut Vec<ElementId>,
        visit: &mut impl FnMut(&[ElementId]),
    ) {
        if g == ds.num_groups() {
            visit(acc);
            return;
        }
        let members = ds.members(crate::dataset::GroupId(g));
        for combo in Combinations::new(members.len(), spec.counts()[g]) {
            let base = acc.len();
            acc.extend(combo.iter().map(|&i| members[i]));
            rec(ds, spec, g + 1, acc, visit);
            acc.truncate(base);
        }
    }
    let mut acc = Vec::with_capacity(spec.k_total());
    rec(ds, spec, 0, &mut acc, visit);
}

fn overlapping_maxmin(ds: &Dataset, spec: &FairnessSpec, budget: u64) -> Result<OracleResult> {
    let n = ds.len() as u64;
    let k = spec.k_total() as u64;
    if k == 0 {
        return Err(Error::Infeasible("no elements requested".into()));
    }
    // Any feasible selection contains a minimal feasible one of size at most
    // the sum of the counts, and shrinking never lowers the diversity, so
    // enumerating subsets up to that size is exhaustive for the optimum.
    let mut required: u128 = 0;
    for s in 1..=k.min(n) {
        required = required.saturating_add(binomial(n, s));
    }
    check_budget(required, budget)?;

    let all: Vec<ElementId> = ds.element_ids().collect();
    let mut best = Best::new();
    let mut enumerated = 0u64;
    for s in 1..=(k as usize).min(all.len()) {
        for combo in Combinations::new(all.len(), s) {
            let ids: Vec<ElementId> = combo.iter().map(|&i| all[i]).collect();
            let mut counts = vec![0usize; ds.num_groups()];
            for &u in &ids {
                for g in ds.memberships(u) {
                    counts[g.0] += 1;
                }
            }
            if counts
                .iter()
                .zip(spec.counts())
                .all(|(have, need)| have >= need)
            {
                enumerated += 1;
                best.offer(set_diversity(ds, &ids), &ids);
            }
        }
    }
    best.into_result(ds, enumerated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::MetricKind;

    fn line(points: &[f64], labels: &[&str]) -> Dataset {
        Dataset::from_points(
            MetricKind::Euclidean,
            points.iter().map(|&x| vec![x]).collect(),
            labels.iter().map(|&l| vec![l.to_string()]).collect(),
        )
        .unwrap()
    }

    fn ids(xs: &[usize]) -> Vec<ElementId> {
        xs.iter().map(|&x| ElementId(x)).collect()
    }

    #[test]
    fn line_instance_three_feasible_sets() {
        // blacks at 0, 4, 10 and one white at 4.5; two blacks and one white
        let ds = line(&[0.0, 4.0, 10.0, 4.5], &["black", "black", "black", "white"]);
        let spec = FairnessSpec::new(vec![2, 1]);
        let r = oracle_fair_maxmin(&ds, &spec, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.enumerated, 3);
        assert_eq!(r.opt_value, 4.5);
        assert_eq!(r.witness, ids(&[0, 2, 3]));
    }

    #[test]
    fn single_feasible_set_when_counts_equal_group_sizes() {
        let ds = line(&[0.0, 4.0, 10.0], &["a", "a", "b"]);
        let spec = FairnessSpec::new(vec![2, 1]);
        let r = oracle_fair_maxmin(&ds, &spec, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.enumerated, 1);
        let all: Vec<_> = ds.element_ids().collect();
        assert_eq!(r.opt_value, ds.diversity(&all).unwrap());
        assert_eq!(r.witness, all);
    }

    #[test]
    fn overlapping_optimum_may_use_fewer_elements() {
        // A far-out bi-colored element covers both groups at once: the
        // optimum pairs it with the farthest white and uses two elements
        // for summed counts of three.
        let ds = Dataset::from_points(
            MetricKind::Euclidean,
            vec![vec![0.0], vec![0.5], vec![1.0], vec![50.0], vec![100.0]],
            vec![
                vec!["w".into()],
                vec!["w".into(), "b".into()],
                vec!["b".into()],
                vec!["b".into()],
                vec!["w".into(), "b".into()],
            ],
        )
        .unwrap();
        assert_eq!(ds.mode(), GroupMode::Overlapping);
        let spec = FairnessSpec::new(vec![2, 1]); // two whites, one black
        let r = oracle_fair_maxmin(&ds, &spec, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.witness, ids(&[0, 4]));
        assert_eq!(r.opt_value, 100.0);
    }

    #[test]
    fn budget_refusal_names_the_count() {
        let pts: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let labels: Vec<&str> = (0..20).map(|_| "a").collect();
        let ds = line(&pts, &labels);
        let spec = FairnessSpec::new(vec![10]);
        match oracle_fair_maxmin(&ds, &spec, 100) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, binomial(20, 10));
                assert_eq!(budget, 100);
            }
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn kcenter_every_point_a_center_means_radius_zero() {
        let ds = line(&[0.0, 4.0, 10.0], &["a", "a", "b"]);
        let spec = FairnessSpec::new(vec![2, 1]);
        let r = oracle_fair_kcenter(&ds, &spec, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.opt_value, 0.0);
    }

    #[test]
    fn kcenter_three_tight_clusters() {
        // three clusters of two points each, one center per group
        let pts = vec![0.0, 0.1, 10.0, 10.1, 20.0, 20.1];
        let labels = ["a", "a", "b", "b", "c", "c"];
        let ds = line(&pts, &labels);
        let spec = FairnessSpec::new(vec![1, 1, 1]);
        let r = oracle_fair_kcenter(&ds, &spec, DEFAULT_BUDGET).unwrap();
        assert!((r.opt_value - 0.1).abs() < 1e-12, "radius {}", r.opt_value);
        assert_eq!(r.enumerated, 8);
    }

    #[test]
    fn witness_objective_matches_opt_exactly() {
        let ds = line(&[0.0, 1.0, 3.0, 7.0, 7.5], &["a", "b", "a", "b", "a"]);
        let spec = FairnessSpec::new(vec![2, 1]);
        let r = oracle_fair_maxmin(&ds, &spec, DEFAULT_BUDGET).unwrap();
        assert_eq!(ds.diversity(&r.witness).unwrap(), r.opt_value);
        let rk = oracle_fair_kcenter(&ds, &spec, DEFAULT_BUDGET).unwrap();
        let all: Vec<_> = ds.element_ids().collect();
        assert_eq!(covering_radius(&ds, &all, &rk.witness), rk.opt_value);
    }
}
