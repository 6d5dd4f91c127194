//! Datasets, distances, fairness constraints, and selection results.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense internal index of an element, `0..n`.
///
/// External string identifiers are kept alongside the dataset and mapped at
/// the I/O boundary; everything inside the solvers works on these indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementId(pub usize);

/// Dense index of a group, `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupId(pub usize);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricKind {
    Euclidean,
    Manhattan,
}

/// Whether every element carries exactly one group label or possibly several.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupMode {
    Disjoint,
    Overlapping,
}

#[derive(Debug, Clone)]
enum DistanceStore {
    Metric { kind: MetricKind, points: Vec<Vec<f64>> },
    /// Row-major `n * n` matrix. Symmetry and the triangle inequality are
    /// validated on demand, see [`Dataset::validate_pseudometric`].
    Matrix { values: Vec<f64>, n: usize },
}

/// An immutable point collection with group labels and a distance source.
///
/// All accessors are pure reads; a `Dataset` can be shared freely across
/// threads once built.
pub struct Dataset {
    external_ids: Vec<String>,
    group_labels: Vec<String>,
    memberships: Vec<Vec<GroupId>>,
    members: Vec<Vec<ElementId>>,
    mode: GroupMode,
    store: DistanceStore,
    evals: AtomicU64,
}

impl Clone for Dataset {
    fn clone(&self) -> Self {
        Dataset {
            external_ids: self.external_ids.clone(),
            group_labels: self.group_labels.clone(),
            memberships: self.memberships.clone(),
            members: self.members.clone(),
            mode: self.mode,
            store: self.store.clone(),
            evals: AtomicU64::new(0),
        }
    }
}

impl fmt::Debug for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dataset")
            .field("n", &self.len())
            .field("m", &self.num_groups())
            .field("mode", &self.mode)
            .finish()
    }
}

/// Step-by-step construction of a [`Dataset`].
pub struct DatasetBuilder {
    source: Option<DistanceStore>,
    memberships: Vec<Vec<String>>,
    external_ids: Option<Vec<String>>,
    mode: Option<GroupMode>,
}

impl DatasetBuilder {
    pub fn points(mut self, kind: MetricKind, points: Vec<Vec<f64>>) -> Self {
        self.source = Some(DistanceStore::Metric { kind, points });
        self
    }

    /// Precomputed distance matrix, one row per element.
    pub fn matrix(mut self, rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let values = rows.into_iter().flatten().collect();
        self.source = Some(DistanceStore::Matrix { values, n });
        self
    }

    /// Group labels per element; an element may carry several labels.
    pub fn memberships(mut self, memberships: Vec<Vec<String>>) -> Self {
        self.memberships = memberships;
        self
    }

    pub fn external_ids(mut self, ids: Vec<String>) -> Self {
        self.external_ids = Some(ids);
        self
    }

    /// Force the group mode instead of inferring it from the labels.
    pub fn mode(mut self, mode: GroupMode) -> Self {
        self.mode = Some(mode);
        self
    }

    pub fn build(self) -> Result<Dataset> {
        let store = self
            .source
            .ok_or_else(|| Error::InvalidDataset("no point or matrix source given".into()))?;
        let n = match &store {
            DistanceStore::Metric { points, .. } => points.len(),
            DistanceStore::Matrix { n, .. } => *n,
        };
        if n == 0 {
            return Err(Error::InvalidDataset("dataset is empty".into()));
        }
        match &store {
            DistanceStore::Metric { points, .. } => {
                let dim = points[0].len();
                if dim == 0 {
                    return Err(Error::InvalidDataset("zero-dimensional points".into()));
                }
                for (i, p) in points.iter().enumerate() {
                    if p.len() != dim {
                        return Err(Error::InvalidDataset(format!(
                            "point {i} has dimension {} but expected {dim}",
                            p.len()
                        )));
                    }
                    if p.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidDataset(format!(
                            "point {i} has a non-finite coordinate"
                        )));
                    }
                }
            }
            DistanceStore::Matrix { values, n } => {
                if values.len() != n * n {
                    return Err(Error::InvalidDataset(format!(
                        "distance matrix is not square: {} values for n={n}",
                        values.len()
                    )));
                }
                for (i, v) in values.iter().enumerate() {
                    if !v.is_finite() || *v < 0.0 {
                        return Err(Error::InvalidDataset(format!(
                            "matrix entry ({}, {}) = {v} is not a finite non-negative number",
                            i / n,
                            i % n
                        )));
                    }
                }
            }
        }

        if self.memberships.len() != n {
            return Err(Error::InvalidDataset(format!(
                "{} membership rows for {n} elements",
                self.memberships.len()
            )));
        }

        // Group indices follow first appearance so that file order is stable.
        let mut label_index: HashMap<String, GroupId> = HashMap::new();
        let mut group_labels: Vec<String> = Vec::new();
        let mut memberships: Vec<Vec<GroupId>> = Vec::with_capacity(n);
        for (i, labels) in self.memberships.into_iter().enumerate() {
            if labels.is_empty() {
                return Err(Error::InvalidDataset(format!("element {i} has no group label")));
            }
            let mut gs: Vec<GroupId> = Vec::with_capacity(labels.len());
            for label in labels {
                let next = GroupId(group_labels.len());
                let g = *label_index.entry(label.clone()).or_insert_with(|| {
                    group_labels.push(label);
                    next
                });
                gs.push(g);
            }
            gs.sort_unstable();
            gs.dedup();
            memberships.push(gs);
        }

        let has_multi = memberships.iter().any(|gs| gs.len() > 1);
        let mode = match self.mode {
            Some(GroupMode::Disjoint) if has_multi => {
                return Err(Error::InvalidDataset(
                    "disjoint mode requested but some element has several labels".into(),
                ))
            }
            Some(mode) => mode,
            None => {
                if has_multi {
                    GroupMode::Overlapping
                } else {
                    GroupMode::Disjoint
                }
            }
        };

        let external_ids = match self.external_ids {
            Some(ids) => {
                if ids.len() != n {
                    return Err(Error::InvalidDataset(format!(
                        "{} external ids for {n} elements",
                        ids.len()
                    )));
                }
                let mut seen: HashMap<&str, usize> = HashMap::new();
                for (i, id) in ids.iter().enumerate() {
                    if let Some(prev) = seen.insert(id, i) {
                        return Err(Error::InvalidDataset(format!(
                            "duplicate external id {id:?} (rows {prev} and {i})"
                        )));
                    }
                }
                ids
            }
            None => (0..n).map(|i| i.to_string()).collect(),
        };

        let mut members = vec![Vec::new(); group_labels.len()];
        for (i, gs) in memberships.iter().enumerate() {
            for g in gs {
                members[g.0].push(ElementId(i));
            }
        }

        Ok(Dataset {
            external_ids,
            group_labels,
            memberships,
            members,
            mode,
            store,
            evals: AtomicU64::new(0),
        })
    }
}

impl Dataset {
    pub fn builder() -> DatasetBuilder {
        DatasetBuilder {
            source: None,
            memberships: Vec::new(),
            external_ids: None,
            mode: None,
        }
    }

    /// Feature-vector dataset with auto-generated external ids and inferred mode.
    pub fn from_points(
        kind: MetricKind,
        points: Vec<Vec<f64>>,
        memberships: Vec<Vec<String>>,
    ) -> Result<Dataset> {
        Dataset::builder().points(kind, points).memberships(memberships).build()
    }

    /// Matrix-backed dataset with auto-generated external ids and inferred mode.
    pub fn from_matrix(rows: Vec<Vec<f64>>, memberships: Vec<Vec<String>>) -> Result<Dataset> {
        Dataset::builder().matrix(rows).memberships(memberships).build()
    }

    pub fn len(&self) -> usize {
        self.memberships.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_groups(&self) -> usize {
        self.group_labels.len()
    }

    pub fn mode(&self) -> GroupMode {
        self.mode
    }

    pub fn element_ids(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.len()).map(ElementId)
    }

    pub fn group_ids(&self) -> impl Iterator<Item = GroupId> + '_ {
        (0..self.num_groups()).map(GroupId)
    }

    pub fn group_label(&self, g: GroupId) -> &str {
        &self.group_labels[g.0]
    }

    pub fn group_by_label(&self, label: &str) -> Option<GroupId> {
        self.group_labels.iter().position(|l| l == label).map(GroupId)
    }

    /// Elements of group `g`, in ascending id order.
    pub fn members(&self, g: GroupId) -> &[ElementId] {
        &self.members[g.0]
    }

    /// Sorted, deduplicated group labels of element `u`.
    pub fn memberships(&self, u: ElementId) -> &[GroupId] {
        &self.memberships[u.0]
    }

    pub fn external_id(&self, u: ElementId) -> &str {
        &self.external_ids[u.0]
    }

    pub fn element_by_external_id(&self, id: &str) -> Option<ElementId> {
        self.external_ids.iter().position(|e| e == id).map(ElementId)
    }

    /// Feature vector of `u`, if this dataset is point-backed.
    pub fn point(&self, u: ElementId) -> Option<&[f64]> {
        match &self.store {
            DistanceStore::Metric { points, .. } => Some(&points[u.0]),
            DistanceStore::Matrix { .. } => None,
        }
    }

    pub fn metric_kind(&self) -> Option<MetricKind> {
        match &self.store {
            DistanceStore::Metric { kind, .. } => Some(*kind),
            DistanceStore::Matrix { .. } => None,
        }
    }

    pub fn is_matrix_backed(&self) -> bool {
        matches!(self.store, DistanceStore::Matrix { .. })
    }

    /// Distance between two elements. Panics if an id is out of range.
    ///
    /// Metric sources are evaluated on demand; nothing is materialized.
    pub fn distance(&self, u: ElementId, v: ElementId) -> f64 {
        self.evals.fetch_add(1, Ordering::Relaxed);
        match &self.store {
            DistanceStore::Metric { kind, points } => {
                let a = &points[u.0];
                let b = &points[v.0];
                match kind {
                    MetricKind::Euclidean => a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                        .sqrt(),
                    MetricKind::Manhattan => {
                        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
                    }
                }
            }
            DistanceStore::Matrix { values, n } => {
                assert!(u.0 < *n && v.0 < *n, "element id out of range");
                values[u.0 * n + v.0]
            }
        }
    }

    /// Number of distance evaluations performed so far on this dataset.
    pub fn distance_evals(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    /// Minimum pairwise distance of `ids`; positive infinity for a singleton.
    ///
    /// Fails on an empty slice. The computation is a direct double loop so it
    /// can double as an independent check of solver-reported diversities.
    pub fn diversity(&self, ids: &[ElementId]) -> Result<f64> {
        if ids.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mut best = f64::INFINITY;
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                let d = self.distance(ids[i], ids[j]);
                if d < best {
                    best = d;
                }
            }
        }
        Ok(best)
    }

    /// Check symmetry, zero diagonal, and the triangle inequality of a
    /// precomputed matrix. The triangle check is exhaustive for `n <= 500`
    /// and samples seeded random triples above that.
    ///
    /// `tolerance` is relative: `a` violates a bound `b` when
    /// `a > b + tolerance * max(1, |b|)`. The result is a report, never an
    /// error; use [`MetricReport::is_clean`].
    pub fn validate_pseudometric(&self, tolerance: f64) -> Result<MetricReport> {
        let (values, n) = match &self.store {
            DistanceStore::Matrix { values, n } => (values, *n),
            DistanceStore::Metric { .. } => {
                return Err(Error::Infeasible(
                    "pseudometric validation applies to matrix-backed datasets only".into(),
                ))
            }
        };
        let exceeds = |lhs: f64, rhs: f64| lhs > rhs + tolerance * rhs.abs().max(1.0);
        let mut report = MetricReport::new();
        let at = |u: usize, v: usize| values[u * n + v];

        for u in 0..n {
            if exceeds(at(u, u).abs(), 0.0) {
                report.push(MetricViolation::NonzeroDiagonal { u, value: at(u, u) });
            }
        }

        let max_pairs: u64 = 4_000_000;
        if (n as u64) * (n as u64) <= max_pairs {
            for u in 0..n {
                for v in u + 1..n {
                    report.pairs_checked += 1;
                    if exceeds((at(u, v) - at(v, u)).abs(), 0.0) {
                        report.push(MetricViolation::Asymmetry {
                            u,
                            v,
                            forward: at(u, v),
                            backward: at(v, u),
                        });
                    }
                }
            }
        } else {
            report.exhaustive = false;
            let mut rng = ChaCha8Rng::seed_from_u64(0x5f3759df);
            for _ in 0..max_pairs {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                report.pairs_checked += 1;
                if exceeds((at(u, v) - at(v, u)).abs(), 0.0) {
                    report.push(MetricViolation::Asymmetry {
                        u,
                        v,
                        forward: at(u, v),
                        backward: at(v, u),
                    });
                }
            }
        }

        if n <= 500 {
            for u in 0..n {
                for v in 0..n {
                    for w in 0..n {
                        report.triples_checked += 1;
                        if exceeds(at(u, v), at(u, w) + at(w, v)) {
                            report.push(MetricViolation::TriangleInequality {
                                u,
                                v,
                                w,
                                direct: at(u, v),
                                via: at(u, w) + at(w, v),
                            });
                        }
                    }
                }
            }
        } else {
            report.exhaustive = false;
            let mut rng = ChaCha8Rng::seed_from_u64(0x2545f491);
            for _ in 0..2_000_000u64 {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                let w = rng.gen_range(0..n);
                report.triples_checked += 1;
                if exceeds(at(u, v), at(u, w) + at(w, v)) {
                    report.push(MetricViolation::TriangleInequality {
                        u,
                        v,
                        w,
                        direct: at(u, v),
                        via: at(u, w) + at(w, v),
                    });
                }
            }
        }
        Ok(report)
    }
}

/// Default relative tolerance for pseudometric validation.
pub const DEFAULT_METRIC_TOLERANCE: f64 = 1e-9;

const MAX_REPORTED_VIOLATIONS: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub enum MetricViolation {
    Asymmetry { u: usize, v: usize, forward: f64, backward: f64 },
    NonzeroDiagonal { u: usize, value: f64 },
    TriangleInequality { u: usize, v: usize, w: usize, direct: f64, via: f64 },
}

/// Outcome of [`Dataset::validate_pseudometric`]. Keeps at most the first
/// hundred violations verbatim plus a total count.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub violations: Vec<MetricViolation>,
    pub total_violations: u64,
    pub pairs_checked: u64,
    pub triples_checked: u64,
    pub exhaustive: bool,
}

impl MetricReport {
    fn new() -> Self {
        MetricReport {
            violations: Vec::new(),
            total_violations: 0,
            pairs_checked: 0,
            triples_checked: 0,
            exhaustive: true,
        }
    }

    fn push(&mut self, v: MetricViolation) {
        self.total_violations += 1;
        if self.violations.len() < MAX_REPORTED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    pub fn is_clean(&self) -> bool {
        self.total_violations == 0
    }
}

/// Required number of selected elements per group.
///
/// In disjoint mode the counts are met exactly; in overlapping mode they are
/// lower bounds and the selection size may differ from their sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairnessSpec {
    counts: Vec<usize>,
}

impl FairnessSpec {
    pub fn new(counts: Vec<usize>) -> Self {
        FairnessSpec { counts }
    }

    pub fn count(&self, g: GroupId) -> usize {
        self.counts[g.0]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn k_total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Check the spec against a dataset: one count per group, each count
    /// within its group size, and (disjoint mode) at least one element total.
    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        if self.counts.len() != ds.num_groups() {
            return Err(Error::Infeasible(format!(
                "{} group counts for {} groups",
                self.counts.len(),
                ds.num_groups()
            )));
        }
        for g in ds.group_ids() {
            let k = self.count(g);
            let avail = ds.members(g).len();
            if k > avail {
                return Err(Error::Infeasible(format!(
                    "group {:?} has {avail} elements but {k} are required",
                    ds.group_label(g)
                )));
            }
        }
        if ds.mode() == GroupMode::Disjoint && self.k_total() == 0 {
            return Err(Error::Infeasible("no elements requested".into()));
        }
        Ok(())
    }
}

/// Result of a diversification solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub algorithm: String,
    /// Chosen elements in the order the solver produced them.
    pub chosen: Vec<ElementId>,
    /// Minimum pairwise distance of `chosen`, recomputed independently of the
    /// solver's internals. Positive infinity for singletons and negative
    /// infinity for aborted probes.
    pub diversity: f64,
    pub per_group_counts: Vec<usize>,
    pub gamma_used: Option<f64>,
    pub aborted: bool,
    /// Number of guesses evaluated by the driving search, 1 for direct solvers.
    pub probes: usize,
    /// Set when a search driver observed a guess aborting below a feasible one.
    #[serde(default)]
    pub non_monotone_gamma: bool,
}

impl Selection {
    pub(crate) fn from_chosen(
        ds: &Dataset,
        algorithm: &str,
        chosen: Vec<ElementId>,
        gamma_used: Option<f64>,
        probes: usize,
    ) -> Selection {
        let diversity = if chosen.is_empty() {
            f64::INFINITY
        } else {
            ds.diversity(&chosen).expect("non-empty selection")
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
            gamma_used,
            aborted: false,
            probes,
            non_monotone_gamma: false,
        }
    }

    pub(crate) fn aborted(ds: &Dataset, algorithm: &str, gamma_used: Option<f64>) -> Selection {
        Selection {
            algorithm: algorithm.to_string(),
            chosen: Vec::new(),
            diversity: f64::NEG_INFINITY,
            per_group_counts: vec![0; ds.num_groups()],
            gamma_used,
            aborted: true,
            probes: 1,
            non_monotone_gamma: false,
        }
    }
}
