//! Fair diversification when elements may belong to several groups.
//!
//! Elements are partitioned into intersection classes by their exact label
//! set; selecting one element of class `L` advances `|L|` constraints at
//! once, so the constraints become lower bounds and a solution may use fewer
//! elements than the summed counts.

use std::collections::HashMap;

use crate::combo::binomial;
use crate::dataset::{Dataset, ElementId, FairnessSpec, GroupId, Selection};
use crate::error::{Error, Result};
use crate::flow::{conflict_components, FlowNetwork};
use crate::gmm::{derive_seed, gmm_threshold};
use crate::search::{
    geometric_grid, search_largest_feasible, sorted_guesses, SearchStrategy,
};

pub const ALG_FAIR_SWAP_OVERLAP: &str = "fair-swap-overlap";
pub const ALG_FAIR_FLOW_OVERLAP: &str = "fair-flow-overlap";

/// Largest group count the overlapping flow solver accepts by default; the
/// number of flow guesses grows as `k^(2^m - 1 - m)`.
pub const DEFAULT_M_CAP: usize = 4;

/// A set of group indices packed into a bitmask. Supports up to 32 groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet(pub u32);

impl LabelSet {
    pub fn from_groups(groups: &[GroupId]) -> LabelSet {
        let mut mask = 0u32;
        for g in groups {
            assert!(g.0 < 32, "label sets support at most 32 groups");
            mask |= 1 << g.0;
        }
        LabelSet(mask)
    }

    pub fn full(m: usize) -> LabelSet {
        assert!(m <= 32);
        LabelSet(if m == 32 { u32::MAX } else { (1u32 << m) - 1 })
    }

    pub fn contains(&self, g: GroupId) -> bool {
        self.0 & (1 << g.0) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(&self, other: &LabelSet) -> bool {
        self.0 & other.0 == self.0
    }

    pub fn groups(&self) -> impl Iterator<Item = GroupId> + '_ {
        (0..32).filter(|i| self.0 & (1 << i) != 0).map(GroupId)
    }

    /// Order by the sorted group-index sequence, not by the raw mask.
    pub fn seq_cmp(&self, other: &LabelSet) -> std::cmp::Ordering {
        self.groups().cmp(other.groups())
    }
}

/// Elements whose label set is exactly `labels`; the classes partition the
/// universe.
#[derive(Debug, Clone)]
pub struct IntersectionClass {
    pub labels: LabelSet,
    pub members: Vec<ElementId>,
}

/// Partition the dataset into intersection classes, ordered by decreasing
/// label-set size and lexicographically within a size. That is exactly the
/// order in which the flow solver carves out its candidate sets.
pub fn partition_into_classes(ds: &Dataset) -> Vec<IntersectionClass> {
    let mut map: HashMap<LabelSet, Vec<ElementId>> = HashMap::new();
    for u in ds.element_ids() {
        let mask = LabelSet::from_groups(ds.memberships(u));
        map.entry(mask).or_default().push(u);
    }
    let mut classes: Vec<IntersectionClass> = map
        .into_iter()
        .map(|(labels, members)| IntersectionClass { labels, members })
        .collect();
    classes.sort_by(|a, b| {
        b.labels
            .len()
            .cmp(&a.labels.len())
            .then(a.labels.seq_cmp(&b.labels))
    });
    for class in &mut classes {
        class.members.sort_unstable();
    }
    classes
}

/// Largest antichain over subsets of `[m]`: no member contains another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpernerBound {
    pub m: u32,
    pub antichain_max: u64,
}

impl SpernerBound {
    pub fn new(m: u32) -> SpernerBound {
        SpernerBound {
            m,
            antichain_max: binomial(m as u64, (m / 2) as u64) as u64,
        }
    }
}

/// A conjectured number of selected elements per intersection class. The
/// counts run parallel to a [`partition_into_classes`] result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowGuess {
    pub counts: Vec<usize>,
}

impl FlowGuess {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Feasibility against the fairness constraints: summed over the classes
    /// containing each group, the counts must reach that group's requirement.
    pub fn satisfies(&self, classes: &[IntersectionClass], spec: &FairnessSpec) -> bool {
        (0..spec.counts().len()).all(|g| {
            let got: usize = classes
                .iter()
                .zip(&self.counts)
                .filter(|(c, _)| c.labels.contains(GroupId(g)))
                .map(|(_, &n)| n)
                .sum();
            got >= spec.counts()[g]
        })
    }
}

/// When every group count is at most one, a single element carrying every
/// required label (or the empty set, if nothing is required) satisfies the
/// constraints outright and is optimal under the infinite-singleton
/// diversity convention. Guess-driven probes cannot reach those degenerate
/// optima, so the drivers handle them up front.
fn trivial_cover(ds: &Dataset, spec: &FairnessSpec) -> Option<Vec<ElementId>> {
    if spec.counts().iter().any(|&k| k > 1) {
        return None;
    }
    if spec.k_total() == 0 {
        return Some(Vec::new());
    }
    let support: Vec<GroupId> = ds.group_ids().filter(|&g| spec.count(g) == 1).collect();
    ds.element_ids()
        .find(|&u| support.iter().all(|g| ds.memberships(u).contains(g)))
        .map(|u| vec![u])
}

/// Guess policy for the swap-based overlapping solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OverlapSwapSearch {
    /// Binary-search all pairwise distances of the universe.
    Discrete,
    /// Evaluate a single caller-supplied guess.
    FixedGamma(f64),
}

struct SwapOverlapContext<'a> {
    ds: &'a Dataset,
    spec: &'a FairnessSpec,
    seed: u64,
    bi: Vec<ElementId>,
    singles: [Vec<ElementId>; 2],
}

impl<'a> SwapOverlapContext<'a> {
    fn new(ds: &'a Dataset, spec: &'a FairnessSpec, seed: u64) -> Result<Self> {
        spec.validate(ds)?;
        if ds.num_groups() != 2 {
            return Err(Error::Infeasible(format!(
                "the overlapping swap solver handles exactly two groups, got {}",
                ds.num_groups()
            )));
        }
        let mut bi = Vec::new();
        let mut singles: [Vec<ElementId>; 2] = [Vec::new(), Vec::new()];
        for class in partition_into_classes(ds) {
            if class.labels.len() == 2 {
                bi = class.members;
            } else {
                let g = class.labels.groups().next().unwrap();
                singles[g.0] = class.members;
            }
        }
        Ok(SwapOverlapContext {
            ds,
            spec,
            seed,
            bi,
            singles,
        })
    }

    fn probe(&self, gamma: f64) -> Result<Selection> {
        if gamma.is_nan() || gamma < 0.0 {
            return Err(Error::Infeasible(format!("negative guess {gamma}")));
        }
        let sep = gamma / 4.0;

        // Maximal subset of the bi-labeled class with pairwise distances of
        // at least `sep`. At a zero guess the whole class qualifies.
        let core: Vec<ElementId> = if gamma == 0.0 {
            self.bi.clone()
        } else {
            let st = gmm_threshold(
                self.ds,
                &self.bi,
                &[],
                sep,
                usize::MAX,
                derive_seed(self.seed, 2),
            )?;
            // maximality check: every bi-labeled element left out must sit
            // within `sep` of the kept ones
            for (i, &d) in st.min_dist.iter().enumerate() {
                if !st.selected.contains(&self.bi[i]) && d >= sep {
                    return Err(Error::Internal(format!(
                        "bi-labeled element {:?} at distance {d} was not taken",
                        self.bi[i]
                    )));
                }
            }
            st.selected
        };
        let t = core.len();

        // Everything within `sep` of the core goes; what remains is
        // single-labeled by construction.
        let keep = |u: ElementId| {
            core.iter()
                .map(|&c| self.ds.distance(u, c))
                .all(|d| d >= sep)
        };
        let remaining: [Vec<ElementId>; 2] = [
            self.singles[0].iter().copied().filter(|&u| keep(u)).collect(),
            self.singles[1].iter().copied().filter(|&u| keep(u)).collect(),
        ];

        let targets = [
            self.spec.count(GroupId(0)).saturating_sub(t),
            self.spec.count(GroupId(1)).saturating_sub(t),
        ];
        if targets[0] > remaining[0].len() || targets[1] > remaining[1].len() {
            return Ok(Selection::aborted(self.ds, ALG_FAIR_SWAP_OVERLAP, Some(gamma)));
        }

        let mut chosen = core;
        if targets[0] + targets[1] > 0 {
            let (extra, _) = crate::disjoint::swap_on_subsets(
                self.ds,
                [&remaining[0], &remaining[1]],
                targets,
                derive_seed(self.seed, 3),
            )?;
            chosen.extend(extra);
        }
        Ok(Selection::from_chosen(
            self.ds,
            ALG_FAIR_SWAP_OVERLAP,
            chosen,
            Some(gamma),
            1,
        ))
    }
}

/// Swap-based solver for two possibly overlapping groups. Per guess it keeps
/// a maximal well-separated subset of the bi-labeled class, removes
/// everything nearby, and balances the remaining single-labeled points with
/// the disjoint swap construction. Satisfies every group count as a lower
/// bound.
pub fn fair_swap_overlap(
    ds: &Dataset,
    spec: &FairnessSpec,
    search: OverlapSwapSearch,
    seed: u64,
) -> Result<Selection> {
    let ctx = SwapOverlapContext::new(ds, spec, seed)?;
    if let Some(cover) = trivial_cover(ds, spec) {
        return Ok(Selection::from_chosen(ds, ALG_FAIR_SWAP_OVERLAP, cover, None, 0));
    }
    match search {
        OverlapSwapSearch::FixedGamma(gamma) => ctx.probe(gamma),
        OverlapSwapSearch::Discrete => {
            let mut raw = vec![0.0];
            for i in 0..ds.len() {
                for j in i + 1..ds.len() {
                    let d = ds.distance(ElementId(i), ElementId(j));
                    if d > 0.0 {
                        raw.push(d);
                    }
                }
            }
            let guesses = sorted_guesses(raw);
            let out = search_largest_feasible(&guesses, |g| {
                let sel = ctx.probe(g)?;
                Ok((!sel.aborted, sel))
            })?;
            let mut best: Option<Selection> = None;
            for rec in &out.records {
                if !rec.feasible {
                    continue;
                }
                match &best {
                    Some(b) if rec.result.diversity <= b.diversity => {}
                    _ => best = Some(rec.result.clone()),
                }
            }
            let mut sel = best.ok_or_else(|| {
                Error::Internal("every guess aborted although the request is feasible".into())
            })?;
            sel.probes = out.records.len();
            sel.non_monotone_gamma = out.non_monotone;
            Ok(sel)
        }
    }
}

struct FlowOverlapContext<'a> {
    ds: &'a Dataset,
    spec: &'a FairnessSpec,
    seed: u64,
    classes: Vec<IntersectionClass>,
    antichain_max: f64,
}

impl<'a> FlowOverlapContext<'a> {
    fn new(ds: &'a Dataset, spec: &'a FairnessSpec, seed: u64, m_cap: usize) -> Result<Self> {
        spec.validate(ds)?;
        let m = ds.num_groups();
        if m < 3 {
            return Err(Error::Infeasible(
                "the overlapping flow solver needs at least three groups; use the swap solver below that".into(),
            ));
        }
        if m > m_cap {
            return Err(Error::Infeasible(format!(
                "{m} groups exceed the cap of {m_cap}: the guess space grows as k^(2^m - 1 - m)"
            )));
        }
        let classes = partition_into_classes(ds);
        let antichain_max = SpernerBound::new(m as u32).antichain_max as f64;
        Ok(FlowOverlapContext {
            ds,
            spec,
            seed,
            classes,
            antichain_max,
        })
    }

    fn separation_factor(&self) -> f64 {
        3.0 * self.antichain_max - 1.0
    }

    /// Candidate sets per class at separation `d1`: classes are processed by
    /// decreasing label-set size, and each candidate must keep its distance
    /// to the candidates of every strictly containing class.
    fn carve_candidates(&self, d1: f64) -> Result<Vec<Vec<ElementId>>> {
        let cap = self.spec.k_total().max(1);
        let mut zs: Vec<Vec<ElementId>> = Vec::with_capacity(self.classes.len());
        for (idx, class) in self.classes.iter().enumerate() {
            let mut initial: Vec<ElementId> = Vec::new();
            for (prev_idx, prev) in self.classes.iter().enumerate().take(idx) {
                if class.labels != prev.labels && class.labels.is_subset_of(&prev.labels) {
                    initial.extend_from_slice(&zs[prev_idx]);
                }
            }
            let st = gmm_threshold(
                self.ds,
                &class.members,
                &initial,
                d1,
                cap,
                derive_seed(self.seed, 100 + class.labels.0 as u64),
            )?;
            zs.push(st.selected);
        }
        Ok(zs)
    }

    fn probe(&self, gamma: f64, probes: &mut usize) -> Result<Selection> {
        if gamma.is_nan() || gamma < 0.0 {
            return Err(Error::Infeasible(format!("negative guess {gamma}")));
        }
        let factor = self.separation_factor();
        let d1 = self.antichain_max * gamma / factor;
        let d2 = gamma / factor;

        let zs = self.carve_candidates(d1)?;
        let mut nodes: Vec<(usize, ElementId)> = Vec::new();
        for (c, z) in zs.iter().enumerate() {
            for &u in z {
                nodes.push((c, u));
            }
        }
        let components = conflict_components(self.ds, &nodes, d2);

        // No component may span two comparable classes (equal ones
        // included), and diameters stay below (M - 1) * d2.
        let diameter_bound = (self.antichain_max - 1.0) * d2;
        for comp in &components {
            for i in 0..comp.len() {
                for j in i + 1..comp.len() {
                    let (ca, a) = comp[i];
                    let (cb, b) = comp[j];
                    let la = self.classes[ca].labels;
                    let lb = self.classes[cb].labels;
                    if la.is_subset_of(&lb) || lb.is_subset_of(&la) {
                        return Err(Error::Internal(format!(
                            "component holds comparable classes {la:?} and {lb:?} ({a:?}, {b:?})"
                        )));
                    }
                    let d = self.ds.distance(a, b);
                    if d >= diameter_bound {
                        return Err(Error::Internal(format!(
                            "component diameter violated: d({a:?}, {b:?}) = {d} >= {diameter_bound}"
                        )));
                    }
                }
            }
        }

        let mut incidence: Vec<(usize, usize)> = Vec::new();
        for (c, _) in self.classes.iter().enumerate() {
            for (j, comp) in components.iter().enumerate() {
                if comp.iter().any(|&(cc, _)| cc == c) {
                    incidence.push((c, j));
                }
            }
        }

        // Walk the guessed per-class counts; the first one the network can
        // route wins this gamma.
        let mut iter = GuessIter::new(self.spec, &self.classes);
        while let Some(guess) = iter.next() {
            *probes += 1;
            let caps: Vec<i64> = guess.counts.iter().map(|&c| c as i64).collect();
            let net = FlowNetwork::assignment(&caps, components.len(), &incidence);
            let out = net.max_flow();
            net.verify(&out)?;
            if out.value < guess.total() as i64 {
                continue;
            }
            let mut chosen = Vec::with_capacity(guess.total());
            for (edge, &f) in net.edges().iter().zip(&out.edge_flow) {
                if f == 1 && edge.from != net.source() && edge.to != net.sink() {
                    let c = edge.from - 1;
                    let j = edge.to - 1 - self.classes.len();
                    let mut matches = components[j]
                        .iter()
                        .filter(|&&(cc, _)| cc == c)
                        .map(|&(_, u)| u);
                    let u = matches.next().ok_or_else(|| {
                        Error::Internal("flow edge without a matching candidate".into())
                    })?;
                    if matches.next().is_some() {
                        return Err(Error::Internal(
                            "component holds several candidates of one class".into(),
                        ));
                    }
                    chosen.push(u);
                }
            }
            return Ok(Selection::from_chosen(
                self.ds,
                ALG_FAIR_FLOW_OVERLAP,
                chosen,
                Some(gamma),
                1,
            ));
        }
        Ok(Selection::aborted(self.ds, ALG_FAIR_FLOW_OVERLAP, Some(gamma)))
    }
}

/// Odometer over per-class counts: free values for classes with two or more
/// labels (bounded by the largest group count and the class size), singleton
/// classes filled with exactly what their group still needs.
struct GuessIter<'a> {
    classes: &'a [IntersectionClass],
    spec: &'a FairnessSpec,
    multi: Vec<usize>,
    caps: Vec<usize>,
    current: Vec<usize>,
    singleton_class: HashMap<usize, usize>,
    done: bool,
}

impl<'a> GuessIter<'a> {
    fn new(spec: &'a FairnessSpec, classes: &'a [IntersectionClass]) -> GuessIter<'a> {
        let k_max = spec.counts().iter().copied().max().unwrap_or(0);
        let multi: Vec<usize> = classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.labels.len() >= 2)
            .map(|(i, _)| i)
            .collect();
        let caps: Vec<usize> = multi
            .iter()
            .map(|&i| k_max.min(classes[i].members.len()))
            .collect();
        let mut singleton_class = HashMap::new();
        for (i, class) in classes.iter().enumerate() {
            if class.labels.len() == 1 {
                singleton_class.insert(class.labels.groups().next().unwrap().0, i);
            }
        }
        GuessIter {
            classes,
            spec,
            current: vec![0; multi.len()],
            multi,
            caps,
            singleton_class,
            done: false,
        }
    }

    fn advance(&mut self) {
        for i in 0..self.current.len() {
            if self.current[i] < self.caps[i] {
                self.current[i] += 1;
                return;
            }
            self.current[i] = 0;
        }
        self.done = true;
    }

    fn next(&mut self) -> Option<FlowGuess> {
        loop {
            if self.done {
                return None;
            }
            let mut counts = vec![0usize; self.classes.len()];
            for (pos, &class_idx) in self.multi.iter().enumerate() {
                counts[class_idx] = self.current[pos];
            }
            self.advance();

            // fill singletons with the remaining need of their group
            let mut ok = true;
            for g in 0..self.spec.counts().len() {
                let covered: usize = self
                    .classes
                    .iter()
                    .zip(&counts)
                    .filter(|(c, _)| c.labels.len() >= 2 && c.labels.contains(GroupId(g)))
                    .map(|(_, &n)| n)
                    .sum();
                let need = self.spec.counts()[g].saturating_sub(covered);
                if need == 0 {
                    continue;
                }
                match self.singleton_class.get(&g) {
                    Some(&ci) if self.classes[ci].members.len() >= need => counts[ci] = need,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let guess = FlowGuess { counts };
            debug_assert!(guess.satisfies(self.classes, self.spec));
            return Some(guess);
        }
    }
}

/// Flow-based solver for three or more possibly overlapping groups: carves
/// well-separated candidates per intersection class (prioritizing classes
/// with more labels), then guesses how many selected elements each class
/// contributes and routes the guess through the assignment network. Group
/// counts are satisfied as lower bounds.
pub fn fair_flow_overlap(
    ds: &Dataset,
    spec: &FairnessSpec,
    search: SearchStrategy,
    seed: u64,
    m_cap: usize,
) -> Result<Selection> {
    let ctx = FlowOverlapContext::new(ds, spec, seed, m_cap)?;
    if let Some(cover) = trivial_cover(ds, spec) {
        return Ok(Selection::from_chosen(ds, ALG_FAIR_FLOW_OVERLAP, cover, None, 0));
    }
    let factor = ctx.separation_factor();

    let mut deltas = Vec::new();
    for i in 0..ds.len() {
        for j in i + 1..ds.len() {
            let d = ds.distance(ElementId(i), ElementId(j));
            if d > 0.0 {
                deltas.push(d);
            }
        }
    }
    let mut raw = vec![0.0];
    match search {
        SearchStrategy::Discrete => {
            for &d in &deltas {
                raw.push(d * factor);
                raw.push(d * factor / ctx.antichain_max);
            }
        }
        SearchStrategy::Continuous { eps } => {
            if eps <= 0.0 {
                return Err(Error::Infeasible("eps must be positive".into()));
            }
            if let (Some(lo), Some(hi)) = (
                deltas.iter().copied().reduce(f64::min),
                deltas.iter().copied().reduce(f64::max),
            ) {
                raw.extend(geometric_grid(lo * factor / ctx.antichain_max, hi * factor, eps));
            }
        }
    }
    let guesses = sorted_guesses(raw);

    let mut flow_probes = 0usize;
    let out = search_largest_feasible(&guesses, |g| {
        let sel = ctx.probe(g, &mut flow_probes)?;
        Ok((!sel.aborted, sel))
    })?;
    let mut best: Option<Selection> = None;
    for rec in &out.records {
        if !rec.feasible {
            continue;
        }
        match &best {
            Some(b) if rec.result.diversity <= b.diversity => {}
            _ => best = Some(rec.result.clone()),
        }
    }
    let mut sel = best.ok_or_else(|| {
        Error::Internal("every guess aborted although the request is feasible".into())
    })?;
    sel.probes = flow_probes;
    sel.non_monotone_gamma = out.non_monotone;
    Ok(sel)
}
