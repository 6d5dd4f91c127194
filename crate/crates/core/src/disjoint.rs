//! Swap-based and exhaustive fair diversification for disjoint groups.

use crate::combo::{binomial, Combinations};
use crate::dataset::{Dataset, ElementId, FairnessSpec, GroupId, GroupMode, Selection};
use crate::error::{Error, Result};
use crate::gmm::{derive_seed, gmm};

pub const ALG_FAIR_SWAP: &str = "fair-swap";
pub const ALG_FAIR_GMM: &str = "fair-gmm";

/// Intermediate sets of a swap run, for inspection and testing.
#[derive(Debug, Clone)]
pub struct SwapTrace {
    /// Output of the color-blind phase, in selection order.
    pub color_blind: Vec<ElementId>,
    /// Group that came out short, if balancing was needed.
    pub under: Option<GroupId>,
    pub over: Option<GroupId>,
    /// Extra under-group points added by the balancing phase.
    pub extras: Vec<ElementId>,
    /// Over-group points removed, one per extra, in the same order.
    pub removed: Vec<ElementId>,
}

/// Two-phase swap solver for two disjoint groups: an unconstrained
/// farthest-first pass, then one removal of the nearest over-represented
/// point per missing under-represented point.
pub fn fair_swap(ds: &Dataset, spec: &FairnessSpec, seed: u64) -> Result<Selection> {
    fair_swap_traced(ds, spec, seed).map(|(sel, _)| sel)
}

pub fn fair_swap_traced(
    ds: &Dataset,
    spec: &FairnessSpec,
    seed: u64,
) -> Result<(Selection, SwapTrace)> {
    spec.validate(ds)?;
    if ds.mode() != GroupMode::Disjoint {
        return Err(Error::Infeasible("fair-swap requires disjoint groups".into()));
    }
    if ds.num_groups() != 2 {
        return Err(Error::Infeasible(format!(
            "fair-swap handles exactly two groups, got {}",
            ds.num_groups()
        )));
    }
    let groups = [ds.members(GroupId(0)), ds.members(GroupId(1))];
    let targets = [spec.count(GroupId(0)), spec.count(GroupId(1))];
    let (chosen, trace) = swap_on_subsets(ds, groups, targets, seed)?;
    Ok((
        Selection::from_chosen(ds, ALG_FAIR_SWAP, chosen, None, 1),
        trace,
    ))
}

/// The swap construction on explicit per-group universes. Shared with the
/// overlapping-groups solver, which runs it on a filtered sub-universe.
pub(crate) fn swap_on_subsets(
    ds: &Dataset,
    groups: [&[ElementId]; 2],
    targets: [usize; 2],
    seed: u64,
) -> Result<(Vec<ElementId>, SwapTrace)> {
    let k = targets[0] + targets[1];
    for side in 0..2 {
        if targets[side] > groups[side].len() {
            return Err(Error::Infeasible(format!(
                "need {} points of a group holding {}",
                targets[side],
                groups[side].len()
            )));
        }
    }
    if k == 0 {
        return Ok((
            Vec::new(),
            SwapTrace {
                color_blind: Vec::new(),
                under: None,
                over: None,
                extras: Vec::new(),
                removed: Vec::new(),
            },
        ));
    }

    let mut universe: Vec<ElementId> = Vec::with_capacity(groups[0].len() + groups[1].len());
    universe.extend_from_slice(groups[0]);
    universe.extend_from_slice(groups[1]);
    universe.sort_unstable();

    // Color-blind phase.
    let color_blind = gmm(ds, &universe, &[], k, seed)?.selected;
    let in_group = |side: usize, u: ElementId| groups[side].binary_search(&u).is_ok();
    let mut by_group: [Vec<ElementId>; 2] = [Vec::new(), Vec::new()];
    for &u in &color_blind {
        let side = usize::from(in_group(1, u));
        by_group[side].push(u);
    }

    let under = (0..2).find(|&s| by_group[s].len() < targets[s]);
    let Some(under) = under else {
        // already balanced; sets E and R stay empty
        return Ok((
            color_blind.clone(),
            SwapTrace {
                color_blind,
                under: None,
                over: None,
                extras: Vec::new(),
                removed: Vec::new(),
            },
        ));
    };
    let over = 1 - under;

    // Balancing phase: fetch the missing under-group points farthest-first,
    // seeded with what the color-blind phase already picked.
    let deficit = targets[under] - by_group[under].len();
    let extras = gmm(
        ds,
        groups[under],
        &by_group[under],
        deficit,
        derive_seed(seed, 1),
    )?
    .selected;

    // One removal per extra, applied sequentially against the shrinking
    // over-group set so each extra evicts exactly one point.
    let mut over_set = by_group[over].clone();
    let mut removed = Vec::with_capacity(extras.len());
    for &e in &extras {
        let (idx, _) = over_set
            .iter()
            .enumerate()
            .map(|(i, &x)| (i, ds.distance(x, e)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(over_set[a.0].cmp(&over_set[b.0])))
            .expect("over-group set cannot run out before the extras do");
        removed.push(over_set.remove(idx));
    }

    let mut chosen = Vec::with_capacity(k);
    for &u in &color_blind {
        let side = usize::from(in_group(1, u));
        if side == under || !removed.contains(&u) {
            chosen.push(u);
        }
    }
    chosen.extend_from_slice(&extras);

    Ok((
        chosen,
        SwapTrace {
            color_blind,
            under: Some(GroupId(under)),
            over: Some(GroupId(over)),
            extras,
            removed,
        },
    ))
}

/// Exhaustive solver for small `k`: a farthest-first candidate pool per
/// group, then a search over all per-group subsets of the required sizes.
///
/// Refuses to run when the number of candidate sets exceeds `budget`.
pub fn fair_gmm(ds: &Dataset, spec: &FairnessSpec, seed: u64, budget: u64) -> Result<Selection> {
    spec.validate(ds)?;
    if ds.mode() != GroupMode::Disjoint {
        return Err(Error::Infeasible("fair-gmm requires disjoint groups".into()));
    }
    let k = spec.k_total();
    let m = ds.num_groups();

    let mut pools: Vec<Vec<ElementId>> = Vec::with_capacity(m);
    for g in ds.group_ids() {
        let mut y = gmm(ds, ds.members(g), &[], k, derive_seed(seed, g.0 as u64))?.selected;
        // candidate order inside a pool is irrelevant to the search; sorting
        // makes the enumeration order (and tie-breaking) id-based
        y.sort_unstable();
        pools.push(y);
    }

    let mut candidate_sets: u128 = 1;
    for (g, pool) in pools.iter().enumerate() {
        candidate_sets =
            candidate_sets.saturating_mul(binomial(pool.len() as u64, spec.counts()[g] as u64));
    }
    if candidate_sets > budget as u128 {
        return Err(Error::BudgetExceeded {
            required: candidate_sets,
            budget,
        });
    }

    struct Search<'a> {
        ds: &'a Dataset,
        spec: &'a FairnessSpec,
        pools: &'a [Vec<ElementId>],
        best: f64,
        best_ids: Option<Vec<ElementId>>,
        evaluated: usize,
    }

    impl Search<'_> {
        fn rec(&mut self, g: usize, acc: &mut Vec<ElementId>, cur_min: f64) {
            if g == self.pools.len() {
                self.evaluated += 1;
                let mut sorted = acc.clone();
                sorted.sort_unstable();
                match &self.best_ids {
                    Some(ids) if cur_min < self.best || (cur_min == self.best && sorted >= *ids) => {}
                    _ => {
                        self.best = cur_min;
                        self.best_ids = Some(sorted);
                    }
                }
                return;
            }
            let pool = &self.pools[g];
            for combo in Combinations::new(pool.len(), self.spec.counts()[g]) {
                let mut running = cur_min;
                let base = acc.len();
                for &i in &combo {
                    let u = pool[i];
                    for &v in acc.iter() {
                        let d = self.ds.distance(u, v);
                        if d < running {
                            running = d;
                        }
                    }
                    acc.push(u);
                }
                // a partial set strictly below the best cannot recover
                if running >= self.best {
                    self.rec(g + 1, acc, running);
                }
                acc.truncate(base);
            }
        }
    }

    let mut search = Search {
        ds,
        spec,
        pools: &pools,
        best: f64::NEG_INFINITY,
        best_ids: None,
        evaluated: 0,
    };
    let mut acc = Vec::with_capacity(k);
    search.rec(0, &mut acc, f64::INFINITY);

    let chosen = search
        .best_ids
        .ok_or_else(|| Error::Internal("no candidate set evaluated".into()))?;
    let mut sel = Selection::from_chosen(ds, ALG_FAIR_GMM, chosen, None, 1);
    sel.probes = search.evaluated;
    Ok(sel)
}
