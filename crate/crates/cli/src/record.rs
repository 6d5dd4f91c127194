//! The structured result record emitted by `select` and `oracle`.

use std::collections::BTreeMap;

use fairdiv::clustering::ClusterResult;
use fairdiv::oracle::OracleResult;
use fairdiv::{Dataset, ElementId, Selection};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct SelectedItem {
    pub id: String,
    pub labels: Vec<String>,
}

/// One record per run. `diversity` is used by the max-min algorithms and
/// `radius` by the clustering ones; non-finite objectives (the infinite
/// singleton diversity, an aborted probe) serialize as null.
#[derive(Debug, Serialize)]
pub struct ResultRecord {
    pub algorithm: String,
    pub gamma_used: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diversity: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<Option<f64>>,
    pub selected: Vec<SelectedItem>,
    pub per_group_counts: BTreeMap<String, usize>,
    pub probes: usize,
    pub aborted: bool,
    pub non_monotone_gamma: bool,
    pub wall_ms: u64,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn items(ds: &Dataset, chosen: &[ElementId]) -> Vec<SelectedItem> {
    chosen
        .iter()
        .map(|&u| SelectedItem {
            id: ds.external_id(u).to_string(),
            labels: ds
                .memberships(u)
                .iter()
                .map(|&g| ds.group_label(g).to_string())
                .collect(),
        })
        .collect()
}

fn counts(ds: &Dataset, per_group: &[usize]) -> BTreeMap<String, usize> {
    ds.group_ids()
        .map(|g| (ds.group_label(g).to_string(), per_group[g.0]))
        .collect()
}

impl ResultRecord {
    pub fn from_selection(ds: &Dataset, sel: &Selection, wall_ms: u64) -> Self {
        ResultRecord {
            algorithm: sel.algorithm.clone(),
            gamma_used: sel.gamma_used,
            diversity: Some(finite(sel.diversity)),
            radius: None,
            selected: items(ds, &sel.chosen),
            per_group_counts: counts(ds, &sel.per_group_counts),
            probes: sel.probes,
            aborted: sel.aborted,
            non_monotone_gamma: sel.non_monotone_gamma,
            wall_ms,
        }
    }

    pub fn from_clustering(ds: &Dataset, res: &ClusterResult, wall_ms: u64) -> Self {
        ResultRecord {
            algorithm: res.algorithm.clone(),
            gamma_used: res.gamma_used,
            diversity: None,
            radius: Some(finite(res.radius)),
            selected: items(ds, &res.centers),
            per_group_counts: counts(ds, &res.per_group_counts),
            probes: res.probes,
            aborted: res.aborted,
            non_monotone_gamma: res.non_monotone_gamma,
            wall_ms,
        }
    }

    pub fn from_oracle(
        ds: &Dataset,
        res: &OracleResult,
        objective_is_radius: bool,
        wall_ms: u64,
    ) -> Self {
        let mut per_group = vec![0usize; ds.num_groups()];
        for &u in &res.witness {
            for g in ds.memberships(u) {
                per_group[g.0] += 1;
            }
        }
        ResultRecord {
            algorithm: if objective_is_radius {
                "oracle-kcenter".into()
            } else {
                "oracle-maxmin".into()
            },
            gamma_used: None,
            diversity: (!objective_is_radius).then(|| finite(res.opt_value)),
            radius: objective_is_radius.then(|| finite(res.opt_value)),
            selected: items(ds, &res.witness),
            per_group_counts: counts(ds, &per_group),
            probes: res.enumerated as usize,
            aborted: false,
            non_monotone_gamma: false,
            wall_ms,
        }
    }
}
