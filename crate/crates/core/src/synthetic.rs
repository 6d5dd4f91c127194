//! Seeded synthetic instances for benchmarks and property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, FairnessSpec, GroupMode, MetricKind};

pub struct SyntheticInstance {
    pub dataset: Dataset,
    pub spec: FairnessSpec,
}

/// Uniform 2D points with disjoint labels. Every group receives at least
/// `max(counts[i], 1)` members so the instance is always feasible.
pub fn uniform_disjoint(n: usize, counts: &[usize], seed: u64) -> SyntheticInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = uniform_points(n, &mut rng);
    let labels = disjoint_labels(n, counts, &mut rng);
    let dataset = Dataset::from_points(MetricKind::Euclidean, points, labels).unwrap();
    let spec = rekeyed_spec(&dataset, counts);
    SyntheticInstance { dataset, spec }
}

/// Gaussian-ish blobs around `clusters` seeded centers, disjoint labels.
pub fn clustered_disjoint(
    n: usize,
    counts: &[usize],
    clusters: usize,
    spread: f64,
    seed: u64,
) -> SyntheticInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<(f64, f64)> = (0..clusters.max(1))
        .map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
        .collect();
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let (cx, cy) = centers[rng.gen_range(0..centers.len())];
            vec![
                cx + rng.gen_range(-spread..spread),
                cy + rng.gen_range(-spread..spread),
            ]
        })
        .collect();
    let labels = disjoint_labels(n, counts, &mut rng);
    let dataset = Dataset::from_points(MetricKind::Euclidean, points, labels).unwrap();
    let spec = rekeyed_spec(&dataset, counts);
    SyntheticInstance { dataset, spec }
}

/// Uniform 2D points with random non-empty label sets over `counts.len()`
/// groups; at least `max(counts[i], 1)` elements carry each label.
pub fn uniform_overlapping(n: usize, counts: &[usize], seed: u64) -> SyntheticInstance {
    let m = counts.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = uniform_points(n, &mut rng);

    let mut label_sets: Vec<Vec<String>> = Vec::with_capacity(n);
    for (g, &k) in counts.iter().enumerate() {
        for _ in 0..k.max(1) {
            label_sets.push(vec![format!("g{g}")]);
        }
    }
    assert!(label_sets.len() <= n, "need n >= sum of counts");
    while label_sets.len() < n {
        let mut ls: Vec<String> = (0..m)
            .filter(|_| rng.gen_bool(0.4))
            .map(|g| format!("g{g}"))
            .collect();
        if ls.is_empty() {
            ls.push(format!("g{}", rng.gen_range(0..m)));
        }
        label_sets.push(ls);
    }
    label_sets.shuffle(&mut rng);

    let dataset = Dataset::builder()
        .points(MetricKind::Euclidean, points)
        .memberships(label_sets)
        .mode(GroupMode::Overlapping)
        .build()
        .unwrap();
    let spec = rekeyed_spec(&dataset, counts);
    SyntheticInstance { dataset, spec }
}

/// Group indices follow first appearance in the shuffled label list, so the
/// requested counts must be re-keyed from "g{i}" labels to dataset order.
fn rekeyed_spec(dataset: &Dataset, counts: &[usize]) -> FairnessSpec {
    let by_index: Vec<usize> = dataset
        .group_ids()
        .map(|g| {
            let label = dataset.group_label(g);
            let idx: usize = label[1..].parse().unwrap();
            counts[idx]
        })
        .collect();
    FairnessSpec::new(by_index)
}

fn uniform_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)])
        .collect()
}

fn disjoint_labels(n: usize, counts: &[usize], rng: &mut ChaCha8Rng) -> Vec<Vec<String>> {
    let m = counts.len();
    let mut labels: Vec<String> = Vec::with_capacity(n);
    for (g, &k) in counts.iter().enumerate() {
        for _ in 0..k.max(1) {
            labels.push(format!("g{g}"));
        }
    }
    assert!(labels.len() <= n, "need n >= sum of counts");
    while labels.len() < n {
        labels.push(format!("g{}", rng.gen_range(0..m)));
    }
    labels.shuffle(rng);
    labels.into_iter().map(|l| vec![l]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_instances_are_feasible() {
        for seed in 0..20 {
            let inst = uniform_disjoint(12, &[2, 1, 1], seed);
            assert_eq!(inst.dataset.len(), 12);
            assert_eq!(inst.dataset.num_groups(), 3);
            inst.spec.validate(&inst.dataset).unwrap();
        }
    }

    #[test]
    fn overlapping_instances_are_feasible() {
        for seed in 0..20 {
            let inst = uniform_overlapping(10, &[2, 1], seed);
            assert_eq!(inst.dataset.mode(), GroupMode::Overlapping);
            inst.spec.validate(&inst.dataset).unwrap();
            // the spec must line up with the dataset's group order
            for g in inst.dataset.group_ids() {
                let label = inst.dataset.group_label(g);
                let idx: usize = label[1..].parse().unwrap();
                assert_eq!(inst.spec.count(g), [2, 1][idx]);
            }
        }
    }

    #[test]
    fn clustered_instances_are_feasible() {
        let inst = clustered_disjoint(30, &[2, 2], 3, 0.5, 7);
        inst.spec.validate(&inst.dataset).unwrap();
    }

    #[test]
    fn generation_is_deterministic() {
        let a = uniform_disjoint(10, &[1, 1], 42);
        let b = uniform_disjoint(10, &[1, 1], 42);
        for (u, v) in a.dataset.element_ids().zip(b.dataset.element_ids()) {
            assert_eq!(a.dataset.point(u), b.dataset.point(v));
            assert_eq!(a.dataset.memberships(u), b.dataset.memberships(v));
        }
    }
}
