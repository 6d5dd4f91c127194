//! Integral max-flow and the flow-based fair diversification solver for
//! disjoint groups.
//!
//! A probe takes a guess `gamma` of the optimum fair diversity, keeps a
//! well-separated candidate prefix per group, groups conflicting candidates
//! into connected components, and asks a flow network whether one candidate
//! per component can meet every group count. The driver binary-searches the
//! guess and returns the best non-aborted probe it evaluated.

use std::collections::VecDeque;

use crate::dataset::{Dataset, ElementId, FairnessSpec, GroupId, GroupMode, Selection};
use crate::error::{Error, Result};
use crate::gmm::{derive_seed, gmm, GmmState};
use crate::search::{
    geometric_grid, search_largest_feasible, sorted_guesses, SearchStrategy,
};

pub const ALG_FAIR_FLOW: &str = "fair-flow";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowEdge {
    pub from: usize,
    pub to: usize,
    pub capacity: i64,
}

/// Directed integer-capacity network for the assignment reductions: a source,
/// one node per group (or label class), one node per conflict component, and
/// a sink.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    num_nodes: usize,
    source: usize,
    sink: usize,
    edges: Vec<FlowEdge>,
    group_nodes: Vec<usize>,
    component_nodes: Vec<usize>,
}

/// Max-flow value plus per-edge flow, parallel to [`FlowNetwork::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowOutcome {
    pub value: i64,
    pub edge_flow: Vec<i64>,
}

impl FlowNetwork {
    /// Standard assignment topology: `(source, group g)` with capacity
    /// `group_caps[g]`, `(component j, sink)` with capacity 1, and
    /// `(group g, component j)` with capacity 1 for every incidence pair.
    pub fn assignment(group_caps: &[i64], num_components: usize, incidence: &[(usize, usize)]) -> FlowNetwork {
        let g = group_caps.len();
        let source = 0;
        let group_nodes: Vec<usize> = (1..=g).collect();
        let component_nodes: Vec<usize> = (g + 1..=g + num_components).collect();
        let sink = g + num_components + 1;

        let mut edges = Vec::with_capacity(g + num_components + incidence.len());
        for (i, &cap) in group_caps.iter().enumerate() {
            edges.push(FlowEdge { from: source, to: group_nodes[i], capacity: cap });
        }
        for &(gi, cj) in incidence {
            edges.push(FlowEdge {
                from: group_nodes[gi],
                to: component_nodes[cj],
                capacity: 1,
            });
        }
        for &cn in &component_nodes {
            edges.push(FlowEdge { from: cn, to: sink, capacity: 1 });
        }
        FlowNetwork {
            num_nodes: sink + 1,
            source,
            sink,
            edges,
            group_nodes,
            component_nodes,
        }
    }

    pub fn edges(&self) -> &[FlowEdge] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn group_nodes(&self) -> &[usize] {
        &self.group_nodes
    }

    pub fn component_nodes(&self) -> &[usize] {
        &self.component_nodes
    }

    pub fn max_flow(&self) -> FlowOutcome {
        max_flow(self)
    }

    /// Exhaustive integrality, capacity, conservation, and value checks.
    pub fn verify(&self, out: &FlowOutcome) -> Result<()> {
        if out.edge_flow.len() != self.edges.len() {
            return Err(Error::Internal("flow vector length mismatch".into()));
        }
        let mut balance = vec![0i64; self.num_nodes];
        for (e, &f) in self.edges.iter().zip(&out.edge_flow) {
            if f < 0 || f > e.capacity {
                return Err(Error::Internal(format!(
                    "edge ({}, {}) carries {f} outside [0, {}]",
                    e.from, e.to, e.capacity
                )));
            }
            balance[e.from] -= f;
            balance[e.to] += f;
        }
        for (node, &b) in balance.iter().enumerate() {
            if node == self.source || node == self.sink {
                continue;
            }
            if b != 0 {
                return Err(Error::Internal(format!(
                    "conservation violated at node {node}: imbalance {b}"
                )));
            }
        }
        if balance[self.source] != -out.value || balance[self.sink] != out.value {
            return Err(Error::Internal(format!(
                "flow value {} does not match terminal balances ({}, {})",
                out.value, balance[self.source], balance[self.sink]
            )));
        }
        Ok(())
    }
}

/// Exact integral maximum flow via Dinic's algorithm. The assignment
/// networks here have `O(km)` nodes and edges, so this is far below its
/// worst-case bound.
pub fn max_flow(net: &FlowNetwork) -> FlowOutcome {
    struct Arc {
        to: usize,
        cap: i64,
        rev: usize,
        edge: Option<usize>,
    }

    let mut graph: Vec<Vec<Arc>> = (0..net.num_nodes).map(|_| Vec::new()).collect();
    for (idx, e) in net.edges.iter().enumerate() {
        let rev_fwd = graph[e.to].len();
        let rev_bwd = graph[e.from].len();
        graph[e.from].push(Arc { to: e.to, cap: e.capacity, rev: rev_fwd, edge: Some(idx) });
        graph[e.to].push(Arc { to: e.from, cap: 0, rev: rev_bwd, edge: None });
    }

    fn bfs(graph: &[Vec<Arc>], s: usize, t: usize, level: &mut [i32]) -> bool {
        level.fill(-1);
        level[s] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for arc in &graph[u] {
                if arc.cap > 0 && level[arc.to] == -1 {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        level[t] != -1
    }

    fn dfs(
        graph: &mut [Vec<Arc>],
        u: usize,
        t: usize,
        pushed: i64,
        level: &[i32],
        iter: &mut [usize],
    ) -> i64 {
        if u == t {
            return pushed;
        }
        while iter[u] < graph[u].len() {
            let (to, cap, rev) = {
                let arc = &graph[u][iter[u]];
                (arc.to, arc.cap, arc.rev)
            };
            if cap > 0 && level[to] == level[u] + 1 {
                let d = dfs(graph, to, t, pushed.min(cap), level, iter);
                if d > 0 {
                    graph[u][iter[u]].cap -= d;
                    graph[to][rev].cap += d;
                    return d;
                }
            }
            iter[u] += 1;
        }
        0
    }

    let mut value = 0i64;
    let mut level = vec![-1i32; net.num_nodes];
    while bfs(&graph, net.source, net.sink, &mut level) {
        let mut iter = vec![0usize; net.num_nodes];
        loop {
            let pushed = dfs(&mut graph, net.source, net.sink, i64::MAX, &level, &mut iter);
            if pushed == 0 {
                break;
            }
            value += pushed;
        }
    }

    let mut edge_flow = vec![0i64; net.edges.len()];
    for arcs in &graph {
        for arc in arcs {
            if let Some(idx) = arc.edge {
                edge_flow[idx] = net.edges[idx].capacity - arc.cap;
            }
        }
    }
    FlowOutcome { value, edge_flow }
}

/// Union-find over `0..n`, used to build conflict-graph components.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Group candidates `nodes` into connected components of the graph with an
/// edge wherever the distance is strictly below `threshold`. Components are
/// returned in first-appearance order of their smallest-index member.
pub(crate) fn conflict_components<T: Copy>(
    ds: &Dataset,
    nodes: &[(T, ElementId)],
    threshold: f64,
) -> Vec<Vec<(T, ElementId)>> {
    let mut uf = UnionFind::new(nodes.len());
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if ds.distance(nodes[i].1, nodes[j].1) < threshold {
                uf.union(i, j);
            }
        }
    }
    let mut index_of_root = vec![usize::MAX; nodes.len()];
    let mut components: Vec<Vec<(T, ElementId)>> = Vec::new();
    for (i, &node) in nodes.iter().enumerate() {
        let r = uf.find(i);
        if index_of_root[r] == usize::MAX {
            index_of_root[r] = components.len();
            components.push(Vec::new());
        }
        components[index_of_root[r]].push(node);
    }
    components
}

/// Per-group candidate structure of one probe: the full farthest-first order
/// `Y_i`, the length of its maximal prefix `Z_i` with pairwise distances at
/// least `d1`, and the connected components of the conflict graph over all
/// prefixes at threshold `d2`.
#[derive(Debug, Clone)]
pub struct CandidatePrefix {
    pub per_group: Vec<Vec<ElementId>>,
    pub prefix_len: Vec<usize>,
    pub components: Vec<Vec<(GroupId, ElementId)>>,
}

impl CandidatePrefix {
    /// Build the prefixes and components and check the structural
    /// guarantees they must satisfy: no component holds two candidates of
    /// the same group, and component diameters stay below
    /// `(m - 1) * d2`. A violation is an internal error, not an abort.
    pub fn build(ds: &Dataset, ys: &[GmmState], d1: f64, d2: f64) -> Result<CandidatePrefix> {
        let m = ys.len();
        let per_group: Vec<Vec<ElementId>> = ys.iter().map(|y| y.selected.clone()).collect();
        let prefix_len: Vec<usize> = ys.iter().map(|y| y.prefix_at_least(d1)).collect();

        let mut nodes: Vec<(GroupId, ElementId)> = Vec::new();
        for (g, y) in per_group.iter().enumerate() {
            for &u in &y[..prefix_len[g]] {
                nodes.push((GroupId(g), u));
            }
        }
        let components = conflict_components(ds, &nodes, d2);

        let diameter_bound = (m as f64 - 1.0) * d2;
        for comp in &components {
            for i in 0..comp.len() {
                for j in i + 1..comp.len() {
                    let (ga, a) = comp[i];
                    let (gb, b) = comp[j];
                    if ga == gb {
                        return Err(Error::Internal(format!(
                            "component holds two candidates {a:?}, {b:?} of group {ga:?}"
                        )));
                    }
                    let d = ds.distance(a, b);
                    if d >= diameter_bound {
                        return Err(Error::Internal(format!(
                            "component diameter violated: d({a:?}, {b:?}) = {d} >= {diameter_bound}"
                        )));
                    }
                }
            }
        }
        Ok(CandidatePrefix {
            per_group,
            prefix_len,
            components,
        })
    }
}

struct FlowContext<'a> {
    ds: &'a Dataset,
    spec: &'a FairnessSpec,
    ys: Vec<GmmState>,
}

impl<'a> FlowContext<'a> {
    fn new(ds: &'a Dataset, spec: &'a FairnessSpec, seed: u64) -> Result<Self> {
        spec.validate(ds)?;
        if ds.mode() != GroupMode::Disjoint {
            return Err(Error::Infeasible("fair-flow requires disjoint groups".into()));
        }
        let k = spec.k_total();
        let mut ys = Vec::with_capacity(ds.num_groups());
        for g in ds.group_ids() {
            ys.push(gmm(ds, ds.members(g), &[], k, derive_seed(seed, g.0 as u64))?);
        }
        Ok(FlowContext { ds, spec, ys })
    }

    fn separation_factor(&self) -> f64 {
        3.0 * self.ds.num_groups() as f64 - 1.0
    }

    fn probe(&self, gamma: f64) -> Result<Selection> {
        if gamma.is_nan() || gamma < 0.0 {
            return Err(Error::Infeasible(format!("negative guess {gamma}")));
        }
        let m = self.ds.num_groups() as f64;
        let factor = self.separation_factor();
        let d1 = m * gamma / factor;
        let d2 = gamma / factor;
        let prefix = CandidatePrefix::build(self.ds, &self.ys, d1, d2)?;

        let k = self.spec.k_total();
        let caps: Vec<i64> = self.spec.counts().iter().map(|&c| c as i64).collect();
        let mut incidence = Vec::new();
        for g in 0..self.ds.num_groups() {
            for (j, comp) in prefix.components.iter().enumerate() {
                if comp.iter().any(|&(cg, _)| cg.0 == g) {
                    incidence.push((g, j));
                }
            }
        }
        let net = FlowNetwork::assignment(&caps, prefix.components.len(), &incidence);
        let out = net.max_flow();
        net.verify(&out)?;
        if out.value < k as i64 {
            return Ok(Selection::aborted(self.ds, ALG_FAIR_FLOW, Some(gamma)));
        }

        let mut chosen = Vec::with_capacity(k);
        for (edge, &f) in net.edges().iter().zip(&out.edge_flow) {
            if f == 1 && edge.from != net.source && edge.to != net.sink {
                let g = edge.from - 1;
                let j = edge.to - 1 - self.ds.num_groups();
                let mut matches = prefix.components[j]
                    .iter()
                    .filter(|&&(cg, _)| cg.0 == g)
                    .map(|&(_, u)| u);
                let u = matches.next().ok_or_else(|| {
                    Error::Internal("flow edge without a matching candidate".into())
                })?;
                if matches.next().is_some() {
                    return Err(Error::Internal(
                        "component holds several candidates of one group".into(),
                    ));
                }
                chosen.push(u);
            }
        }
        Ok(Selection::from_chosen(self.ds, ALG_FAIR_FLOW, chosen, Some(gamma), 1))
    }

    /// Positive pairwise distances among all farthest-first candidates.
    fn pool_distances(&self) -> Vec<f64> {
        let pool: Vec<ElementId> = self
            .ys
            .iter()
            .flat_map(|y| y.selected.iter().copied())
            .collect();
        let mut out = Vec::new();
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let d = self.ds.distance(pool[i], pool[j]);
                if d > 0.0 {
                    out.push(d);
                }
            }
        }
        out
    }
}

/// One guess of the flow solver. Aborting (flow below the total demand) is a
/// normal outcome reported through [`Selection::aborted`]; on success the
/// returned points meet every group count exactly and are pairwise at least
/// `gamma / (3m - 1)` apart.
pub fn fair_flow_probe(
    ds: &Dataset,
    spec: &FairnessSpec,
    gamma: f64,
    seed: u64,
) -> Result<Selection> {
    FlowContext::new(ds, spec, seed)?.probe(gamma)
}

/// Full flow solver: probes guesses of the optimum fair diversity and keeps
/// the best non-aborted selection evaluated.
///
/// `Discrete` derives the guesses from the pairwise distances of the
/// candidate pool, scaled so that either separation threshold hits each
/// distance; `Continuous` walks a geometric grid over the pool's distance
/// range. A zero guess is always included: it never aborts on a feasible
/// instance, so the driver cannot come back empty-handed.
pub fn fair_flow(
    ds: &Dataset,
    spec: &FairnessSpec,
    search: SearchStrategy,
    seed: u64,
) -> Result<Selection> {
    let ctx = FlowContext::new(ds, spec, seed)?;
    let factor = ctx.separation_factor();
    let m = ds.num_groups() as f64;

    let mut raw = vec![0.0];
    let deltas = ctx.pool_distances();
    match search {
        SearchStrategy::Discrete => {
            for &d in &deltas {
                raw.push(d * factor);
                raw.push(d * factor / m);
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
                raw.extend(geometric_grid(lo * factor / m, hi * factor, eps));
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::MetricKind;
    use crate::oracle::{oracle_fair_maxmin, DEFAULT_BUDGET};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn assignment_topology_flow_value() {
        // m=3, caps <2,1,1>, five components; group 0 meets components 0 and
        // 1, group 1 meets 0, 2, 3, group 2 meets 3 and 4. Full demand routes.
        let net = FlowNetwork::assignment(
            &[2, 1, 1],
            5,
            &[(0, 0), (0, 1), (1, 0), (1, 2), (1, 3), (2, 3), (2, 4)],
        );
        let out = net.max_flow();
        net.verify(&out).unwrap();
        assert_eq!(out.value, 4);
    }

    #[test]
    fn single_group_single_component() {
        let net = FlowNetwork::assignment(&[1], 1, &[(0, 0)]);
        let out = net.max_flow();
        net.verify(&out).unwrap();
        assert_eq!(out.value, 1);
    }

    #[test]
    fn demand_exceeding_incident_components_caps_the_flow() {
        let net = FlowNetwork::assignment(&[2], 1, &[(0, 0)]);
        let out = net.max_flow();
        net.verify(&out).unwrap();
        assert_eq!(out.value, 1);
    }

    /// Slow reference max-flow (Edmonds-Karp) used to cross-check Dinic.
    fn reference_max_flow(net: &FlowNetwork) -> i64 {
        let n = net.num_nodes;
        let mut cap = vec![vec![0i64; n]; n];
        for e in net.edges() {
            cap[e.from][e.to] += e.capacity;
        }
        let mut value = 0;
        loop {
            let mut parent = vec![usize::MAX; n];
            parent[net.source] = net.source;
            let mut queue = VecDeque::from([net.source]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if parent[v] == usize::MAX && cap[u][v] > 0 {
                        parent[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if parent[net.sink] == usize::MAX {
                return value;
            }
            let mut bottleneck = i64::MAX;
            let mut v = net.sink;
            while v != net.source {
                let u = parent[v];
                bottleneck = bottleneck.min(cap[u][v]);
                v = u;
            }
            let mut v = net.sink;
            while v != net.source {
                let u = parent[v];
                cap[u][v] -= bottleneck;
                cap[v][u] += bottleneck;
                v = u;
            }
            value += bottleneck;
        }
    }

    #[test]
    fn dinic_matches_reference_on_random_assignment_networks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let groups = rng.gen_range(1..5usize);
            let comps = rng.gen_range(1..7usize);
            let caps: Vec<i64> = (0..groups).map(|_| rng.gen_range(0..4)).collect();
            let mut incidence = Vec::new();
            for g in 0..groups {
                for c in 0..comps {
                    if rng.gen_bool(0.4) {
                        incidence.push((g, c));
                    }
                }
            }
            let net = FlowNetwork::assignment(&caps, comps, &incidence);
            let out = net.max_flow();
            net.verify(&out).unwrap();
            assert_eq!(out.value, reference_max_flow(&net));
        }
    }

    fn random_disjoint(
        rng: &mut ChaCha8Rng,
        n: usize,
        m: usize,
    ) -> (Dataset, FairnessSpec) {
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
            if spec.validate(&ds).is_ok() {
                return (ds, spec);
            }
        }
    }

    #[test]
    fn probe_with_tiny_guess_never_aborts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (ds, spec) = random_disjoint(&mut rng, 10, 3);
            let sel = fair_flow_probe(&ds, &spec, 1e-12, 0).unwrap();
            assert!(!sel.aborted);
            for g in ds.group_ids() {
                assert_eq!(sel.per_group_counts[g.0], spec.count(g));
            }
        }
    }

    #[test]
    fn probe_with_huge_guess_aborts_when_a_group_needs_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        loop {
            let (ds, spec) = random_disjoint(&mut rng, 10, 3);
            if spec.counts().iter().all(|&c| c < 2) {
                continue;
            }
            let d_max = 15.0; // beyond any distance in the 10x10 square
            let factor = 3.0 * ds.num_groups() as f64 - 1.0;
            let sel = fair_flow_probe(&ds, &spec, factor * d_max, 0).unwrap();
            assert!(sel.aborted);
            break;
        }
    }

    #[test]
    fn driver_meets_bound_against_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..25 {
            let (ds, spec) = random_disjoint(&mut rng, 9, 3);
            let opt = oracle_fair_maxmin(&ds, &spec, DEFAULT_BUDGET).unwrap();
            let sel = fair_flow(&ds, &spec, SearchStrategy::Discrete, trial).unwrap();
            assert!(!sel.aborted);
            let factor = 3.0 * ds.num_groups() as f64 - 1.0;
            assert!(
                sel.diversity >= opt.opt_value / factor - 1e-9,
                "trial {trial}: {} < {} / {factor}",
                sel.diversity,
                opt.opt_value
            );
            // a returned probe also certifies its own guess
            let gamma = sel.gamma_used.unwrap();
            assert!(sel.diversity >= gamma / factor - 1e-12);
        }
    }

    #[test]
    fn continuous_driver_works_too() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (ds, spec) = random_disjoint(&mut rng, 10, 3);
        let opt = oracle_fair_maxmin(&ds, &spec, DEFAULT_BUDGET).unwrap();
        let sel = fair_flow(&ds, &spec, SearchStrategy::Continuous { eps: 0.05 }, 2).unwrap();
        let factor = (3.0 * ds.num_groups() as f64 - 1.0) * 1.05;
        assert!(sel.diversity >= opt.opt_value / factor - 1e-9);
    }

    #[test]
    fn single_group_reduces_to_half_guarantee() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..20 {
            let n = rng.gen_range(4..10);
            let (ds, _) = random_disjoint(&mut rng, n, 1);
            let k = rng.gen_range(2..=n.min(4));
            let spec = FairnessSpec::new(vec![k]);
            if spec.validate(&ds).is_err() {
                continue;
            }
            let opt = oracle_fair_maxmin(&ds, &spec, DEFAULT_BUDGET).unwrap();
            let sel = fair_flow(&ds, &spec, SearchStrategy::Discrete, trial).unwrap();
            assert!(sel.diversity >= opt.opt_value / 2.0 - 1e-9);
        }
    }

    #[test]
    fn coincident_color_still_gets_exact_counts() {
        // one color sits entirely on a single location: the optimum is 0 and
        // only the zero guess stays feasible, but counts must still be met
        let ds = Dataset::from_points(
            MetricKind::Euclidean,
            vec![vec![1.0], vec![1.0], vec![0.0], vec![5.0]],
            vec![
                vec!["a".into()],
                vec!["a".into()],
                vec!["b".into()],
                vec!["b".into()],
            ],
        )
        .unwrap();
        let spec = FairnessSpec::new(vec![2, 1]);
        let sel = fair_flow(&ds, &spec, SearchStrategy::Discrete, 0).unwrap();
        assert!(!sel.aborted);
        assert_eq!(sel.per_group_counts, vec![2, 1]);
        assert_eq!(sel.diversity, 0.0);
    }
}
