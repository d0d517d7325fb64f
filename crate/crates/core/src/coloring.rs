//! Random-graph k-coloring benchmark.
//!
//! Instances are Erdős–Rényi graphs `G(n, p)` kept only if k-colorable. Three
//! agents solve each instance by backtracking with forward checking and differ
//! only in variable and value ordering:
//!
//! - `Random`: uniformly random uncolored vertex and random color order.
//! - `Greedy`: highest-degree uncolored vertex; colors ordered by how few
//!   uncolored neighbours still have that color available.
//! - `Acp`: vertex with the smallest live domain (the largest information per
//!   expansion when every expansion costs one unit), ties by degree then
//!   index; least-constraining color first.
//!
//! Cost is counted in node expansions: every committed vertex-color
//! assignment, including re-assignments after backtracking. A run that finds a
//! coloring commits every vertex at least once, so the predicted effective
//! cost `n` (from `I_total = n log2 k` at `I_s = log2 k` per expansion) is a
//! per-instance lower bound.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{AcpError, Result};
use crate::info::{effective_cost, Bits};
use crate::report::{fmt_real, CsvRecord};
use crate::seed::{derive_seed, rng_from_seed, streams};
use crate::stats::MeanSe;

/// Largest color count representable in the domain bitmasks.
pub const MAX_COLORS: usize = 32;
/// Vertex limit for [`count_proper_colorings`].
pub const MAX_COUNT_VERTICES: usize = 20;
pub const MIN_CAMPAIGN_INSTANCES: usize = 50;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list. Self-loops are rejected; duplicate
    /// edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(AcpError::domain(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(AcpError::domain(format!("self-loop at vertex {u}")));
            }
            if !g.adjacency[u].contains(&v) {
                g.adjacency[u].push(v);
                g.adjacency[v].push(u);
            }
        }
        for list in &mut g.adjacency {
            list.sort_unstable();
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(n, &edges).expect("valid edges")
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("valid edges")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|u| (u - 1, u)).collect();
        Graph::from_edges(n, &edges).expect("valid edges")
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// True if `colors` assigns every vertex a color and no edge is
    /// monochromatic.
    pub fn is_proper_coloring(&self, colors: &[usize]) -> bool {
        colors.len() == self.vertex_count()
            && self
                .adjacency
                .iter()
                .enumerate()
                .all(|(u, ns)| ns.iter().all(|&v| colors[u] != colors[v]))
    }
}

/// `G(n, p)`: each of the `n(n-1)/2` vertex pairs, in lexicographic order, is
/// joined independently with probability `p`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(AcpError::domain("graph needs at least one vertex"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(AcpError::domain(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

fn check_colors(k: usize) -> Result<()> {
    if k == 0 || k > MAX_COLORS {
        return Err(AcpError::domain(format!(
            "color count must lie in 1..={MAX_COLORS}, got {k}"
        )));
    }
    Ok(())
}

fn full_domain(k: usize) -> u32 {
    if k == 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

/// Exact k-colorability by complete backtracking with forward checking,
/// branching on the vertex with the fewest remaining colors.
pub fn is_k_colorable(g: &Graph, k: usize) -> Result<bool> {
    check_colors(k)?;
    let n = g.vertex_count();
    let mut domains = vec![full_domain(k); n];
    let mut assigned = vec![false; n];
    Ok(colorable_rec(g, &mut domains, &mut assigned, n))
}

fn colorable_rec(g: &Graph, domains: &mut [u32], assigned: &mut [bool], remaining: usize) -> bool {
    if remaining == 0 {
        return true;
    }
    let v = (0..g.vertex_count())
        .filter(|&v| !assigned[v])
        .min_by_key(|&v| domains[v].count_ones())
        .expect("an unassigned vertex remains");
    let mut options = domains[v];
    assigned[v] = true;
    while options != 0 {
        let bit = options & options.wrapping_neg();
        options &= !bit;
        let mut pruned = Vec::new();
        let mut wiped = false;
        for &u in g.neighbors(v) {
            if !assigned[u] && domains[u] & bit != 0 {
                domains[u] &= !bit;
                pruned.push(u);
                wiped |= domains[u] == 0;
            }
        }
        if !wiped && colorable_rec(g, domains, assigned, remaining - 1) {
            return true;
        }
        for u in pruned {
            domains[u] |= bit;
        }
    }
    assigned[v] = false;
    false
}

/// Number of proper k-colorings, by exhaustive enumeration per connected
/// component. Limited to graphs with at most [`MAX_COUNT_VERTICES`] vertices.
pub fn count_proper_colorings(g: &Graph, k: usize) -> Result<u128> {
    let n = g.vertex_count();
    if n > MAX_COUNT_VERTICES {
        return Err(AcpError::TooLarge {
            what: "vertex count",
            got: n,
            limit: MAX_COUNT_VERTICES,
        });
    }
    if k == 0 {
        return Ok(u128::from(n == 0));
    }
    let mut seen = vec![false; n];
    let mut total: u128 = 1;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // Breadth-first order so each vertex after the first has an earlier neighbour.
        let mut order = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < order.len() {
            for &u in g.neighbors(order[i]) {
                if !seen[u] {
                    seen[u] = true;
                    order.push(u);
                }
            }
            i += 1;
        }
        let mut colors = vec![usize::MAX; n];
        total *= count_rec(g, k, &order, 0, &mut colors);
    }
    Ok(total)
}

fn count_rec(g: &Graph, k: usize, order: &[usize], depth: usize, colors: &mut [usize]) -> u128 {
    if depth == order.len() {
        return 1;
    }
    let v = order[depth];
    let mut count = 0;
    for c in 0..k {
        if g.neighbors(v).iter().all(|&u| colors[u] != c) {
            colors[v] = c;
            count += count_rec(g, k, order, depth + 1, colors);
        }
    }
    colors[v] = usize::MAX;
    count
}

/// `log2` of the number of proper colorings: the entropy of a uniform
/// distribution over the feasible space.
pub fn feasible_space_information(g: &Graph, k: usize) -> Result<Bits> {
    let count = count_proper_colorings(g, k)?;
    if count == 0 {
        return Ok(Bits::INFINITE);
    }
    Bits::new((count as f64).log2())
}

/// A coloring problem drawn from `G(n, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoringInstance {
    pub graph: Graph,
    pub k: usize,
    pub seed: u64,
    pub p: f64,
}

impl ColoringInstance {
    pub fn new(graph: Graph, k: usize, seed: u64, p: f64) -> Result<Self> {
        if !(2..=MAX_COLORS).contains(&k) {
            return Err(AcpError::domain(format!(
                "color count must lie in 2..={MAX_COLORS}"
            )));
        }
        Ok(ColoringInstance { graph, k, seed, p })
    }

    pub fn generate(n: usize, p: f64, k: usize, seed: u64) -> Result<Self> {
        Self::new(gen_erdos_renyi(n, p, seed)?, k, seed, p)
    }
}

/// Predicted search cost in node expansions: `I_total = n log2 k` bits needed
/// at `I_s = log2 k` bits per expansion of unit cost.
pub fn predict_cost(instance: &ColoringInstance) -> Result<f64> {
    let per_assignment = (instance.k as f64).log2();
    let n = instance.graph.vertex_count() as f64;
    let cost = effective_cost(
        Bits::new(n * per_assignment)?,
        Bits::new(per_assignment)?,
        1.0,
    )?;
    // (n log2 k) / log2 k is n up to rounding; expansions are integral.
    let whole = cost.round();
    Ok(if (cost - whole).abs() <= 1e-9 * whole.max(1.0) {
        whole
    } else {
        cost
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentKind {
    Random,
    Greedy,
    Acp,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::Random, AgentKind::Greedy, AgentKind::Acp];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Random => "random",
            AgentKind::Greedy => "greedy",
            AgentKind::Acp => "acp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchStats {
    pub expansions: u64,
    pub found: bool,
    /// Color per vertex when a coloring was found.
    pub assignment: Option<Vec<usize>>,
    pub c_eff_predicted: f64,
}

struct Search<'a> {
    graph: &'a Graph,
    agent: AgentKind,
    rng: ChaCha8Rng,
    domains: Vec<u32>,
    colors: Vec<Option<usize>>,
    expansions: u64,
}

impl Search<'_> {
    fn select_vertex(&mut self) -> Option<usize> {
        let uncolored = (0..self.graph.vertex_count()).filter(|&v| self.colors[v].is_none());
        match self.agent {
            AgentKind::Random => {
                let open: Vec<usize> = uncolored.collect();
                if open.is_empty() {
                    None
                } else {
                    Some(open[self.rng.random_range(0..open.len())])
                }
            }
            // max_by_key keeps the last maximum, so reverse the index to
            // prefer the lowest index among equals.
            AgentKind::Greedy => {
                uncolored.max_by_key(|&v| (self.graph.degree(v), std::cmp::Reverse(v)))
            }
            AgentKind::Acp => uncolored.min_by_key(|&v| {
                (
                    self.domains[v].count_ones(),
                    std::cmp::Reverse(self.graph.degree(v)),
                    v,
                )
            }),
        }
    }

    /// Number of uncolored neighbours of `v` that would lose `color`.
    fn conflicts(&self, v: usize, color: usize) -> usize {
        let bit = 1u32 << color;
        self.graph
            .neighbors(v)
            .iter()
            .filter(|&&u| self.colors[u].is_none() && self.domains[u] & bit != 0)
            .count()
    }

    fn order_values(&mut self, v: usize) -> Vec<usize> {
        let mut values: Vec<usize> = (0..MAX_COLORS)
            .filter(|&c| self.domains[v] & (1 << c) != 0)
            .collect();
        match self.agent {
            AgentKind::Random => values.shuffle(&mut self.rng),
            AgentKind::Greedy | AgentKind::Acp => {
                values.sort_by_key(|&c| (self.conflicts(v, c), c))
            }
        }
        values
    }

    fn run(&mut self) -> bool {
        let Some(v) = self.select_vertex() else {
            return true;
        };
        for color in self.order_values(v) {
            self.expansions += 1;
            let bit = 1u32 << color;
            self.colors[v] = Some(color);
            let mut pruned = Vec::new();
            let mut wiped = false;
            for &u in self.graph.neighbors(v) {
                if self.colors[u].is_none() && self.domains[u] & bit != 0 {
                    self.domains[u] &= !bit;
                    pruned.push(u);
                    wiped |= self.domains[u] == 0;
                }
            }
            if !wiped && self.run() {
                return true;
            }
            for u in pruned {
                self.domains[u] |= bit;
            }
        }
        self.colors[v] = None;
        false
    }
}

/// Solves `instance` with the given agent. Deterministic given `seed`; only
/// the random agent consumes randomness. An infeasible instance exhausts the
/// search and reports `found = false`.
pub fn solve(instance: &ColoringInstance, agent: AgentKind, seed: u64) -> Result<SearchStats> {
    let n = instance.graph.vertex_count();
    let mut search = Search {
        graph: &instance.graph,
        agent,
        rng: rng_from_seed(seed),
        domains: vec![full_domain(instance.k); n],
        colors: vec![None; n],
        expansions: 0,
    };
    let found = search.run();
    let assignment = found.then(|| {
        search
            .colors
            .iter()
            .map(|c| c.expect("all colored"))
            .collect()
    });
    Ok(SearchStats {
        expansions: search.expansions,
        found,
        assignment,
        c_eff_predicted: predict_cost(instance)?,
    })
}

/// One `(n, p)` configuration of a campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CampaignConfig {
    pub n: usize,
    pub p: f64,
    pub k: usize,
    pub instance_count: usize,
}

/// The five `(n, p)` pairs of the reference benchmark, 3 colors each.
pub fn default_configs(instance_count: usize) -> Vec<CampaignConfig> {
    [(8, 0.25), (10, 0.30), (12, 0.35), (15, 0.35), (15, 0.41)]
        .into_iter()
        .map(|(n, p)| CampaignConfig {
            n,
            p,
            k: 3,
            instance_count,
        })
        .collect()
}

/// Result of one solve within a campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceRow {
    pub config_index: usize,
    pub instance_id: usize,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub agent: AgentKind,
    pub expansions: u64,
    pub c_eff: f64,
    pub found: bool,
}

impl CsvRecord for InstanceRow {
    fn header() -> &'static [&'static str] {
        &[
            "instance_id",
            "n",
            "p",
            "seed",
            "agent",
            "expansions",
            "c_eff",
            "found",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.instance_id.to_string(),
            self.n.to_string(),
            fmt_real(self.p),
            self.seed.to_string(),
            self.agent.name().to_string(),
            self.expansions.to_string(),
            fmt_real(self.c_eff),
            self.found.to_string(),
        ]
    }
}

/// Aggregates for one configuration, mirroring the reference table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigSummary {
    pub n: usize,
    pub p: f64,
    pub random: MeanSe,
    pub greedy: MeanSe,
    pub acp: MeanSe,
    pub acp_prediction: f64,
    /// ACP runs with `expansions < c_eff`.
    pub bound_violations: usize,
    /// Mean of `expansions - c_eff` over ACP runs.
    pub acp_overshoot: MeanSe,
    /// Generated instances rejected as not k-colorable.
    pub discarded: usize,
}

impl CsvRecord for ConfigSummary {
    fn header() -> &'static [&'static str] {
        &[
            "n",
            "p",
            "random_mean",
            "greedy_mean",
            "acp_mean",
            "acp_prediction",
            "bound_violations",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt_real(self.p),
            fmt_real(self.random.mean),
            fmt_real(self.greedy.mean),
            fmt_real(self.acp.mean),
            fmt_real(self.acp_prediction),
            self.bound_violations.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub instances: Vec<InstanceRow>,
    pub summaries: Vec<ConfigSummary>,
}

/// Generates `instance_count` k-colorable instances per configuration and
/// solves each with all three agents.
///
/// Candidate `a` of configuration `c` uses graph seed
/// `derive_seed(seed, GRAPH_INSTANCE, (c << 32) | a)`; non-colorable candidates
/// are discarded and the attempt counter advances until enough instances
/// exist. Each solve is seeded by `derive_seed(graph_seed, COLORING_SOLVE,
/// agent)`. Instance ids are global across configurations, in declaration
/// order.
pub fn run_campaign(configs: &[CampaignConfig], seed: u64) -> Result<CampaignReport> {
    let mut instances = Vec::new();
    let mut discards = Vec::new();
    for (ci, cfg) in configs.iter().enumerate() {
        if cfg.instance_count < MIN_CAMPAIGN_INSTANCES {
            return Err(AcpError::domain(format!(
                "each configuration needs at least {MIN_CAMPAIGN_INSTANCES} instances"
            )));
        }
        let mut kept = Vec::with_capacity(cfg.instance_count);
        let mut discarded = 0;
        let mut attempt: u64 = 0;
        while kept.len() < cfg.instance_count {
            let graph_seed =
                derive_seed(seed, streams::GRAPH_INSTANCE, ((ci as u64) << 32) | attempt);
            attempt += 1;
            let instance = ColoringInstance::generate(cfg.n, cfg.p, cfg.k, graph_seed)?;
            if is_k_colorable(&instance.graph, cfg.k)? {
                kept.push((ci, instance));
            } else {
                discarded += 1;
            }
        }
        instances.extend(kept);
        discards.push(discarded);
    }

    let jobs: Vec<(usize, AgentKind)> = (0..instances.len())
        .flat_map(|i| AgentKind::ALL.into_iter().map(move |a| (i, a)))
        .collect();
    let rows: Vec<InstanceRow> = jobs
        .par_iter()
        .map(|&(i, agent)| {
            let (ci, instance) = &instances[i];
            let stats = solve(
                instance,
                agent,
                derive_seed(instance.seed, streams::COLORING_SOLVE, agent as u64),
            )?;
            Ok(InstanceRow {
                config_index: *ci,
                instance_id: i,
                n: instance.graph.vertex_count(),
                p: instance.p,
                seed: instance.seed,
                agent,
                expansions: stats.expansions,
                c_eff: stats.c_eff_predicted,
                found: stats.found,
            })
        })
        .collect::<Result<_>>()?;

    let summaries = configs
        .iter()
        .enumerate()
        .map(|(ci, cfg)| {
            let of_agent = |agent: AgentKind| {
                rows.iter()
                    .filter(move |r| r.config_index == ci && r.agent == agent)
            };
            let mean = |agent| MeanSe::of(of_agent(agent).map(|r| r.expansions as f64));
            let acp_prediction = of_agent(AgentKind::Acp)
                .map(|r| r.c_eff)
                .next()
                .unwrap_or(f64::NAN);
            ConfigSummary {
                n: cfg.n,
                p: cfg.p,
                random: mean(AgentKind::Random),
                greedy: mean(AgentKind::Greedy),
                acp: mean(AgentKind::Acp),
                acp_prediction,
                bound_violations: of_agent(AgentKind::Acp)
                    .filter(|r| !r.found || (r.expansions as f64) < r.c_eff)
                    .count(),
                acp_overshoot: MeanSe::of(
                    of_agent(AgentKind::Acp).map(|r| r.expansions as f64 - r.c_eff),
                ),
                discarded: discards[ci],
            }
        })
        .collect();
    Ok(CampaignReport {
        instances: rows,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(g: Graph, k: usize) -> ColoringInstance {
        ColoringInstance::new(g, k, 0, 0.0).unwrap()
    }

    #[test]
    fn graph_construction() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        let g = Graph::from_edges(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(Graph::complete(4).edge_count(), 6);
    }

    #[test]
    fn erdos_renyi_extremes_and_determinism() {
        assert_eq!(gen_erdos_renyi(4, 0.0, 3).unwrap().edge_count(), 0);
        assert_eq!(gen_erdos_renyi(4, 1.0, 3).unwrap().edge_count(), 6);
        assert_eq!(
            gen_erdos_renyi(12, 0.3, 9).unwrap(),
            gen_erdos_renyi(12, 0.3, 9).unwrap()
        );
        assert!(gen_erdos_renyi(0, 0.5, 0).is_err());
        assert!(gen_erdos_renyi(4, 1.5, 0).is_err());
        let g = gen_erdos_renyi(15, 0.4, 1).unwrap();
        for v in 0..15 {
            assert!(!g.neighbors(v).contains(&v));
            for &u in g.neighbors(v) {
                assert!(g.neighbors(u).contains(&v));
            }
        }
    }

    #[test]
    fn erdos_renyi_mean_edge_count() {
        let counts = MeanSe::of(
            (0..10_000u64).map(|s| gen_erdos_renyi(15, 0.35, s).unwrap().edge_count() as f64),
        );
        assert!((counts.mean - 36.75).abs() <= 3.0 * counts.se, "{counts:?}");
    }

    #[test]
    fn colorability_examples() {
        assert!(!is_k_colorable(&Graph::complete(4), 3).unwrap());
        assert!(!is_k_colorable(&Graph::cycle(5), 2).unwrap());
        assert!(is_k_colorable(&Graph::cycle(5), 3).unwrap());
        assert!(is_k_colorable(&Graph::cycle(6), 2).unwrap());
        assert!(is_k_colorable(&Graph::empty(0), 1).unwrap());
        assert!(is_k_colorable(&Graph::complete(4), 0).is_err());
    }

    #[test]
    fn counting_examples() {
        assert_eq!(count_proper_colorings(&Graph::complete(3), 3).unwrap(), 6);
        assert_eq!(count_proper_colorings(&Graph::empty(5), 3).unwrap(), 243);
        assert_eq!(
            count_proper_colorings(&Graph::empty(20), 3).unwrap(),
            3u128.pow(20)
        );
        // Chromatic polynomial of a path: k (k-1)^(n-1).
        assert_eq!(count_proper_colorings(&Graph::path(3), 3).unwrap(), 12);
        // Cycle: (k-1)^n + (-1)^n (k-1).
        assert_eq!(count_proper_colorings(&Graph::cycle(5), 3).unwrap(), 30);
        assert_eq!(count_proper_colorings(&Graph::complete(4), 3).unwrap(), 0);
        assert!(matches!(
            count_proper_colorings(&Graph::empty(21), 3),
            Err(AcpError::TooLarge { .. })
        ));
    }

    #[test]
    fn feasible_space_information_matches_count() {
        // 6-vertex cycle: 2^6 + 2 = 66 colorings.
        let bits = feasible_space_information(&Graph::cycle(6), 3)
            .unwrap()
            .value();
        assert!((bits - 66f64.log2()).abs() < 1e-12);
        assert!(feasible_space_information(&Graph::complete(4), 3)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn predicted_cost_is_vertex_count() {
        for (n, expected) in [(8, 8.0), (10, 10.0), (12, 12.0), (15, 15.0)] {
            let inst = ColoringInstance::generate(n, 0.3, 3, 1).unwrap();
            assert_eq!(predict_cost(&inst).unwrap(), expected);
        }
    }

    #[test]
    fn empty_graph_needs_exactly_n_expansions() {
        for agent in AgentKind::ALL {
            let stats = solve(&instance(Graph::empty(7), 3), agent, 5).unwrap();
            assert!(stats.found);
            assert_eq!(stats.expansions, 7);
        }
    }

    #[test]
    fn triangle_greedy_trace() {
        let stats = solve(&instance(Graph::complete(3), 3), AgentKind::Greedy, 0).unwrap();
        assert_eq!(stats.expansions, 3);
        assert_eq!(stats.assignment, Some(vec![0, 1, 2]));
    }

    #[test]
    fn infeasible_instance_exhausts() {
        for agent in AgentKind::ALL {
            let stats = solve(&instance(Graph::complete(4), 3), agent, 1).unwrap();
            assert!(!stats.found);
            assert!(stats.assignment.is_none());
            assert!(stats.expansions > 0);
        }
    }

    #[test]
    fn solutions_are_proper_and_bounded() {
        for s in 0..200u64 {
            let inst = ColoringInstance::generate(10, 0.35, 3, s).unwrap();
            let colorable = is_k_colorable(&inst.graph, 3).unwrap();
            for agent in AgentKind::ALL {
                let stats = solve(&inst, agent, s).unwrap();
                assert_eq!(stats.found, colorable);
                if let Some(a) = &stats.assignment {
                    assert!(inst.graph.is_proper_coloring(a));
                    assert!(stats.expansions >= 10);
                    assert!(stats.c_eff_predicted <= stats.expansions as f64);
                }
                assert_eq!(stats, solve(&inst, agent, s).unwrap());
            }
        }
    }

    #[test]
    fn oracles_agree_on_small_graphs() {
        for s in 0..200u64 {
            let n = 3 + (s % 8) as usize;
            let p = 0.2 + 0.6 * ((s * 7) % 10) as f64 / 10.0;
            let g = gen_erdos_renyi(n, p, s).unwrap();
            for k in [2, 3] {
                assert_eq!(
                    is_k_colorable(&g, k).unwrap(),
                    count_proper_colorings(&g, k).unwrap() > 0,
                    "seed {s} k {k}"
                );
            }
        }
    }

    #[test]
    fn campaign_validation_and_shape() {
        let mut cfg = default_configs(MIN_CAMPAIGN_INSTANCES);
        cfg.truncate(2);
        let report = run_campaign(&cfg, 3).unwrap();
        assert_eq!(report.instances.len(), 2 * 50 * 3);
        assert_eq!(report.summaries.len(), 2);
        assert_eq!(report.summaries[0].acp_prediction, 8.0);
        assert_eq!(report.summaries[1].acp_prediction, 10.0);
        assert_eq!(report, run_campaign(&cfg, 3).unwrap());
        assert!(run_campaign(&default_configs(49), 0).is_err());
    }
}
