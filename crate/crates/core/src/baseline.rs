//! Reference solvers used to cross-check and benchmark the specialised one.
//!
//! [`solve_mincost`] runs a textbook successive-shortest-path min-cost flow on
//! the explicit network, parallel unit arcs and all. It stands in for the
//! general-purpose min-cost-flow class; it is not a port of any particular
//! library. [`brute_force`] enumerates every feasible allocation of tiny
//! instances.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use thiserror::Error;

use crate::model::{self, Schedule, SearchInstance};

/// Unit-arc count above which building the network logs a warning.
pub const UNIT_ARC_WARNING: u64 = 10_000_000;

/// Maximum enumeration size accepted by [`brute_force`].
pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("instance too large to enumerate (about {estimate:.3e} allocations)")]
    TooLarge { estimate: f64 },
    #[error("min-cost flow exceeded its time limit")]
    TimedOut,
    #[error("the network baseline needs location-only detection probabilities")]
    NotHomogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkArc {
    pub from: usize,
    pub to: usize,
    pub capacity: u64,
    pub cost: f64,
}

/// Explicit network: sources `0..M`, sinks `M..M+K`, global sink `M+K`.
///
/// The first `|A|` arcs are the zero-cost source-to-sink arcs in instance arc
/// order, followed by `N` unit arcs per sink with costs `-p_{k1}, ..., -p_{kN}`.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub num_sources: usize,
    pub num_sinks: usize,
    pub supplies: Vec<u64>,
    pub arcs: Vec<NetworkArc>,
    pub transport_arcs: usize,
}

impl FlowNetwork {
    pub fn global_sink(&self) -> usize {
        self.num_sources + self.num_sinks
    }

    pub fn num_nodes(&self) -> usize {
        self.num_sources + self.num_sinks + 1
    }

    pub fn total_supply(&self) -> u64 {
        self.supplies.iter().sum()
    }
}

pub fn build_network(instance: &SearchInstance) -> Result<FlowNetwork, BaselineError> {
    if !instance.is_homogeneous() {
        return Err(BaselineError::NotHomogeneous);
    }
    let m = instance.num_agents();
    let k = instance.num_locations();
    let n = instance.total_budget();
    let unit_arcs = k as u64 * n;
    if unit_arcs > UNIT_ARC_WARNING {
        log::warn!("explicit network needs {unit_arcs} unit arcs");
    }
    let mut arcs = Vec::with_capacity(instance.num_arcs() + unit_arcs as usize);
    for arc in instance.arcs() {
        arcs.push(NetworkArc {
            from: arc.agent,
            to: m + arc.location,
            capacity: instance.budget(arc.agent),
            cost: 0.0,
        });
    }
    for loc in 0..k {
        for p in model::MarginalValues::new(instance, loc).take(n as usize) {
            arcs.push(NetworkArc {
                from: m + loc,
                to: m + k,
                capacity: 1,
                cost: -p,
            });
        }
    }
    Ok(FlowNetwork {
        num_sources: m,
        num_sinks: k,
        supplies: instance.budgets().to_vec(),
        arcs,
        transport_arcs: instance.num_arcs(),
    })
}

#[derive(Debug, Clone)]
pub struct MinCostFlow {
    pub schedule: Schedule,
    /// Negated flow cost, i.e. the detection probability.
    pub objective: f64,
    /// Flow on every network arc, in network arc order.
    pub flows: Vec<u64>,
}

#[derive(Clone, Copy)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Frontier {}
impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Residual graph with paired forward/backward edges (`e ^ 1` is the twin).
struct Residual {
    head: Vec<usize>,
    cap: Vec<u64>,
    cost: Vec<f64>,
    adj_start: Vec<usize>,
    adj: Vec<usize>,
}

impl Residual {
    fn new(num_nodes: usize, arcs: &[(usize, usize, u64, f64)]) -> Self {
        let mut head = Vec::with_capacity(2 * arcs.len());
        let mut cap = Vec::with_capacity(2 * arcs.len());
        let mut cost = Vec::with_capacity(2 * arcs.len());
        let mut degree = vec![0usize; num_nodes + 1];
        for &(from, to, c, w) in arcs {
            head.extend([to, from]);
            cap.extend([c, 0]);
            cost.extend([w, -w]);
            degree[from + 1] += 1;
            degree[to + 1] += 1;
        }
        for i in 0..num_nodes {
            degree[i + 1] += degree[i];
        }
        let mut fill = degree.clone();
        let mut adj = vec![0usize; 2 * arcs.len()];
        for (i, &(from, to, _, _)) in arcs.iter().enumerate() {
            adj[fill[from]] = 2 * i;
            fill[from] += 1;
            adj[fill[to]] = 2 * i + 1;
            fill[to] += 1;
        }
        Residual {
            head,
            cap,
            cost,
            adj_start: degree,
            adj,
        }
    }

    fn edges(&self, node: usize) -> &[usize] {
        &self.adj[self.adj_start[node]..self.adj_start[node + 1]]
    }
}

/// Successive shortest augmenting paths with node potentials.
///
/// A super source feeds every agent. Initial potentials come from one pass over
/// the acyclic initial network, which makes every reduced cost nonnegative
/// despite the negative unit-arc costs; Dijkstra then finds each augmenting
/// path. `deadline` bounds the wall-clock time.
pub fn solve_mincost(
    network: &FlowNetwork,
    deadline: Option<Instant>,
) -> Result<MinCostFlow, BaselineError> {
    let super_source = network.num_nodes();
    let sink = network.global_sink();
    let num_nodes = network.num_nodes() + 1;

    let mut arcs: Vec<(usize, usize, u64, f64)> = network
        .arcs
        .iter()
        .map(|a| (a.from, a.to, a.capacity, a.cost))
        .collect();
    for (m, &s) in network.supplies.iter().enumerate() {
        arcs.push((super_source, m, s, 0.0));
    }
    let mut g = Residual::new(num_nodes, &arcs);

    // Shortest distances in the initial DAG: zero everywhere except the
    // global sink, reached through the cheapest unit arc.
    let mut potential = vec![0.0f64; num_nodes];
    potential[sink] = network.arcs[network.transport_arcs..]
        .iter()
        .map(|a| a.cost)
        .fold(0.0, f64::min);

    let mut dist = vec![f64::INFINITY; num_nodes];
    let mut prev = vec![usize::MAX; num_nodes];
    let mut done = vec![false; num_nodes];
    let mut heap = BinaryHeap::new();
    let mut remaining = network.total_supply();

    while remaining > 0 {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(BaselineError::TimedOut);
        }
        dist.fill(f64::INFINITY);
        prev.fill(usize::MAX);
        done.fill(false);
        heap.clear();
        dist[super_source] = 0.0;
        heap.push(Frontier {
            dist: 0.0,
            node: super_source,
        });
        while let Some(Frontier { dist: d, node: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == sink {
                break;
            }
            for &e in g.edges(u) {
                if g.cap[e] == 0 {
                    continue;
                }
                let v = g.head[e];
                if done[v] {
                    continue;
                }
                let reduced = (g.cost[e] + potential[u] - potential[v]).max(0.0);
                let nd = d + reduced;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = e;
                    heap.push(Frontier { dist: nd, node: v });
                }
            }
        }
        assert!(
            dist[sink].is_finite(),
            "global sink unreachable with {remaining} units left"
        );
        let cutoff = dist[sink];
        for (p, &d) in potential.iter_mut().zip(&dist) {
            *p += d.min(cutoff);
        }

        let mut push = remaining;
        let mut v = sink;
        while v != super_source {
            let e = prev[v];
            push = push.min(g.cap[e]);
            v = g.head[e ^ 1];
        }
        let mut v = sink;
        while v != super_source {
            let e = prev[v];
            g.cap[e] -= push;
            g.cap[e ^ 1] += push;
            v = g.head[e ^ 1];
        }
        remaining -= push;
    }

    let flows: Vec<u64> = (0..network.arcs.len()).map(|i| g.cap[2 * i + 1]).collect();
    let cost: f64 = network
        .arcs
        .iter()
        .zip(&flows)
        .filter(|(_, &f)| f > 0)
        .map(|(a, &f)| a.cost * f as f64)
        .sum();
    Ok(MinCostFlow {
        schedule: Schedule::from_counts(flows[..network.transport_arcs].to_vec()),
        objective: -cost,
        flows,
    })
}

/// Builds the explicit network and solves it.
pub fn solve_instance(
    instance: &SearchInstance,
    deadline: Option<Instant>,
) -> Result<MinCostFlow, BaselineError> {
    solve_mincost(&build_network(instance)?, deadline)
}

/// Upper bound on the number of allocations [`brute_force`] would visit.
pub fn enumeration_size(instance: &SearchInstance) -> f64 {
    let extra = if instance.is_homogeneous() { 0 } else { 1 };
    (0..instance.num_agents())
        .map(|m| ((instance.agent_arcs(m).len() + extra) as f64).powf(instance.budget(m) as f64))
        .product()
}

/// Exact optimum by exhaustive enumeration: budgets are spent exactly on
/// homogeneous instances and at most on heterogeneous ones.
pub fn brute_force(instance: &SearchInstance) -> Result<(Schedule, f64), BaselineError> {
    let estimate = enumeration_size(instance);
    if estimate > BRUTE_FORCE_LIMIT {
        return Err(BaselineError::TooLarge { estimate });
    }
    let exact = instance.is_homogeneous();
    let per_agent: Vec<Vec<Vec<u64>>> = (0..instance.num_agents())
        .map(|m| spreads(instance.agent_arcs(m).len(), instance.budget(m), exact))
        .collect();

    let mut current = Schedule::zeros(instance);
    let mut best = (current.clone(), f64::NEG_INFINITY);
    enumerate(instance, &per_agent, 0, &mut current, &mut best);
    Ok(best)
}

fn enumerate(
    instance: &SearchInstance,
    per_agent: &[Vec<Vec<u64>>],
    agent: usize,
    current: &mut Schedule,
    best: &mut (Schedule, f64),
) {
    if agent == per_agent.len() {
        let value = model::objective(current, instance).expect("shape matches");
        if value > best.1 {
            *best = (current.clone(), value);
        }
        return;
    }
    let range = instance.agent_arcs(agent);
    for spread in &per_agent[agent] {
        for (arc, &c) in range.clone().zip(spread) {
            current.set(arc, c);
        }
        enumerate(instance, per_agent, agent + 1, current, best);
    }
    for arc in range {
        current.set(arc, 0);
    }
}

/// All ways to spread `total` (or at most `total`) units over `slots`.
fn spreads(slots: usize, total: u64, exact: bool) -> Vec<Vec<u64>> {
    fn rec(slots: usize, left: u64, exact: bool, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if prefix.len() + 1 == slots {
            let lo = if exact { left } else { 0 };
            for c in lo..=left {
                prefix.push(c);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            rec(slots, left - c, exact, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if slots > 0 {
        rec(
            slots,
            total,
            exact,
            &mut Vec::with_capacity(slots),
            &mut out,
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::homogeneous;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn minimal_network() {
        let inst = homogeneous(&[1], &[0.5], &[0.5], &[(0, 0)]);
        let net = build_network(&inst).unwrap();
        assert_eq!(net.num_nodes(), 3);
        assert_eq!(net.arcs.len(), 2);
        assert_eq!(net.arcs[0].cost, 0.0);
        assert_eq!(net.arcs[1].cost, -0.25);
        let sol = solve_mincost(&net, None).unwrap();
        assert_eq!(sol.objective, 0.25);
        assert_eq!(sol.schedule.counts(), &[1]);
    }

    #[test]
    fn arc_counts() {
        let inst = homogeneous(
            &[1, 2],
            &[0.5, 0.3, 0.2],
            &[0.5, 0.8, 0.6],
            &[(0, 0), (0, 1), (1, 1), (1, 2)],
        );
        let net = build_network(&inst).unwrap();
        assert_eq!(net.transport_arcs, 4);
        assert_eq!(net.arcs.len(), 4 + 3 * 3);
        assert_eq!(net.total_supply(), 3);
        for loc in 0..3 {
            let costs: Vec<f64> = net.arcs[4 + 3 * loc..4 + 3 * (loc + 1)]
                .iter()
                .map(|a| a.cost)
                .collect();
            assert!(costs.windows(2).all(|w| w[0] <= w[1]));
        }
        assert!(close(solve_mincost(&net, None).unwrap().objective, 0.61));
        assert!(close(brute_force(&inst).unwrap().1, 0.61));
    }

    #[test]
    fn reroute_and_stranded_examples() {
        let reroute = homogeneous(&[1, 1], &[0.6, 0.8], &[0.5, 0.5], &[(0, 0), (0, 1), (1, 1)]);
        assert!(close(
            solve_instance(&reroute, None).unwrap().objective,
            0.70
        ));
        assert!(close(brute_force(&reroute).unwrap().1, 0.70));

        let stranded = homogeneous(&[1, 1], &[0.6, 0.2], &[0.5, 0.5], &[(0, 0), (0, 1), (1, 0)]);
        let (schedule, value) = brute_force(&stranded).unwrap();
        assert!(close(value, 0.45));
        assert_eq!(schedule.counts(), &[1, 0, 1]);
    }

    #[test]
    fn single_agent_full_access_takes_top_marginals() {
        let inst = homogeneous(
            &[4],
            &[0.5, 0.3, 0.2],
            &[0.4, 0.9, 0.7],
            &[(0, 0), (0, 1), (0, 2)],
        );
        let mut values: Vec<f64> = (0..3)
            .flat_map(|k| {
                model::MarginalValues::new(&inst, k)
                    .take(4)
                    .collect::<Vec<_>>()
            })
            .collect();
        values.sort_by(|a, b| b.total_cmp(a));
        let top: f64 = values[..4].iter().sum();
        assert!(close(brute_force(&inst).unwrap().1, top));
    }

    #[test]
    fn enumeration_guard() {
        let inst = homogeneous(&[30], &[0.5, 0.5], &[0.5, 0.5], &[(0, 0), (0, 1)]);
        assert!(matches!(
            brute_force(&inst),
            Err(BaselineError::TooLarge { .. })
        ));
    }

    #[test]
    fn spreads_counts() {
        // Multisets of size 3 over 2 slots: 4. Of size at most 3: 10.
        assert_eq!(spreads(2, 3, true).len(), 4);
        assert_eq!(spreads(2, 3, false).len(), 10);
        assert_eq!(spreads(1, 2, true), vec![vec![2]]);
    }

    #[test]
    fn deadline_in_the_past_times_out() {
        let inst = homogeneous(&[1], &[0.5], &[0.5], &[(0, 0)]);
        let past = Instant::now();
        std::thread::sleep(std::time::Duration::from_millis(1));
        assert_eq!(
            solve_instance(&inst, Some(past)).unwrap_err(),
            BaselineError::TimedOut
        );
    }
}
