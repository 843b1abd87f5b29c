//! Specialised primal-dual solver for the homogeneous problem.
//!
//! The network view has a source per agent, a sink per location and a global
//! sink reached from location `k` through unit arcs of cost `-p_{k1}, -p_{k2},
//! ...`. The solver never builds those arcs. A heap holds, for each live
//! location, the next unused arc cost; each extraction creates one unit of
//! demand at that location and [`SolverState::assign_extra_demand`] tries to
//! route it to an agent with spare supply along an alternating path. When no
//! such path exists, every node the search touched forms an isolated group
//! that is removed for good.
//!
//! Dual prices are never computed here. The [`SolveTrace`] keeps the extraction
//! values and group membership needed to rebuild them (see
//! [`crate::certificate`]).

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Schedule, SearchInstance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the exact solver needs location-only detection probabilities; use the greedy solver for agent-dependent ones")]
    NotHomogeneous,
}

/// A node of the bipartite network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Source(usize),
    Sink(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// `p_{kj}` left the heap for a live location.
    Extraction {
        location: usize,
        index: u64,
        value: f64,
    },
    /// One unit of demand was routed along `path`, which alternates sinks and
    /// sources from the demanding location to `agent`.
    Assignment { path: Vec<Node>, agent: usize },
    /// A failed search isolated these nodes; `value` is the extraction that
    /// triggered it.
    Elimination {
        sources: Vec<usize>,
        sinks: Vec<usize>,
        value: f64,
    },
    /// The heap ran empty. `last_value` is the final processed extraction.
    Termination { last_value: f64 },
}

/// Ordered record of a solver run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub events: Vec<TraceEvent>,
}

impl SolveTrace {
    /// Extraction values in order.
    pub fn extracted_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Extraction { value, .. } => Some(*value),
            _ => None,
        })
    }

    pub fn assignments(&self) -> impl Iterator<Item = (&[Node], usize)> + '_ {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Assignment { path, agent } => Some((path.as_slice(), *agent)),
            _ => None,
        })
    }

    pub fn eliminations(&self) -> impl Iterator<Item = (&[usize], &[usize], f64)> + '_ {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Elimination {
                sources,
                sinks,
                value,
            } => Some((sources.as_slice(), sinks.as_slice(), *value)),
            _ => None,
        })
    }
}

/// Work counters collected during a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    /// Adjacency entries inspected while searching for augmenting paths.
    pub edge_visits: u64,
    pub heap_pushes: u64,
    pub heap_pops: u64,
    /// Pops discarded because their location was already eliminated.
    pub skipped_pops: u64,
    pub augmentations: u64,
    /// Augmentations whose path has more than one arc.
    pub multi_hop: u64,
    pub eliminations: u64,
}

/// Nodes reached by a failed augmenting-path search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VisitedSet {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DemandOutcome {
    /// The unit was routed to `agent` along `path` (demanding sink first).
    Assigned {
        agent: usize,
        path: Vec<Node>,
    },
    NoPath(VisitedSet),
}

/// Heap entry for the next unused unit arc of a location. The max-heap pops the
/// largest `p` first, which is the smallest cost `-p`; ties go to the lower
/// location, then the lower index.
#[derive(Debug, Clone, Copy)]
struct Pending {
    value: f64,
    location: usize,
    index: u64,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.location.cmp(&self.location))
            .then_with(|| other.index.cmp(&self.index))
    }
}

const NO_ARC: usize = usize::MAX;

/// Mutable state of a run: residual supplies, arc flows, elimination flags and
/// breadth-first-search scratch space.
#[derive(Debug, Clone)]
pub struct SolverState<'a> {
    instance: &'a SearchInstance,
    residual: Vec<u64>,
    flow: Vec<u64>,
    source_eliminated: Vec<bool>,
    sink_eliminated: Vec<bool>,
    // Per location, position in its arc list before which every agent is
    // out of supply. Supplies never grow, so the cursor only moves forward.
    supply_cursor: Vec<usize>,
    // Search scratch. A node is marked when its stamp equals `epoch`.
    epoch: u32,
    source_stamp: Vec<u32>,
    sink_stamp: Vec<u32>,
    source_pred: Vec<usize>,
    sink_pred: Vec<usize>,
    queue: VecDeque<Node>,
    counters: Counters,
}

impl<'a> SolverState<'a> {
    pub fn new(instance: &'a SearchInstance) -> Result<Self, SolveError> {
        if !instance.is_homogeneous() {
            return Err(SolveError::NotHomogeneous);
        }
        let m = instance.num_agents();
        let k = instance.num_locations();
        Ok(SolverState {
            instance,
            residual: instance.budgets().to_vec(),
            flow: vec![0; instance.num_arcs()],
            source_eliminated: vec![false; m],
            sink_eliminated: vec![false; k],
            supply_cursor: vec![0; k],
            epoch: 0,
            source_stamp: vec![0; m],
            sink_stamp: vec![0; k],
            source_pred: vec![NO_ARC; m],
            sink_pred: vec![NO_ARC; k],
            queue: VecDeque::new(),
            counters: Counters::default(),
        })
    }

    pub fn residual(&self, agent: usize) -> u64 {
        self.residual[agent]
    }

    pub fn flow(&self, arc: usize) -> u64 {
        self.flow[arc]
    }

    pub fn is_source_eliminated(&self, agent: usize) -> bool {
        self.source_eliminated[agent]
    }

    pub fn is_sink_eliminated(&self, location: usize) -> bool {
        self.sink_eliminated[location]
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    /// Charges one unit of supply to `agent` after a successful assignment.
    pub fn consume_supply(&mut self, agent: usize) {
        assert!(self.residual[agent] > 0, "agent {agent} has no supply left");
        self.residual[agent] -= 1;
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::from_counts(self.flow.clone())
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.source_stamp.fill(0);
            self.sink_stamp.fill(0);
            self.epoch = 1;
        }
    }

    /// First arc into `location` (ascending agent) whose agent still has
    /// supply.
    fn first_supplied(&mut self, location: usize) -> Option<usize> {
        let arcs = self.instance.location_arcs(location);
        let mut pos = self.supply_cursor[location];
        while pos < arcs.len() {
            self.counters.edge_visits += 1;
            let agent = self.instance.arc(arcs[pos]).agent;
            if self.residual[agent] > 0 {
                break;
            }
            pos += 1;
        }
        self.supply_cursor[location] = pos;
        arcs.get(pos).copied()
    }

    /// Breadth-first search for an alternating path from sink `t` to an agent
    /// with spare supply. On success the path is augmented (flow +1 on every
    /// sink-to-source hop, -1 on every source-to-sink hop), so `u_t` grows by
    /// one and every other location total is unchanged; the agent's supply is
    /// left for the caller to charge. On failure nothing changes and the
    /// visited nodes are returned.
    pub fn assign_extra_demand(&mut self, t: usize) -> DemandOutcome {
        debug_assert!(!self.sink_eliminated[t]);
        let inst = self.instance;
        self.next_epoch();
        let epoch = self.epoch;
        self.queue.clear();
        self.sink_stamp[t] = epoch;
        self.sink_pred[t] = NO_ARC;
        self.queue.push_back(Node::Sink(t));
        let mut visited = VisitedSet::default();

        while let Some(node) = self.queue.pop_front() {
            match node {
                Node::Sink(k) => {
                    if let Some(arc) = self.first_supplied(k) {
                        let agent = inst.arc(arc).agent;
                        self.source_pred[agent] = arc;
                        let path = self.augment(agent);
                        return DemandOutcome::Assigned { agent, path };
                    }
                    for &arc in inst.location_arcs(k) {
                        self.counters.edge_visits += 1;
                        let m = inst.arc(arc).agent;
                        if self.source_eliminated[m] || self.source_stamp[m] == epoch {
                            continue;
                        }
                        self.source_stamp[m] = epoch;
                        self.source_pred[m] = arc;
                        self.queue.push_back(Node::Source(m));
                    }
                    visited.sinks.push(k);
                }
                Node::Source(m) => {
                    debug_assert_eq!(self.residual[m], 0);
                    for arc in inst.agent_arcs(m) {
                        self.counters.edge_visits += 1;
                        let k = inst.arc(arc).location;
                        if self.flow[arc] == 0
                            || self.sink_eliminated[k]
                            || self.sink_stamp[k] == epoch
                        {
                            continue;
                        }
                        self.sink_stamp[k] = epoch;
                        self.sink_pred[k] = arc;
                        self.queue.push_back(Node::Sink(k));
                    }
                    visited.sources.push(m);
                }
            }
        }
        DemandOutcome::NoPath(visited)
    }

    fn augment(&mut self, agent: usize) -> Vec<Node> {
        let inst = self.instance;
        let mut path = vec![Node::Source(agent)];
        let mut m = agent;
        loop {
            let forward = self.source_pred[m];
            self.flow[forward] += 1;
            let k = inst.arc(forward).location;
            path.push(Node::Sink(k));
            let backward = self.sink_pred[k];
            if backward == NO_ARC {
                break;
            }
            debug_assert!(self.flow[backward] > 0);
            self.flow[backward] -= 1;
            m = inst.arc(backward).agent;
            path.push(Node::Source(m));
        }
        path.reverse();
        self.counters.augmentations += 1;
        if path.len() > 2 {
            self.counters.multi_hop += 1;
        }
        path
    }

    /// Removes the nodes of a failed search from all later searches.
    pub fn eliminate_group(&mut self, visited: &VisitedSet) {
        for &m in &visited.sources {
            debug_assert_eq!(self.residual[m], 0, "eliminated agent {m} still has supply");
            self.source_eliminated[m] = true;
        }
        for &k in &visited.sinks {
            self.sink_eliminated[k] = true;
        }
        self.counters.eliminations += 1;
    }
}

/// Output of an instrumented run.
#[derive(Debug, Clone)]
pub struct Solved {
    pub schedule: Schedule,
    pub trace: SolveTrace,
    pub counters: Counters,
}

/// Runs the solver and returns the schedule, trace and work counters.
pub fn solve_instrumented(instance: &SearchInstance) -> Result<Solved, SolveError> {
    let mut state = SolverState::new(instance)?;
    let mut trace = SolveTrace::default();
    let mut heap = BinaryHeap::with_capacity(instance.num_locations());
    for k in 0..instance.num_locations() {
        heap.push(Pending {
            value: instance.prior(k) * instance.alpha(k),
            location: k,
            index: 1,
        });
    }
    state.counters.heap_pushes += instance.num_locations() as u64;
    let mut last_value = f64::NAN;

    while let Some(entry) = heap.pop() {
        state.counters.heap_pops += 1;
        let k = entry.location;
        if state.sink_eliminated[k] {
            state.counters.skipped_pops += 1;
            continue;
        }
        trace.events.push(TraceEvent::Extraction {
            location: k,
            index: entry.index,
            value: entry.value,
        });
        last_value = entry.value;
        match state.assign_extra_demand(k) {
            DemandOutcome::Assigned { agent, path } => {
                state.consume_supply(agent);
                trace.events.push(TraceEvent::Assignment { path, agent });
                heap.push(Pending {
                    value: entry.value * (1.0 - instance.alpha(k)),
                    location: k,
                    index: entry.index + 1,
                });
                state.counters.heap_pushes += 1;
            }
            DemandOutcome::NoPath(visited) => {
                state.eliminate_group(&visited);
                trace.events.push(TraceEvent::Elimination {
                    sources: visited.sources,
                    sinks: visited.sinks,
                    value: entry.value,
                });
            }
        }
    }
    trace.events.push(TraceEvent::Termination { last_value });

    // Every agent reaches some location, so all supply must have been placed.
    if let Some(m) = state.residual.iter().position(|&r| r > 0) {
        panic!(
            "solver finished with {} unplaced units at agent {m}",
            state.residual[m]
        );
    }

    Ok(Solved {
        schedule: state.schedule(),
        trace,
        counters: state.counters,
    })
}

/// Optimal schedule for a homogeneous instance, with its trace.
pub fn solve(instance: &SearchInstance) -> Result<(Schedule, SolveTrace), SolveError> {
    let solved = solve_instrumented(instance)?;
    Ok((solved.schedule, solved.trace))
}
