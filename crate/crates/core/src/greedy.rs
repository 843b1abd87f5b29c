//! Agent-dependent detection probabilities.
//!
//! With `alpha_{mk}` depending on the agent the allocation problem is NP-hard.
//! Splitting every agent into `N_m` unit-budget copies turns it into
//! maximising a monotone submodular set function over a partition matroid,
//! where the plain greedy is a 1/2-approximation. The copies are never built:
//! an [`AssignmentSet`] stores multiplicities per accessibility arc, and a
//! feasible set uses agent `m` at most `N_m` times.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::model::{Schedule, SearchInstance};

/// Tolerance for the monotonicity and diminishing-returns checks.
pub const PROPERTY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GreedyError {
    #[error("assignment uses agent {agent} {used} times, budget {budget}")]
    InfeasibleSet {
        agent: usize,
        used: u64,
        budget: u64,
    },
    #[error("assignment has {found} arc multiplicities, instance has {expected} arcs")]
    ShapeMismatch { expected: usize, found: usize },
}

/// Multiset of accessibility arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentSet {
    multiplicity: Vec<u64>,
}

impl AssignmentSet {
    pub fn empty(instance: &SearchInstance) -> Self {
        AssignmentSet {
            multiplicity: vec![0; instance.num_arcs()],
        }
    }

    pub fn from_multiplicities(multiplicity: Vec<u64>) -> Self {
        AssignmentSet { multiplicity }
    }

    pub fn from_schedule(schedule: &Schedule) -> Self {
        AssignmentSet {
            multiplicity: schedule.counts().to_vec(),
        }
    }

    pub fn to_schedule(&self) -> Schedule {
        Schedule::from_counts(self.multiplicity.clone())
    }

    pub fn multiplicity(&self, arc: usize) -> u64 {
        self.multiplicity[arc]
    }

    pub fn insert(&mut self, arc: usize) {
        self.multiplicity[arc] += 1;
    }

    pub fn remove(&mut self, arc: usize) -> bool {
        if self.multiplicity[arc] == 0 {
            return false;
        }
        self.multiplicity[arc] -= 1;
        true
    }

    /// Number of unit elements.
    pub fn len(&self) -> u64 {
        self.multiplicity.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn agent_usage(&self, instance: &SearchInstance, agent: usize) -> u64 {
        instance
            .agent_arcs(agent)
            .map(|a| self.multiplicity[a])
            .sum()
    }

    /// Componentwise `self <= other`.
    pub fn is_subset_of(&self, other: &AssignmentSet) -> bool {
        self.multiplicity
            .iter()
            .zip(&other.multiplicity)
            .all(|(a, b)| a <= b)
    }

    pub fn check_feasible(&self, instance: &SearchInstance) -> Result<(), GreedyError> {
        if self.multiplicity.len() != instance.num_arcs() {
            return Err(GreedyError::ShapeMismatch {
                expected: instance.num_arcs(),
                found: self.multiplicity.len(),
            });
        }
        for agent in 0..instance.num_agents() {
            let used = self.agent_usage(instance, agent);
            let budget = instance.budget(agent);
            if used > budget {
                return Err(GreedyError::InfeasibleSet {
                    agent,
                    used,
                    budget,
                });
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, instance: &SearchInstance) -> bool {
        self.check_feasible(instance).is_ok()
    }
}

/// `f(S) = sum_k p_k0 (1 - prod_{(n,k) in S} (1 - alpha_nk))`.
pub fn f_value(set: &AssignmentSet, instance: &SearchInstance) -> Result<f64, GreedyError> {
    set.check_feasible(instance)?;
    Ok(unchecked_value(set, instance))
}

fn unchecked_value(set: &AssignmentSet, instance: &SearchInstance) -> f64 {
    let mut miss = vec![1.0f64; instance.num_locations()];
    for (idx, arc) in instance.arcs().iter().enumerate() {
        for _ in 0..set.multiplicity[idx] {
            miss[arc.location] *= 1.0 - instance.arc_alpha(idx);
        }
    }
    instance
        .priors()
        .iter()
        .zip(&miss)
        .map(|(p, q)| p * (1.0 - q))
        .sum()
}

/// `(V, k, m)`: `V` is the gain of assigning agent `m` to location `k` next.
/// Larger values pop first; ties go to the lower location, then lower agent.
#[derive(Debug, Clone, Copy)]
pub struct GreedyHeapEntry {
    pub value: f64,
    pub location: usize,
    pub agent: usize,
    arc: usize,
}

impl PartialEq for GreedyHeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for GreedyHeapEntry {}
impl PartialOrd for GreedyHeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for GreedyHeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.location.cmp(&self.location))
            .then_with(|| other.agent.cmp(&self.agent))
    }
}

/// Arc into `location` with the largest alpha among agents that still have
/// supply; ties go to the lower agent.
fn best_supplied(instance: &SearchInstance, residual: &[u64], location: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &arc in instance.location_arcs(location) {
        if residual[instance.arc(arc).agent] == 0 {
            continue;
        }
        let alpha = instance.arc_alpha(arc);
        if best.is_none_or(|(_, a)| alpha > a) {
            best = Some((arc, alpha));
        }
    }
    best.map(|(arc, _)| arc)
}

/// Lazy heap greedy. Keeps one entry per live location; a popped entry whose
/// agent ran dry is re-keyed to the best remaining agent by scaling its value
/// with the alpha ratio, and the location is dropped once no agent with supply
/// can reach it.
pub fn greedy_solve(instance: &SearchInstance) -> Schedule {
    let mut residual = instance.budgets().to_vec();
    let mut counts = vec![0u64; instance.num_arcs()];
    let mut miss = vec![1.0f64; instance.num_locations()];
    let mut heap = BinaryHeap::with_capacity(instance.num_locations());

    for k in 0..instance.num_locations() {
        if let Some(arc) = best_supplied(instance, &residual, k) {
            heap.push(GreedyHeapEntry {
                value: instance.arc_alpha(arc) * instance.prior(k),
                location: k,
                agent: instance.arc(arc).agent,
                arc,
            });
        }
    }

    while let Some(entry) = heap.pop() {
        let GreedyHeapEntry {
            value,
            location: k,
            agent,
            arc,
        } = entry;
        let alpha = instance.arc_alpha(arc);
        if residual[agent] > 0 {
            counts[arc] += 1;
            residual[agent] -= 1;
            miss[k] *= 1.0 - alpha;
            heap.push(GreedyHeapEntry {
                value: value * (1.0 - alpha),
                ..entry
            });
        } else if let Some(next) = best_supplied(instance, &residual, k) {
            let next_alpha = instance.arc_alpha(next);
            let rekeyed = value * next_alpha / alpha;
            debug_assert!(
                (rekeyed - instance.prior(k) * next_alpha * miss[k]).abs() <= 1e-12,
                "re-keyed gain drifted from direct recomputation"
            );
            heap.push(GreedyHeapEntry {
                value: rekeyed,
                location: k,
                agent: instance.arc(next).agent,
                arc: next,
            });
        }
    }
    Schedule::from_counts(counts)
}

/// Textbook greedy: each step scans every arc with supply for the largest
/// marginal gain (ties: lower location, then lower agent).
pub fn naive_greedy(instance: &SearchInstance) -> Schedule {
    let mut residual = instance.budgets().to_vec();
    let mut counts = vec![0u64; instance.num_arcs()];
    let mut miss = vec![1.0f64; instance.num_locations()];
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (idx, arc) in instance.arcs().iter().enumerate() {
            if residual[arc.agent] == 0 {
                continue;
            }
            let gain = instance.prior(arc.location) * instance.arc_alpha(idx) * miss[arc.location];
            let better = match best {
                None => true,
                Some((b, g)) => {
                    let cur = instance.arc(b);
                    gain > g || (gain == g && (arc.location, arc.agent) < (cur.location, cur.agent))
                }
            };
            if better {
                best = Some((idx, gain));
            }
        }
        let Some((idx, _)) = best else { break };
        let arc = instance.arc(idx);
        counts[idx] += 1;
        residual[arc.agent] -= 1;
        miss[arc.location] *= 1.0 - instance.arc_alpha(idx);
    }
    Schedule::from_counts(counts)
}

/// Outcome of a randomized property check.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckReport {
    pub trials: usize,
    /// Trials in which the property's precondition held and it was checked.
    pub checked: usize,
    pub counterexamples: Vec<String>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Random feasible set; `reserve` keeps one unit of that agent's budget free.
fn random_feasible(
    instance: &SearchInstance,
    rng: &mut impl Rng,
    reserve: Option<usize>,
) -> AssignmentSet {
    let mut set = AssignmentSet::empty(instance);
    for agent in 0..instance.num_agents() {
        let mut cap = instance.budget(agent);
        if reserve == Some(agent) {
            cap -= 1;
        }
        let units = rng.random_range(0..=cap);
        let arcs = instance.agent_arcs(agent);
        for _ in 0..units {
            set.insert(rng.random_range(arcs.clone()));
        }
    }
    set
}

/// Random sub-multiset, keeping each unit with probability 1/2.
fn random_subset(set: &AssignmentSet, rng: &mut impl Rng) -> AssignmentSet {
    AssignmentSet {
        multiplicity: set
            .multiplicity
            .iter()
            .map(|&c| (0..c).filter(|_| rng.random_bool(0.5)).count() as u64)
            .collect(),
    }
}

/// Monotonicity and diminishing returns of `f` on random chains `S' <= S`
/// and elements `e` that keep `S + e` feasible.
pub fn check_submodular(instance: &SearchInstance, trials: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport {
        trials,
        ..CheckReport::default()
    };
    for trial in 0..trials {
        let e = rng.random_range(0..instance.num_arcs());
        let big = random_feasible(instance, &mut rng, Some(instance.arc(e).agent));
        let small = if rng.random_bool(0.1) {
            big.clone()
        } else {
            random_subset(&big, &mut rng)
        };
        report.checked += 1;

        let f_small = unchecked_value(&small, instance);
        let f_big = unchecked_value(&big, instance);
        if f_small > f_big + PROPERTY_TOLERANCE {
            report
                .counterexamples
                .push(format!("trial {trial}: f(S') = {f_small} > f(S) = {f_big}"));
        }
        let mut small_e = small.clone();
        small_e.insert(e);
        let mut big_e = big.clone();
        big_e.insert(e);
        let gain_small = unchecked_value(&small_e, instance) - f_small;
        let gain_big = unchecked_value(&big_e, instance) - f_big;
        if gain_small + PROPERTY_TOLERANCE < gain_big {
            report.counterexamples.push(format!(
                "trial {trial}: gain of arc {e} is {gain_small} on S' but {gain_big} on S"
            ));
        }
    }
    report
}

/// Hereditary and augmentation properties of the budget-constrained sets.
pub fn check_matroid(instance: &SearchInstance, trials: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport {
        trials,
        ..CheckReport::default()
    };
    let agents: Vec<usize> = (0..instance.num_agents()).collect();
    for trial in 0..trials {
        let set = random_feasible(instance, &mut rng, None);
        let sub = random_subset(&set, &mut rng);
        report.checked += 1;
        if !sub.is_feasible(instance) {
            report.counterexamples.push(format!(
                "trial {trial}: subset of a feasible set is infeasible"
            ));
        }

        let other = random_feasible(instance, &mut rng, None);
        let (smaller, larger) = if other.len() < set.len() {
            (other, set)
        } else {
            (set, other)
        };
        if smaller.len() == larger.len() {
            continue;
        }
        // Some agent is used less in the smaller set; any unit of that agent
        // in the larger set extends the smaller one.
        let under_used: Vec<usize> = agents
            .iter()
            .copied()
            .filter(|&m| smaller.agent_usage(instance, m) < larger.agent_usage(instance, m))
            .collect();
        let Some(&agent) = under_used.choose(&mut rng) else {
            report.counterexamples.push(format!(
                "trial {trial}: no agent is under-used in the smaller set"
            ));
            continue;
        };
        let arc = instance
            .agent_arcs(agent)
            .find(|&a| larger.multiplicity(a) > 0)
            .expect("agent is used in the larger set");
        let mut extended = smaller.clone();
        extended.insert(arc);
        if !extended.is_feasible(instance) {
            report.counterexamples.push(format!(
                "trial {trial}: augmenting with arc {arc} is infeasible"
            ));
        }
    }
    report
}
