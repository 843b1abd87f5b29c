//! Problem data: instances, detection models, schedules and objective values.

use std::fmt;

use thiserror::Error;

/// Tolerance on the prior mass exceeding one.
pub const PRIOR_MASS_SLACK: f64 = 1e-9;

/// An accessibility pair: `agent` may search `location`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub agent: usize,
    pub location: usize,
}

impl Arc {
    pub fn new(agent: usize, location: usize) -> Self {
        Arc { agent, location }
    }
}

/// Detection probability of a single search.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectionModel {
    /// One `alpha` per location, shared by every agent.
    Homogeneous(Vec<f64>),
    /// One `alpha` per accessibility arc, aligned with the arc list it was
    /// supplied with.
    Heterogeneous(Vec<f64>),
}

impl DetectionModel {
    pub fn is_homogeneous(&self) -> bool {
        matches!(self, DetectionModel::Homogeneous(_))
    }
}

/// Unvalidated instance data. Pass it through [`validate`] to obtain a
/// [`SearchInstance`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub budgets: Vec<u64>,
    pub priors: Vec<f64>,
    pub arcs: Vec<Arc>,
    pub detection: DetectionModel,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationIssue {
    #[error("instance has no agents or no locations")]
    EmptyInstance,
    #[error("location {0} is not accessible by any agent")]
    IsolatedLocation(usize),
    #[error("agent {0} cannot access any location")]
    IsolatedAgent(usize),
    #[error("arc ({}, {}) appears more than once", .0.agent, .0.location)]
    DuplicateArc(Arc),
    #[error("arc ({}, {}) references an agent or location out of range", .0.agent, .0.location)]
    IndexOutOfRange(Arc),
    #[error("agent {0} has a zero budget")]
    ZeroBudget(usize),
    #[error("{what} = {value} is not a valid probability")]
    BadProbability { what: String, value: f64 },
    #[error("prior probabilities sum to {0}, which exceeds 1")]
    PriorMassExceeded(f64),
    #[error("detection model has {found} values, expected {expected}")]
    DetectionLength { expected: usize, found: usize },
}

/// Every invariant an [`InstanceSpec`] violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid instance:")?;
        for issue in &self.issues {
            write!(f, " {issue};")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("schedule has {found} arc counts but the instance has {expected} arcs")]
    ScheduleInstanceMismatch { expected: usize, found: usize },
    #[error("agent {agent} is assigned {used} units but its budget is {budget}")]
    BudgetViolated {
        agent: usize,
        used: u64,
        budget: u64,
    },
}

/// A validated search problem.
///
/// Arcs are kept sorted by `(agent, location)`, so per-agent arc ranges are
/// contiguous and per-location arc lists are ordered by ascending agent.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchInstance {
    budgets: Vec<u64>,
    priors: Vec<f64>,
    arcs: Vec<Arc>,
    detection: DetectionModel,
    agent_offsets: Vec<usize>,
    location_offsets: Vec<usize>,
    location_arcs: Vec<usize>,
}

/// How the total prior mass is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriorCheck {
    /// Priors form a (possibly sub-stochastic) distribution: total at most 1.
    #[default]
    Distribution,
    /// Priors are independent per-location weights in `[0, 1]`; the total is
    /// not checked. The objective is the same weighted sum either way.
    Weights,
}

/// Checks every instance invariant and builds the adjacency structure.
pub fn validate(spec: InstanceSpec) -> Result<SearchInstance, ValidationReport> {
    validate_with(spec, PriorCheck::Distribution)
}

/// [`validate`] with an explicit prior-mass policy.
pub fn validate_with(
    spec: InstanceSpec,
    prior_check: PriorCheck,
) -> Result<SearchInstance, ValidationReport> {
    let InstanceSpec {
        budgets,
        priors,
        arcs,
        detection,
    } = spec;
    let num_agents = budgets.len();
    let num_locations = priors.len();
    let mut issues = Vec::new();

    if num_agents == 0 || num_locations == 0 {
        issues.push(ValidationIssue::EmptyInstance);
    }
    for (m, &b) in budgets.iter().enumerate() {
        if b == 0 {
            issues.push(ValidationIssue::ZeroBudget(m));
        }
    }
    for (k, &p) in priors.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            issues.push(ValidationIssue::BadProbability {
                what: format!("prior of location {k}"),
                value: p,
            });
        }
    }
    let mass: f64 = priors.iter().sum();
    if prior_check == PriorCheck::Distribution && mass > 1.0 + PRIOR_MASS_SLACK {
        issues.push(ValidationIssue::PriorMassExceeded(mass));
    }

    match &detection {
        DetectionModel::Homogeneous(alpha) => {
            if alpha.len() != num_locations {
                issues.push(ValidationIssue::DetectionLength {
                    expected: num_locations,
                    found: alpha.len(),
                });
            }
            for (k, &a) in alpha.iter().enumerate() {
                if !(a > 0.0 && a <= 1.0) {
                    issues.push(ValidationIssue::BadProbability {
                        what: format!("alpha of location {k}"),
                        value: a,
                    });
                }
            }
        }
        DetectionModel::Heterogeneous(alpha) => {
            if alpha.len() != arcs.len() {
                issues.push(ValidationIssue::DetectionLength {
                    expected: arcs.len(),
                    found: alpha.len(),
                });
            }
            for (arc, &a) in arcs.iter().zip(alpha) {
                if !(a > 0.0 && a <= 1.0) {
                    issues.push(ValidationIssue::BadProbability {
                        what: format!("alpha of arc ({}, {})", arc.agent, arc.location),
                        value: a,
                    });
                }
            }
        }
    }

    let mut agent_seen = vec![false; num_agents];
    let mut location_seen = vec![false; num_locations];
    for &arc in &arcs {
        if arc.agent >= num_agents || arc.location >= num_locations {
            issues.push(ValidationIssue::IndexOutOfRange(arc));
            continue;
        }
        agent_seen[arc.agent] = true;
        location_seen[arc.location] = true;
    }

    // Sort arcs (carrying per-arc alphas along) and look for duplicates.
    let mut order: Vec<usize> = (0..arcs.len()).collect();
    order.sort_by_key(|&i| arcs[i]);
    for w in order.windows(2) {
        if arcs[w[0]] == arcs[w[1]] {
            issues.push(ValidationIssue::DuplicateArc(arcs[w[0]]));
        }
    }

    if num_agents > 0 && num_locations > 0 {
        for (k, seen) in location_seen.iter().enumerate() {
            if !seen {
                issues.push(ValidationIssue::IsolatedLocation(k));
            }
        }
        for (m, seen) in agent_seen.iter().enumerate() {
            if !seen {
                issues.push(ValidationIssue::IsolatedAgent(m));
            }
        }
    }

    if !issues.is_empty() {
        return Err(ValidationReport { issues });
    }

    if prior_check == PriorCheck::Distribution && mass < 1.0 - PRIOR_MASS_SLACK {
        log::warn!("prior probabilities sum to {mass:.6} < 1; the object may be absent");
    }

    let sorted_arcs: Vec<Arc> = order.iter().map(|&i| arcs[i]).collect();
    let detection = match detection {
        DetectionModel::Heterogeneous(alpha) => {
            DetectionModel::Heterogeneous(order.iter().map(|&i| alpha[i]).collect())
        }
        homogeneous => homogeneous,
    };

    let mut agent_offsets = vec![0usize; num_agents + 1];
    let mut location_offsets = vec![0usize; num_locations + 1];
    for arc in &sorted_arcs {
        agent_offsets[arc.agent + 1] += 1;
        location_offsets[arc.location + 1] += 1;
    }
    for i in 0..num_agents {
        agent_offsets[i + 1] += agent_offsets[i];
    }
    for i in 0..num_locations {
        location_offsets[i + 1] += location_offsets[i];
    }
    let mut fill = location_offsets.clone();
    let mut location_arcs = vec![0usize; sorted_arcs.len()];
    // Arcs are sorted by agent, so each location's list comes out ascending.
    for (idx, arc) in sorted_arcs.iter().enumerate() {
        location_arcs[fill[arc.location]] = idx;
        fill[arc.location] += 1;
    }

    Ok(SearchInstance {
        budgets,
        priors,
        arcs: sorted_arcs,
        detection,
        agent_offsets,
        location_offsets,
        location_arcs,
    })
}

impl SearchInstance {
    pub fn num_agents(&self) -> usize {
        self.budgets.len()
    }

    pub fn num_locations(&self) -> usize {
        self.priors.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn budget(&self, agent: usize) -> u64 {
        self.budgets[agent]
    }

    pub fn budgets(&self) -> &[u64] {
        &self.budgets
    }

    /// Total effort `N`, the sum of all budgets.
    pub fn total_budget(&self) -> u64 {
        self.budgets.iter().sum()
    }

    pub fn prior(&self, location: usize) -> f64 {
        self.priors[location]
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, idx: usize) -> Arc {
        self.arcs[idx]
    }

    pub fn detection(&self) -> &DetectionModel {
        &self.detection
    }

    pub fn is_homogeneous(&self) -> bool {
        self.detection.is_homogeneous()
    }

    /// Per-location detection probability. Panics on a heterogeneous model.
    pub fn alpha(&self, location: usize) -> f64 {
        match &self.detection {
            DetectionModel::Homogeneous(a) => a[location],
            DetectionModel::Heterogeneous(_) => {
                panic!("location alpha requested from a heterogeneous instance")
            }
        }
    }

    /// Detection probability of one search along arc `idx`, for either model.
    pub fn arc_alpha(&self, idx: usize) -> f64 {
        match &self.detection {
            DetectionModel::Homogeneous(a) => a[self.arcs[idx].location],
            DetectionModel::Heterogeneous(a) => a[idx],
        }
    }

    /// Indices of the arcs leaving `agent`, ascending by location.
    pub fn agent_arcs(&self, agent: usize) -> std::ops::Range<usize> {
        self.agent_offsets[agent]..self.agent_offsets[agent + 1]
    }

    /// Indices of the arcs entering `location`, ascending by agent.
    pub fn location_arcs(&self, location: usize) -> &[usize] {
        &self.location_arcs[self.location_offsets[location]..self.location_offsets[location + 1]]
    }

    /// Index of the arc `(agent, location)`, if it exists.
    pub fn find_arc(&self, agent: usize, location: usize) -> Option<usize> {
        let range = self.agent_arcs(agent);
        let start = range.start;
        self.arcs[range]
            .binary_search_by_key(&location, |a| a.location)
            .ok()
            .map(|i| start + i)
    }

    /// The unvalidated data this instance was built from (arcs in sorted order).
    pub fn to_spec(&self) -> InstanceSpec {
        InstanceSpec {
            budgets: self.budgets.clone(),
            priors: self.priors.clone(),
            arcs: self.arcs.clone(),
            detection: self.detection.clone(),
        }
    }
}

/// `p_{kj}`: probability that the first `j - 1` searches of `location` miss and
/// the `j`-th finds the object. Homogeneous instances only; `j >= 1`.
pub fn marginal_value(instance: &SearchInstance, location: usize, j: u64) -> f64 {
    assert!(j >= 1, "search index starts at 1");
    let alpha = instance.alpha(location);
    instance.prior(location) * (1.0 - alpha).powf((j - 1) as f64) * alpha
}

/// Iterator over `p_{k1}, p_{k2}, ...` using one multiplication per step.
#[derive(Debug, Clone)]
pub struct MarginalValues {
    next: f64,
    miss: f64,
}

impl MarginalValues {
    pub fn new(instance: &SearchInstance, location: usize) -> Self {
        let alpha = instance.alpha(location);
        MarginalValues {
            next: instance.prior(location) * alpha,
            miss: 1.0 - alpha,
        }
    }
}

impl Iterator for MarginalValues {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let value = self.next;
        self.next *= self.miss;
        Some(value)
    }
}

/// Whether the per-agent budget must be spent exactly or only bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetRule {
    Exact,
    AtMost,
}

impl BudgetRule {
    /// Exact for homogeneous instances, at-most for heterogeneous ones.
    pub fn for_instance(instance: &SearchInstance) -> Self {
        if instance.is_homogeneous() {
            BudgetRule::Exact
        } else {
            BudgetRule::AtMost
        }
    }
}

/// Integer effort per accessibility arc, aligned with
/// [`SearchInstance::arcs`]. Per-location totals `u_k` are derived; the
/// indicator `y_{kj}` is `j <= u_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    counts: Vec<u64>,
}

impl Schedule {
    pub fn zeros(instance: &SearchInstance) -> Self {
        Schedule {
            counts: vec![0; instance.num_arcs()],
        }
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        Schedule { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, arc: usize) -> u64 {
        self.counts[arc]
    }

    pub fn set(&mut self, arc: usize, count: u64) {
        self.counts[arc] = count;
    }

    pub fn add(&mut self, arc: usize, delta: u64) {
        self.counts[arc] += delta;
    }

    fn check_shape(&self, instance: &SearchInstance) -> Result<(), ModelError> {
        if self.counts.len() != instance.num_arcs() {
            return Err(ModelError::ScheduleInstanceMismatch {
                expected: instance.num_arcs(),
                found: self.counts.len(),
            });
        }
        Ok(())
    }

    /// `u_k` for every location.
    pub fn location_totals(&self, instance: &SearchInstance) -> Result<Vec<u64>, ModelError> {
        self.check_shape(instance)?;
        let mut totals = vec![0u64; instance.num_locations()];
        for (arc, &c) in instance.arcs().iter().zip(&self.counts) {
            totals[arc.location] += c;
        }
        Ok(totals)
    }

    /// Units spent by every agent.
    pub fn agent_usage(&self, instance: &SearchInstance) -> Result<Vec<u64>, ModelError> {
        self.check_shape(instance)?;
        Ok((0..instance.num_agents())
            .map(|m| instance.agent_arcs(m).map(|a| self.counts[a]).sum())
            .collect())
    }

    /// Checks the budget constraints under `rule`.
    pub fn check_budgets(
        &self,
        instance: &SearchInstance,
        rule: BudgetRule,
    ) -> Result<(), ModelError> {
        for (agent, used) in self.agent_usage(instance)?.into_iter().enumerate() {
            let budget = instance.budget(agent);
            let ok = match rule {
                BudgetRule::Exact => used == budget,
                BudgetRule::AtMost => used <= budget,
            };
            if !ok {
                return Err(ModelError::BudgetViolated {
                    agent,
                    used,
                    budget,
                });
            }
        }
        Ok(())
    }
}

/// Total detection probability of `schedule`.
///
/// Homogeneous: `sum_k p_k0 (1 - (1 - alpha_k)^u_k)`. Heterogeneous:
/// `sum_k p_k0 (1 - prod_m (1 - alpha_mk)^x_mk)`.
pub fn objective(schedule: &Schedule, instance: &SearchInstance) -> Result<f64, ModelError> {
    schedule.check_shape(instance)?;
    let mut miss = vec![1.0f64; instance.num_locations()];
    match instance.detection() {
        DetectionModel::Homogeneous(alpha) => {
            let totals = schedule.location_totals(instance)?;
            for (k, &u) in totals.iter().enumerate() {
                miss[k] = (1.0 - alpha[k]).powf(u as f64);
            }
        }
        DetectionModel::Heterogeneous(alpha) => {
            for (idx, arc) in instance.arcs().iter().enumerate() {
                let c = schedule.counts[idx];
                if c > 0 {
                    miss[arc.location] *= (1.0 - alpha[idx]).powf(c as f64);
                }
            }
        }
    }
    Ok(instance
        .priors()
        .iter()
        .zip(&miss)
        .map(|(p, q)| p * (1.0 - q))
        .sum())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn homogeneous(
        budgets: &[u64],
        priors: &[f64],
        alpha: &[f64],
        arcs: &[(usize, usize)],
    ) -> SearchInstance {
        validate_with(
            InstanceSpec {
                budgets: budgets.to_vec(),
                priors: priors.to_vec(),
                arcs: arcs.iter().map(|&(m, k)| Arc::new(m, k)).collect(),
                detection: DetectionModel::Homogeneous(alpha.to_vec()),
            },
            PriorCheck::Weights,
        )
        .unwrap()
    }

    fn minimal() -> SearchInstance {
        homogeneous(&[1], &[0.5], &[0.5], &[(0, 0)])
    }

    #[test]
    fn minimal_instance_is_valid() {
        let inst = minimal();
        assert_eq!(inst.total_budget(), 1);
        assert_eq!(inst.location_arcs(0), &[0]);
    }

    #[test]
    fn unreachable_location_is_reported() {
        let err = validate(InstanceSpec {
            budgets: vec![1, 1],
            priors: vec![0.5, 0.5],
            arcs: vec![Arc::new(0, 0), Arc::new(1, 0)],
            detection: DetectionModel::Homogeneous(vec![0.5, 0.5]),
        })
        .unwrap_err();
        assert_eq!(err.issues, vec![ValidationIssue::IsolatedLocation(1)]);
    }

    #[test]
    fn zero_alpha_is_rejected() {
        let err = validate(InstanceSpec {
            budgets: vec![1],
            priors: vec![0.5],
            arcs: vec![Arc::new(0, 0)],
            detection: DetectionModel::Homogeneous(vec![0.0]),
        })
        .unwrap_err();
        assert!(matches!(
            err.issues[0],
            ValidationIssue::BadProbability { .. }
        ));
    }

    #[test]
    fn report_lists_every_issue() {
        let err = validate(InstanceSpec {
            budgets: vec![0, 1],
            priors: vec![0.7, 0.6],
            arcs: vec![Arc::new(1, 0), Arc::new(1, 0), Arc::new(3, 1)],
            detection: DetectionModel::Homogeneous(vec![0.5, 1.5]),
        })
        .unwrap_err();
        let issues = err.issues;
        assert!(issues.contains(&ValidationIssue::ZeroBudget(0)));
        assert!(issues.contains(&ValidationIssue::DuplicateArc(Arc::new(1, 0))));
        assert!(issues.contains(&ValidationIssue::IndexOutOfRange(Arc::new(3, 1))));
        assert!(issues.contains(&ValidationIssue::IsolatedAgent(0)));
        assert!(issues.contains(&ValidationIssue::IsolatedLocation(1)));
        assert!(issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::PriorMassExceeded(_))));
        assert!(issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::BadProbability { .. })));
    }

    #[test]
    fn empty_instance() {
        let err = validate(InstanceSpec {
            budgets: vec![],
            priors: vec![],
            arcs: vec![],
            detection: DetectionModel::Homogeneous(vec![]),
        })
        .unwrap_err();
        assert_eq!(err.issues, vec![ValidationIssue::EmptyInstance]);
    }

    #[test]
    fn heterogeneous_alphas_follow_arc_sorting() {
        let inst = validate(InstanceSpec {
            budgets: vec![1, 1],
            priors: vec![0.5, 0.5],
            arcs: vec![Arc::new(1, 1), Arc::new(0, 0), Arc::new(1, 0)],
            detection: DetectionModel::Heterogeneous(vec![0.3, 0.1, 0.2]),
        })
        .unwrap();
        assert_eq!(
            inst.arcs(),
            &[Arc::new(0, 0), Arc::new(1, 0), Arc::new(1, 1)]
        );
        assert_eq!(inst.arc_alpha(0), 0.1);
        assert_eq!(inst.arc_alpha(1), 0.2);
        assert_eq!(inst.arc_alpha(2), 0.3);
        assert_eq!(inst.location_arcs(0), &[0, 1]);
        assert_eq!(inst.find_arc(1, 1), Some(2));
        assert_eq!(inst.find_arc(0, 1), None);
    }

    #[test]
    fn marginal_values() {
        let inst = minimal();
        assert_eq!(marginal_value(&inst, 0, 1), 0.25);
        assert_eq!(marginal_value(&inst, 0, 3), 0.0625);
        let seq: Vec<f64> = MarginalValues::new(&inst, 0).take(3).collect();
        assert_eq!(seq, vec![0.25, 0.125, 0.0625]);

        let zero = homogeneous(&[1], &[0.0], &[0.7], &[(0, 0)]);
        assert_eq!(marginal_value(&zero, 0, 4), 0.0);
    }

    #[test]
    fn objective_examples() {
        let inst = minimal();
        let one = Schedule::from_counts(vec![1]);
        assert_eq!(objective(&one, &inst).unwrap(), 0.25);
        assert_eq!(objective(&Schedule::zeros(&inst), &inst).unwrap(), 0.0);

        let two_agents = homogeneous(&[1, 1], &[0.5], &[0.5], &[(0, 0), (1, 0)]);
        let both = Schedule::from_counts(vec![1, 1]);
        assert!((objective(&both, &two_agents).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn objective_rejects_mismatched_schedule() {
        let inst = minimal();
        let err = objective(&Schedule::from_counts(vec![1, 0]), &inst).unwrap_err();
        assert_eq!(
            err,
            ModelError::ScheduleInstanceMismatch {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn alpha_one_marginals_vanish_after_first() {
        let inst = homogeneous(&[3], &[0.4], &[1.0], &[(0, 0)]);
        let seq: Vec<f64> = MarginalValues::new(&inst, 0).take(3).collect();
        assert_eq!(seq, vec![0.4, 0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn decomposition_identity(prior in 0.0f64..=1.0, alpha in 0.001f64..=1.0, u in 0u64..200) {
            let inst = homogeneous(&[u.max(1)], &[prior], &[alpha], &[(0, 0)]);
            let closed = prior * (1.0 - (1.0 - alpha).powf(u as f64));
            let summed: f64 = MarginalValues::new(&inst, 0).take(u as usize).sum();
            prop_assert!((closed - summed).abs() <= 1e-12 * closed,
                "closed {closed} summed {summed}");
        }

        #[test]
        fn marginals_strictly_decrease(prior in 0.001f64..=1.0, alpha in 0.001f64..0.999, j in 1u64..100) {
            let inst = homogeneous(&[1], &[prior], &[alpha], &[(0, 0)]);
            prop_assert!(marginal_value(&inst, 0, j + 1) < marginal_value(&inst, 0, j));
        }

        #[test]
        fn objective_is_monotone(
            counts in proptest::collection::vec(0u64..5, 4),
            bump in proptest::collection::vec(0u64..3, 4),
        ) {
            let inst = validate(InstanceSpec {
                budgets: vec![20, 20],
                priors: vec![0.3, 0.7],
                arcs: vec![Arc::new(0, 0), Arc::new(0, 1), Arc::new(1, 0), Arc::new(1, 1)],
                detection: DetectionModel::Heterogeneous(vec![0.2, 0.5, 0.9, 0.4]),
            }).unwrap();
            let base = Schedule::from_counts(counts.clone());
            let more = Schedule::from_counts(counts.iter().zip(&bump).map(|(a, b)| a + b).collect());
            prop_assert!(objective(&base, &inst).unwrap() <= objective(&more, &inst).unwrap());
        }
    }
}
