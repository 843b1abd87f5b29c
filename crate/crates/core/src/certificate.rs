//! Dual prices from a solver trace, and an optimality check for any
//! (schedule, prices) pair.
//!
//! Every isolated group is priced at the negated extraction value that
//! triggered its elimination; nodes never eliminated take the negated last
//! extraction. The global sink price is zero. [`verify`] then checks dual
//! feasibility, the complementary slackness conditions on both arc families
//! and equality of the primal and dual objectives.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flowsolver::{SolveTrace, TraceEvent};
use crate::model::{self, BudgetRule, Schedule, SearchInstance};

/// Tolerance for comparisons between prices and recomputed `p_{kj}` values,
/// and for the duality gap.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceGroup {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    /// The extraction value `p_{k,j*}` that closed the group.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub source_prices: Vec<f64>,
    pub sink_prices: Vec<f64>,
    pub global_price: f64,
    pub groups: Vec<PriceGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
}

/// Rebuilds dual prices from a trace produced by the solver on `instance`.
pub fn build_certificate(
    trace: &SolveTrace,
    instance: &SearchInstance,
) -> Result<Certificate, CertificateError> {
    let malformed = |msg: String| CertificateError::MalformedTrace(msg);
    let mut source_prices: Vec<Option<f64>> = vec![None; instance.num_agents()];
    let mut sink_prices: Vec<Option<f64>> = vec![None; instance.num_locations()];
    let mut groups = Vec::new();
    let mut last_value = None;

    for event in &trace.events {
        match event {
            TraceEvent::Elimination {
                sources,
                sinks,
                value,
            } => {
                let price = -value;
                for &m in sources {
                    let slot = source_prices
                        .get_mut(m)
                        .ok_or_else(|| malformed(format!("agent {m} out of range")))?;
                    if slot.replace(price).is_some() {
                        return Err(malformed(format!("agent {m} is in two groups")));
                    }
                }
                for &k in sinks {
                    let slot = sink_prices
                        .get_mut(k)
                        .ok_or_else(|| malformed(format!("location {k} out of range")))?;
                    if slot.replace(price).is_some() {
                        return Err(malformed(format!("location {k} is in two groups")));
                    }
                }
                groups.push(PriceGroup {
                    sources: sources.clone(),
                    sinks: sinks.clone(),
                    value: *value,
                });
            }
            TraceEvent::Termination { last_value: v } => last_value = Some(*v),
            _ => {}
        }
    }

    let rest_sources: Vec<usize> = (0..source_prices.len())
        .filter(|&m| source_prices[m].is_none())
        .collect();
    let rest_sinks: Vec<usize> = (0..sink_prices.len())
        .filter(|&k| sink_prices[k].is_none())
        .collect();
    if !rest_sources.is_empty() || !rest_sinks.is_empty() {
        let value = last_value.ok_or_else(|| {
            malformed("nodes left unpriced and the trace has no termination event".into())
        })?;
        for &m in &rest_sources {
            source_prices[m] = Some(-value);
        }
        for &k in &rest_sinks {
            sink_prices[k] = Some(-value);
        }
        groups.push(PriceGroup {
            sources: rest_sources,
            sinks: rest_sinks,
            value,
        });
    }

    Ok(Certificate {
        source_prices: source_prices.into_iter().map(Option::unwrap).collect(),
        sink_prices: sink_prices.into_iter().map(Option::unwrap).collect(),
        global_price: 0.0,
        groups,
    })
}

/// One failed optimality condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    /// Schedule or certificate does not match the instance's dimensions.
    Shape { detail: String },
    /// Primal infeasibility: an agent does not spend exactly its budget.
    Budget {
        agent: usize,
        used: u64,
        budget: u64,
    },
    /// `d^s_m <= d^t_k` fails on an arc.
    DualFeasibility {
        agent: usize,
        location: usize,
        source_price: f64,
        sink_price: f64,
    },
    /// `d^s_m < d^t_k` but the arc carries flow.
    SlackArcCarriesFlow {
        agent: usize,
        location: usize,
        count: u64,
    },
    /// The arc carries flow but `d^s_m != d^t_k`.
    FlowWithoutEqualPrices {
        agent: usize,
        location: usize,
        source_price: f64,
        sink_price: f64,
    },
    /// `d^t_k - lambda < -p_{kj}` but the `j`-th unit arc is used.
    UsedArcAbovePrice {
        location: usize,
        index: u64,
        value: f64,
        sink_price: f64,
    },
    /// `d^t_k - lambda > -p_{kj}` but the `j`-th unit arc is unused.
    UnusedArcBelowPrice {
        location: usize,
        index: u64,
        value: f64,
        sink_price: f64,
    },
    /// Primal and dual objectives differ.
    DualityGap { primal: f64, dual: f64 },
    /// A stored objective does not match the schedule it accompanies.
    ReportedObjective { reported: f64, actual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl Verdict {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Verdict {
            pass: violations.is_empty(),
            violations,
        }
    }
}

/// Checks `schedule` against `certificate` on a homogeneous instance.
///
/// Prices copied from the same extraction are compared exactly; prices
/// against recomputed `p_{kj}` and the duality gap use [`TOLERANCE`].
pub fn verify(
    schedule: &Schedule,
    certificate: &Certificate,
    instance: &SearchInstance,
) -> Verdict {
    let mut violations = Vec::new();
    if !instance.is_homogeneous() {
        violations.push(Violation::Shape {
            detail: "certificates apply to location-only detection models".into(),
        });
        return Verdict::from_violations(violations);
    }
    if schedule.counts().len() != instance.num_arcs()
        || certificate.source_prices.len() != instance.num_agents()
        || certificate.sink_prices.len() != instance.num_locations()
    {
        violations.push(Violation::Shape {
            detail: format!(
                "expected {} arcs, {} agents, {} locations; got {} counts, {} source prices, {} sink prices",
                instance.num_arcs(),
                instance.num_agents(),
                instance.num_locations(),
                schedule.counts().len(),
                certificate.source_prices.len(),
                certificate.sink_prices.len()
            ),
        });
        return Verdict::from_violations(violations);
    }

    let usage = schedule.agent_usage(instance).expect("shape checked");
    for (agent, &used) in usage.iter().enumerate() {
        if used != instance.budget(agent) {
            violations.push(Violation::Budget {
                agent,
                used,
                budget: instance.budget(agent),
            });
        }
    }

    let ds = &certificate.source_prices;
    let dt = &certificate.sink_prices;
    let lambda = certificate.global_price;

    for (idx, arc) in instance.arcs().iter().enumerate() {
        let (m, k) = (arc.agent, arc.location);
        let x = schedule.count(idx);
        if ds[m] > dt[k] {
            violations.push(Violation::DualFeasibility {
                agent: m,
                location: k,
                source_price: ds[m],
                sink_price: dt[k],
            });
        }
        if ds[m] < dt[k] && x > 0 {
            violations.push(Violation::SlackArcCarriesFlow {
                agent: m,
                location: k,
                count: x,
            });
        }
        if x > 0 && ds[m] != dt[k] {
            violations.push(Violation::FlowWithoutEqualPrices {
                agent: m,
                location: k,
                source_price: ds[m],
                sink_price: dt[k],
            });
        }
    }

    let total = instance.total_budget();
    let totals = schedule.location_totals(instance).expect("shape checked");
    for (k, &u) in totals.iter().enumerate() {
        let reduced = dt[k] - lambda;
        // y_{kj} = 1 exactly for j <= u_k, so every used arc must satisfy
        // -p_{kj} <= d^t_k - lambda.
        for j in 1..=u.min(total) {
            let p = model::marginal_value(instance, k, j);
            if reduced < -p - TOLERANCE {
                violations.push(Violation::UsedArcAbovePrice {
                    location: k,
                    index: j,
                    value: p,
                    sink_price: dt[k],
                });
            }
        }
        // Costs -p_{kj} are nondecreasing in j, so the first unused arc is the
        // only one that can sit strictly below the price.
        if u < total {
            let j = u + 1;
            let p = model::marginal_value(instance, k, j);
            if reduced > -p + TOLERANCE {
                violations.push(Violation::UnusedArcBelowPrice {
                    location: k,
                    index: j,
                    value: p,
                    sink_price: dt[k],
                });
            }
        }
    }

    let primal = model::objective(schedule, instance).expect("shape checked");
    let dual = dual_objective(certificate, instance);
    if (primal - dual).abs() > TOLERANCE * primal.abs().max(1.0) {
        violations.push(Violation::DualityGap { primal, dual });
    }

    Verdict::from_violations(violations)
}

/// Compares an objective stored alongside a schedule with its recomputed
/// value, within [`TOLERANCE`] relative.
pub fn check_reported_objective(
    schedule: &Schedule,
    instance: &SearchInstance,
    reported: f64,
) -> Option<Violation> {
    let actual = model::objective(schedule, instance).ok()?;
    ((reported - actual).abs() > TOLERANCE * actual.abs().max(1.0))
        .then_some(Violation::ReportedObjective { reported, actual })
}

/// Dual objective value in maximisation sign: the negated value of
/// `sum_{k,j} min(0, lambda - d^t_k - p_{kj}) + sum_m d^s_m N_m - lambda N`.
pub fn dual_objective(certificate: &Certificate, instance: &SearchInstance) -> f64 {
    let total = instance.total_budget();
    let lambda = certificate.global_price;
    let mut value = 0.0;
    for k in 0..instance.num_locations() {
        let dt = certificate.sink_prices[k];
        for j in 1..=total {
            let term = lambda - dt - model::marginal_value(instance, k, j);
            // p_{kj} is nonincreasing in j, so once a term is nonnegative all
            // later ones are too.
            if term >= 0.0 {
                break;
            }
            value += term;
        }
    }
    for (m, &ds) in certificate.source_prices.iter().enumerate() {
        value += ds * instance.budget(m) as f64;
    }
    value -= lambda * total as f64;
    -value
}

/// Whether the schedule satisfies the budgets that make it primal feasible.
pub fn primal_feasible(schedule: &Schedule, instance: &SearchInstance) -> bool {
    schedule.check_budgets(instance, BudgetRule::Exact).is_ok()
}
