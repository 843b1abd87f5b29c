//! JSON documents: instances (`"format": "search-alloc/1"`) and schedules.
//!
//! Files refer to agents and locations by integer id; in memory they are
//! indices into the `agents` and `locations` arrays, in file order. Traces
//! use those indices directly.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_with, Arc, DetectionModel, InstanceSpec, PriorCheck, Schedule, SearchInstance,
    ValidationReport, PRIOR_MASS_SLACK,
};

pub const FORMAT_TAG: &str = "search-alloc/1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format tag {0:?}, expected {FORMAT_TAG:?}")]
    UnsupportedFormat(String),
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: u64 },
    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: u64 },
    #[error("detection probabilities must be given either on every location or on every arc, not both or neither")]
    DetectionStyle,
    #[error("schedule uses ({agent}, {location}), which is not an accessibility pair")]
    NotAnArc { agent: u64, location: u64 },
    #[error("schedule lists ({agent}, {location}) twice")]
    DuplicateEntry { agent: u64, location: u64 },
    #[error(transparent)]
    Invalid(#[from] ValidationReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentEntry {
    pub id: u64,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationEntry {
    pub id: u64,
    pub prior: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcEntry {
    pub agent: u64,
    pub location: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format: String,
    pub agents: Vec<AgentEntry>,
    pub locations: Vec<LocationEntry>,
    pub arcs: Vec<ArcEntry>,
    /// Treat priors as per-location weights whose total may exceed one.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub prior_weights: bool,
}

/// External ids of agents and locations, by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    pub agents: Vec<u64>,
    pub locations: Vec<u64>,
}

impl IdMap {
    /// Ids equal to indices.
    pub fn sequential(instance: &SearchInstance) -> Self {
        IdMap {
            agents: (0..instance.num_agents() as u64).collect(),
            locations: (0..instance.num_locations() as u64).collect(),
        }
    }
}

fn index_ids(
    kind: &'static str,
    ids: impl Iterator<Item = u64>,
) -> Result<HashMap<u64, usize>, FormatError> {
    let mut map = HashMap::new();
    for (i, id) in ids.enumerate() {
        if map.insert(id, i).is_some() {
            return Err(FormatError::DuplicateId { kind, id });
        }
    }
    Ok(map)
}

pub fn instance_from_file(file: &InstanceFile) -> Result<(SearchInstance, IdMap), FormatError> {
    if file.format != FORMAT_TAG {
        return Err(FormatError::UnsupportedFormat(file.format.clone()));
    }
    let agent_index = index_ids("agent", file.agents.iter().map(|a| a.id))?;
    let location_index = index_ids("location", file.locations.iter().map(|l| l.id))?;

    let location_alphas: Option<Vec<f64>> = file.locations.iter().map(|l| l.alpha).collect();
    let arc_alphas: Option<Vec<f64>> = file.arcs.iter().map(|a| a.alpha).collect();
    let any_location_alpha = file.locations.iter().any(|l| l.alpha.is_some());
    let any_arc_alpha = file.arcs.iter().any(|a| a.alpha.is_some());
    let detection = match (location_alphas, arc_alphas) {
        (Some(alpha), _) if !any_arc_alpha => DetectionModel::Homogeneous(alpha),
        (_, Some(alpha)) if !any_location_alpha && !file.arcs.is_empty() => {
            DetectionModel::Heterogeneous(alpha)
        }
        _ => return Err(FormatError::DetectionStyle),
    };

    let mut arcs = Vec::with_capacity(file.arcs.len());
    for entry in &file.arcs {
        let agent = *agent_index
            .get(&entry.agent)
            .ok_or(FormatError::UnknownId {
                kind: "agent",
                id: entry.agent,
            })?;
        let location = *location_index
            .get(&entry.location)
            .ok_or(FormatError::UnknownId {
                kind: "location",
                id: entry.location,
            })?;
        arcs.push(Arc::new(agent, location));
    }

    let prior_check = if file.prior_weights {
        PriorCheck::Weights
    } else {
        PriorCheck::Distribution
    };
    let instance = validate_with(
        InstanceSpec {
            budgets: file.agents.iter().map(|a| a.budget).collect(),
            priors: file.locations.iter().map(|l| l.prior).collect(),
            arcs,
            detection,
        },
        prior_check,
    )?;
    let ids = IdMap {
        agents: file.agents.iter().map(|a| a.id).collect(),
        locations: file.locations.iter().map(|l| l.id).collect(),
    };
    Ok((instance, ids))
}

pub fn instance_to_file(instance: &SearchInstance, ids: &IdMap) -> InstanceFile {
    let homogeneous = instance.is_homogeneous();
    InstanceFile {
        format: FORMAT_TAG.to_string(),
        agents: (0..instance.num_agents())
            .map(|m| AgentEntry {
                id: ids.agents[m],
                budget: instance.budget(m),
            })
            .collect(),
        locations: (0..instance.num_locations())
            .map(|k| LocationEntry {
                id: ids.locations[k],
                prior: instance.prior(k),
                alpha: homogeneous.then(|| instance.alpha(k)),
            })
            .collect(),
        arcs: instance
            .arcs()
            .iter()
            .enumerate()
            .map(|(idx, arc)| ArcEntry {
                agent: ids.agents[arc.agent],
                location: ids.locations[arc.location],
                alpha: (!homogeneous).then(|| instance.arc_alpha(idx)),
            })
            .collect(),
        prior_weights: instance.priors().iter().sum::<f64>() > 1.0 + PRIOR_MASS_SLACK,
    }
}

pub fn parse_instance(text: &str) -> Result<(SearchInstance, IdMap), FormatError> {
    instance_from_file(&serde_json::from_str(text)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationEntry {
    pub agent: u64,
    pub location: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub objective: f64,
    pub allocation: Vec<AllocationEntry>,
}

pub fn schedule_to_file(
    schedule: &Schedule,
    instance: &SearchInstance,
    ids: &IdMap,
    objective: f64,
) -> ScheduleFile {
    ScheduleFile {
        objective,
        allocation: instance
            .arcs()
            .iter()
            .zip(schedule.counts())
            .filter(|(_, &c)| c > 0)
            .map(|(arc, &count)| AllocationEntry {
                agent: ids.agents[arc.agent],
                location: ids.locations[arc.location],
                count,
            })
            .collect(),
    }
}

/// Reads a schedule back onto the instance's arcs. Zero counts are ignored.
pub fn schedule_from_file(
    file: &ScheduleFile,
    instance: &SearchInstance,
    ids: &IdMap,
) -> Result<Schedule, FormatError> {
    let agent_index = index_ids("agent", ids.agents.iter().copied())?;
    let location_index = index_ids("location", ids.locations.iter().copied())?;
    let mut schedule = Schedule::zeros(instance);
    let mut seen = vec![false; instance.num_arcs()];
    for entry in &file.allocation {
        let not_an_arc = FormatError::NotAnArc {
            agent: entry.agent,
            location: entry.location,
        };
        let (Some(&m), Some(&k)) = (
            agent_index.get(&entry.agent),
            location_index.get(&entry.location),
        ) else {
            return Err(not_an_arc);
        };
        let arc = instance.find_arc(m, k).ok_or(not_an_arc)?;
        if std::mem::replace(&mut seen[arc], true) {
            return Err(FormatError::DuplicateEntry {
                agent: entry.agent,
                location: entry.location,
            });
        }
        schedule.set(arc, entry.count);
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::objective;

    const HOMOGENEOUS: &str = r#"{
        "format": "search-alloc/1",
        "agents": [{"id": 1, "budget": 1}, {"id": 2, "budget": 2}],
        "locations": [
            {"id": 1, "prior": 0.5, "alpha": 0.5},
            {"id": 2, "prior": 0.3, "alpha": 0.8},
            {"id": 3, "prior": 0.2, "alpha": 0.6}
        ],
        "arcs": [
            {"agent": 2, "location": 3},
            {"agent": 1, "location": 1},
            {"agent": 1, "location": 2},
            {"agent": 2, "location": 2}
        ]
    }"#;

    #[test]
    fn parses_homogeneous_instance() {
        let (inst, ids) = parse_instance(HOMOGENEOUS).unwrap();
        assert!(inst.is_homogeneous());
        assert_eq!(inst.num_arcs(), 4);
        assert_eq!(ids.agents, vec![1, 2]);
        let back = instance_to_file(&inst, &ids);
        let (again, _) = instance_from_file(&back).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn mixed_alpha_styles_rejected() {
        let text = HOMOGENEOUS.replace(
            r#"{"agent": 2, "location": 3}"#,
            r#"{"agent": 2, "location": 3, "alpha": 0.4}"#,
        );
        assert!(matches!(
            parse_instance(&text),
            Err(FormatError::DetectionStyle)
        ));
    }

    #[test]
    fn heterogeneous_instance() {
        let text = r#"{"format": "search-alloc/1",
            "agents": [{"id": 7, "budget": 1}],
            "locations": [{"id": 3, "prior": 1.0}],
            "arcs": [{"agent": 7, "location": 3, "alpha": 0.25}]}"#;
        let (inst, _) = parse_instance(text).unwrap();
        assert!(!inst.is_homogeneous());
        assert_eq!(inst.arc_alpha(0), 0.25);
    }

    #[test]
    fn wrong_tag_and_unknown_ids() {
        let text = HOMOGENEOUS.replace("search-alloc/1", "search-alloc/2");
        assert!(matches!(
            parse_instance(&text),
            Err(FormatError::UnsupportedFormat(_))
        ));
        let text = HOMOGENEOUS.replace(
            r#"{"agent": 2, "location": 3}"#,
            r#"{"agent": 9, "location": 3}"#,
        );
        assert!(matches!(
            parse_instance(&text),
            Err(FormatError::UnknownId {
                kind: "agent",
                id: 9
            })
        ));
    }

    #[test]
    fn validation_errors_surface() {
        let text = HOMOGENEOUS.replace(r#""alpha": 0.5"#, r#""alpha": 0.0"#);
        assert!(matches!(
            parse_instance(&text),
            Err(FormatError::Invalid(_))
        ));
    }

    #[test]
    fn schedule_round_trip() {
        let (inst, ids) = parse_instance(HOMOGENEOUS).unwrap();
        let mut schedule = Schedule::zeros(&inst);
        schedule.set(inst.find_arc(0, 0).unwrap(), 1);
        schedule.set(inst.find_arc(1, 2).unwrap(), 2);
        let value = objective(&schedule, &inst).unwrap();
        let file = schedule_to_file(&schedule, &inst, &ids, value);
        assert_eq!(file.allocation.len(), 2);
        assert!(file.allocation.iter().all(|e| e.count > 0));
        let text = serde_json::to_string(&file).unwrap();
        let parsed: ScheduleFile = serde_json::from_str(&text).unwrap();
        assert_eq!(schedule_from_file(&parsed, &inst, &ids).unwrap(), schedule);
    }

    #[test]
    fn schedule_on_missing_arc_rejected() {
        let (inst, ids) = parse_instance(HOMOGENEOUS).unwrap();
        let file = ScheduleFile {
            objective: 0.0,
            allocation: vec![AllocationEntry {
                agent: 1,
                location: 3,
                count: 1,
            }],
        };
        assert!(matches!(
            schedule_from_file(&file, &inst, &ids),
            Err(FormatError::NotAnArc {
                agent: 1,
                location: 3
            })
        ));
    }
}
