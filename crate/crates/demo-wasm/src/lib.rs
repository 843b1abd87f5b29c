//! Browser bindings for the interactive field demo. Every export takes and
//! returns JSON strings; errors come back as `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use search_alloc::certificate::{build_certificate, verify};
use search_alloc::flowsolver::{solve_instrumented, Counters};
use search_alloc::greedy::greedy_solve;
use search_alloc::model::{objective, Schedule, SearchInstance};
use search_alloc::scenario::{
    compile_instance, generate_field, AlphaModel, FieldConfig, PriorModel, SpatialField,
};

#[derive(Serialize)]
struct Placement {
    sensor: usize,
    location: usize,
    count: u64,
}

#[derive(Serialize)]
struct FieldView<'a> {
    field: &'a SpatialField,
    priors: &'a [f64],
    arcs: usize,
}

#[derive(Serialize)]
struct OptimalView {
    objective: f64,
    certified: bool,
    counters: Counters,
    placements: Vec<Placement>,
}

#[derive(Serialize)]
struct GreedyView {
    objective: f64,
    /// Exact optimum on the same instance, when detection depends on the
    /// location only.
    optimum: Option<f64>,
    placements: Vec<Placement>,
}

fn to_json(value: Result<impl Serialize, String>) -> String {
    match value {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

fn placements(schedule: &Schedule, instance: &SearchInstance) -> Vec<Placement> {
    instance
        .arcs()
        .iter()
        .zip(schedule.counts())
        .filter(|(_, &c)| c > 0)
        .map(|(arc, &count)| Placement {
            sensor: arc.agent,
            location: arc.location,
            count,
        })
        .collect()
}

fn compile(
    field_json: &str,
    radius: f64,
    budget: u32,
    hetero: bool,
) -> Result<SearchInstance, String> {
    let field: SpatialField = serde_json::from_str(field_json).map_err(|e| e.to_string())?;
    let field = field.with_radius(radius).map_err(|e| e.to_string())?;
    let alphas = AlphaModel {
        per_arc: hetero,
        ..AlphaModel::default()
    };
    compile_instance(&field, budget as u64, &PriorModel::default(), &alphas)
        .map_err(|e| e.to_string())
}

/// Random field; the result carries positions, priors and the arc count.
#[wasm_bindgen]
pub fn generate(sensors: u32, locations: u32, radius: f64, seed: u32) -> String {
    let config = FieldConfig {
        num_sensors: sensors as usize,
        num_locations: locations as usize,
        radius,
        seed: seed as u64,
        ..FieldConfig::default()
    };
    to_json((|| {
        let field = generate_field(&config).map_err(|e| e.to_string())?;
        let inst = compile_instance(&field, 1, &PriorModel::default(), &AlphaModel::default())
            .map_err(|e| e.to_string())?;
        serde_json::to_value(FieldView {
            field: &field,
            priors: inst.priors(),
            arcs: inst.num_arcs(),
        })
        .map_err(|e| e.to_string())
    })())
}

/// Optimal allocation at `radius` with `budget` units per sensor, checked
/// against its dual certificate.
#[wasm_bindgen]
pub fn solve_optimal(field_json: &str, radius: f64, budget: u32) -> String {
    to_json((|| {
        let inst = compile(field_json, radius, budget, false)?;
        let solved = solve_instrumented(&inst).map_err(|e| e.to_string())?;
        let cert = build_certificate(&solved.trace, &inst).map_err(|e| e.to_string())?;
        Ok(OptimalView {
            objective: objective(&solved.schedule, &inst).map_err(|e| e.to_string())?,
            certified: verify(&solved.schedule, &cert, &inst).pass,
            counters: solved.counters,
            placements: placements(&solved.schedule, &inst),
        })
    })())
}

/// Greedy allocation; with `hetero` each sensor/location pair gets its own
/// detection probability and no exact optimum is reported.
#[wasm_bindgen]
pub fn solve_greedy(field_json: &str, radius: f64, budget: u32, hetero: bool) -> String {
    to_json((|| {
        let inst = compile(field_json, radius, budget, hetero)?;
        let schedule = greedy_solve(&inst);
        let optimum = if hetero {
            None
        } else {
            let solved = solve_instrumented(&inst).map_err(|e| e.to_string())?;
            Some(objective(&solved.schedule, &inst).map_err(|e| e.to_string())?)
        };
        Ok(GreedyView {
            objective: objective(&schedule, &inst).map_err(|e| e.to_string())?,
            optimum,
            placements: placements(&schedule, &inst),
        })
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn generate_then_solve() {
        let gen = parse(&generate(10, 60, 25.0, 3));
        assert!(gen.get("error").is_none(), "{gen}");
        let field = gen["field"].to_string();
        let opt = parse(&solve_optimal(&field, 25.0, 4));
        assert_eq!(opt["certified"], true);
        let total: u64 = opt["placements"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| p["count"].as_u64().unwrap())
            .sum();
        assert_eq!(total, 40);

        let greedy = parse(&solve_greedy(&field, 25.0, 4, false));
        let g = greedy["objective"].as_f64().unwrap();
        let best = greedy["optimum"].as_f64().unwrap();
        assert!(g <= best + 1e-12 && g >= 0.5 * best);
        assert!((best - opt["objective"].as_f64().unwrap()).abs() < 1e-12);

        let hetero = parse(&solve_greedy(&field, 25.0, 4, true));
        assert!(hetero["optimum"].is_null());
    }

    #[test]
    fn errors_are_reported_as_json() {
        assert!(parse(&solve_optimal("not json", 10.0, 1))
            .get("error")
            .is_some());
        let gen = parse(&generate(10, 60, 25.0, 3));
        let field = gen["field"].to_string();
        assert!(parse(&solve_optimal(&field, 0.01, 1))
            .get("error")
            .is_some());
    }
}
