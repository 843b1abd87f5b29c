//! Random sensor fields: stationary sensors with a circular sensing range and
//! candidate object locations on a rectangle.
//!
//! All randomness comes from ChaCha8 seeded with the field seed. Positions use
//! stream 0, priors stream 1 and detection probabilities stream 2, so the
//! priors and alphas of a field do not depend on the radius it is compiled at.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate, Arc, DetectionModel, InstanceSpec, SearchInstance, ValidationReport};

/// Resampling attempts allowed per point.
pub const MAX_ATTEMPTS: usize = 100_000;

const POSITION_STREAM: u64 = 0;
const PRIOR_STREAM: u64 = 1;
const ALPHA_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error(
        "could not place {what} within {MAX_ATTEMPTS} attempts; radius too small for the density"
    )]
    GenerationFailed { what: String },
    #[error("invalid field parameters: {0}")]
    BadParameters(String),
    #[error("coverage broken at radius {radius}: {detail}")]
    CoverageBroken { radius: f64, detail: String },
    #[error(transparent)]
    Invalid(#[from] ValidationReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub num_sensors: usize,
    pub num_locations: usize,
    pub radius: f64,
    pub width: f64,
    pub height: f64,
    pub seed: u64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            num_sensors: 100,
            num_locations: 1000,
            radius: 15.0,
            width: 100.0,
            height: 100.0,
            seed: 0,
        }
    }
}

/// Sensor and location positions plus the sensing radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialField {
    pub width: f64,
    pub height: f64,
    pub radius: f64,
    pub seed: u64,
    pub sensors: Vec<Point>,
    pub locations: Vec<Point>,
}

fn within(a: Point, b: Point, radius: f64) -> bool {
    a.dist2(b) <= radius * radius
}

fn sample(rng: &mut impl Rng, width: f64, height: f64) -> Point {
    Point {
        x: rng.random_range(0.0..=width),
        y: rng.random_range(0.0..=height),
    }
}

/// Uniform sensors, then locations resampled until some sensor covers them,
/// then idle sensors resampled until they cover some location.
pub fn generate_field(config: &FieldConfig) -> Result<SpatialField, ScenarioError> {
    let FieldConfig {
        num_sensors,
        num_locations,
        radius,
        width,
        height,
        seed,
    } = *config;
    if num_sensors == 0 || num_locations == 0 {
        return Err(ScenarioError::BadParameters(
            "counts must be positive".into(),
        ));
    }
    if !(radius > 0.0 && width > 0.0 && height > 0.0) {
        return Err(ScenarioError::BadParameters(
            "radius and field dimensions must be positive".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(POSITION_STREAM);
    let mut sensors: Vec<Point> = (0..num_sensors)
        .map(|_| sample(&mut rng, width, height))
        .collect();

    let mut locations = Vec::with_capacity(num_locations);
    for k in 0..num_locations {
        let mut placed = None;
        for _ in 0..MAX_ATTEMPTS {
            let p = sample(&mut rng, width, height);
            if sensors.iter().any(|&s| within(s, p, radius)) {
                placed = Some(p);
                break;
            }
        }
        locations.push(placed.ok_or_else(|| ScenarioError::GenerationFailed {
            what: format!("location {k}"),
        })?);
    }

    // A sensor with nothing in range covers nobody, so moving it cannot
    // uncover a location.
    for (m, sensor) in sensors.iter_mut().enumerate() {
        if locations.iter().any(|&l| within(*sensor, l, radius)) {
            continue;
        }
        let mut placed = None;
        for _ in 0..MAX_ATTEMPTS {
            let p = sample(&mut rng, width, height);
            if locations.iter().any(|&l| within(p, l, radius)) {
                placed = Some(p);
                break;
            }
        }
        *sensor = placed.ok_or_else(|| ScenarioError::GenerationFailed {
            what: format!("sensor {m}"),
        })?;
    }

    Ok(SpatialField {
        width,
        height,
        radius,
        seed,
        sensors,
        locations,
    })
}

impl SpatialField {
    /// Sensor/location pairs within the sensing radius, sorted.
    pub fn arcs(&self) -> Vec<Arc> {
        let mut arcs = Vec::new();
        for (m, &s) in self.sensors.iter().enumerate() {
            for (k, &l) in self.locations.iter().enumerate() {
                if within(s, l, self.radius) {
                    arcs.push(Arc::new(m, k));
                }
            }
        }
        arcs
    }

    /// Checks that every point is inside the rectangle and the coverage
    /// invariants hold at the current radius.
    pub fn check(&self) -> Result<(), ScenarioError> {
        let broken = |detail: String| ScenarioError::CoverageBroken {
            radius: self.radius,
            detail,
        };
        let inside =
            |p: &Point| (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y);
        if let Some(i) = self.sensors.iter().position(|p| !inside(p)) {
            return Err(broken(format!("sensor {i} lies outside the field")));
        }
        if let Some(i) = self.locations.iter().position(|p| !inside(p)) {
            return Err(broken(format!("location {i} lies outside the field")));
        }
        let mut sensor_used = vec![false; self.sensors.len()];
        let mut location_covered = vec![false; self.locations.len()];
        for arc in self.arcs() {
            sensor_used[arc.agent] = true;
            location_covered[arc.location] = true;
        }
        if let Some(k) = location_covered.iter().position(|c| !c) {
            return Err(broken(format!(
                "location {k} is out of every sensor's range"
            )));
        }
        if let Some(m) = sensor_used.iter().position(|c| !c) {
            return Err(broken(format!("sensor {m} reaches no location")));
        }
        Ok(())
    }

    /// Same positions at another sensing radius.
    pub fn with_radius(&self, radius: f64) -> Result<SpatialField, ScenarioError> {
        let field = SpatialField {
            radius,
            ..self.clone()
        };
        field.check()?;
        Ok(field)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum PriorModel {
    /// Uniform draws on `[0, 1)` normalised to sum to one.
    #[default]
    UniformNormalized,
    /// Every location gets `1 / K`.
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaModel {
    pub low: f64,
    pub high: f64,
    /// Draw one alpha per sensor/location pair instead of per location.
    pub per_arc: bool,
}

impl Default for AlphaModel {
    fn default() -> Self {
        AlphaModel {
            low: 0.1,
            high: 0.9,
            per_arc: false,
        }
    }
}

/// Turns a field into a search instance with `budget_each` units per sensor.
pub fn compile_instance(
    field: &SpatialField,
    budget_each: u64,
    priors: &PriorModel,
    alphas: &AlphaModel,
) -> Result<SearchInstance, ScenarioError> {
    if budget_each == 0 {
        return Err(ScenarioError::BadParameters(
            "budget must be positive".into(),
        ));
    }
    if !(alphas.low > 0.0 && alphas.low <= alphas.high && alphas.high <= 1.0) {
        return Err(ScenarioError::BadParameters(format!(
            "alpha range [{}, {}] must lie in (0, 1]",
            alphas.low, alphas.high
        )));
    }
    let k = field.locations.len();
    let prior_values = match priors {
        PriorModel::UniformNormalized => {
            let mut rng = ChaCha8Rng::seed_from_u64(field.seed);
            rng.set_stream(PRIOR_STREAM);
            let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            if total > 0.0 {
                raw.iter().map(|r| r / total).collect()
            } else {
                vec![1.0 / k as f64; k]
            }
        }
        PriorModel::Equal => vec![1.0 / k as f64; k],
    };

    let arcs = field.arcs();
    let mut rng = ChaCha8Rng::seed_from_u64(field.seed);
    rng.set_stream(ALPHA_STREAM);
    let mut draw = || rng.random_range(alphas.low..=alphas.high);
    let detection = if alphas.per_arc {
        DetectionModel::Heterogeneous(arcs.iter().map(|_| draw()).collect())
    } else {
        DetectionModel::Homogeneous((0..k).map(|_| draw()).collect())
    };

    Ok(validate(InstanceSpec {
        budgets: vec![budget_each; field.sensors.len()],
        priors: prior_values,
        arcs,
        detection,
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(num_sensors: usize, num_locations: usize, radius: f64, seed: u64) -> FieldConfig {
        FieldConfig {
            num_sensors,
            num_locations,
            radius,
            width: 100.0,
            height: 100.0,
            seed,
        }
    }

    #[test]
    fn small_field_like_the_illustration() {
        let field = generate_field(&config(9, 30, 25.0, 3)).unwrap();
        assert_eq!(field.sensors.len(), 9);
        assert_eq!(field.locations.len(), 30);
        field.check().unwrap();
        let inst =
            compile_instance(&field, 5, &PriorModel::default(), &AlphaModel::default()).unwrap();
        assert_eq!(inst.num_agents(), 9);
        assert!((inst.priors().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_coverage_always_succeeds() {
        for seed in 0..20 {
            let field = generate_field(&config(1, 1, 150.0, seed)).unwrap();
            assert_eq!(field.arcs().len(), 1);
        }
    }

    #[test]
    fn tiny_radius_fails() {
        let err = generate_field(&config(5, 5, 0.001, 1)).unwrap_err();
        assert!(matches!(err, ScenarioError::GenerationFailed { .. }));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_field(&config(20, 100, 15.0, 42)).unwrap();
        let b = generate_field(&config(20, 100, 15.0, 42)).unwrap();
        assert_eq!(a, b);
        let c = generate_field(&config(20, 100, 15.0, 43)).unwrap();
        assert_ne!(a, c);
        let alphas = AlphaModel {
            per_arc: true,
            ..AlphaModel::default()
        };
        let ia = compile_instance(&a, 3, &PriorModel::default(), &alphas).unwrap();
        let ib = compile_instance(&b, 3, &PriorModel::default(), &alphas).unwrap();
        assert_eq!(ia, ib);
    }

    #[test]
    fn arcs_grow_with_radius() {
        let field = generate_field(&config(100, 1000, 15.0, 5)).unwrap();
        let mut previous: Option<Vec<Arc>> = None;
        for step in 0..7 {
            let radius = 15.0 + 2.5 * step as f64;
            let arcs = field.with_radius(radius).unwrap().arcs();
            if let Some(prev) = &previous {
                assert!(arcs.len() >= prev.len());
                assert!(prev.iter().all(|a| arcs.binary_search(a).is_ok()));
            }
            previous = Some(arcs);
        }
    }

    #[test]
    fn shrinking_radius_can_break_coverage() {
        let field = generate_field(&config(5, 50, 20.0, 9)).unwrap();
        assert!(matches!(
            field.with_radius(0.01),
            Err(ScenarioError::CoverageBroken { .. })
        ));
    }

    #[test]
    fn bad_alpha_range_rejected() {
        let field = generate_field(&config(2, 2, 200.0, 0)).unwrap();
        let alphas = AlphaModel {
            low: 0.0,
            high: 0.5,
            per_arc: false,
        };
        assert!(compile_instance(&field, 1, &PriorModel::Equal, &alphas).is_err());
    }
}
