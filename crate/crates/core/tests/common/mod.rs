//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use search_alloc::model::{validate, Arc, DetectionModel, InstanceSpec, SearchInstance};

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_agents: usize,
    pub max_locations: usize,
    pub max_total_budget: u64,
    /// Probability that a given (agent, location) pair is an arc.
    pub density: f64,
    pub heterogeneous: bool,
}

pub const TINY: Shape = Shape {
    max_agents: 3,
    max_locations: 4,
    max_total_budget: 6,
    density: 0.5,
    heterogeneous: false,
};

pub const MEDIUM: Shape = Shape {
    max_agents: 20,
    max_locations: 100,
    max_total_budget: 200,
    density: 0.15,
    heterogeneous: false,
};

fn draw_alpha(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.1) {
        1.0
    } else {
        rng.random_range(0.05..0.95)
    }
}

/// Random instance with every agent and location on at least one arc.
pub fn random_instance(shape: Shape, seed: u64) -> SearchInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=shape.max_agents);
    let k = rng.random_range(1..=shape.max_locations);
    let total = rng.random_range(m as u64..=shape.max_total_budget.max(m as u64));

    let mut budgets = vec![1u64; m];
    for _ in m as u64..total {
        budgets[rng.random_range(0..m)] += 1;
    }

    let mut adjacent = vec![vec![false; k]; m];
    for row in adjacent.iter_mut() {
        for cell in row.iter_mut() {
            *cell = rng.random_bool(shape.density);
        }
    }
    for row in adjacent.iter_mut() {
        if !row.contains(&true) {
            row[rng.random_range(0..k)] = true;
        }
    }
    for loc in 0..k {
        if !adjacent.iter().any(|row| row[loc]) {
            adjacent[rng.random_range(0..m)][loc] = true;
        }
    }
    let arcs: Vec<Arc> = (0..m)
        .flat_map(|a| (0..k).map(move |l| (a, l)))
        .filter(|&(a, l)| adjacent[a][l])
        .map(|(a, l)| Arc::new(a, l))
        .collect();

    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
    let mass: f64 = raw.iter().sum();
    let priors = raw.iter().map(|p| p / mass).collect();

    let detection = if shape.heterogeneous {
        DetectionModel::Heterogeneous(arcs.iter().map(|_| draw_alpha(&mut rng)).collect())
    } else {
        DetectionModel::Homogeneous((0..k).map(|_| draw_alpha(&mut rng)).collect())
    };
    validate(InstanceSpec {
        budgets,
        priors,
        arcs,
        detection,
    })
    .expect("generated instance is valid")
}

/// Every agent reaches every location.
pub fn full_access_instance(seed: u64) -> SearchInstance {
    random_instance(
        Shape {
            max_agents: 8,
            max_locations: 30,
            max_total_budget: 60,
            density: 1.0,
            heterogeneous: false,
        },
        seed,
    )
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
