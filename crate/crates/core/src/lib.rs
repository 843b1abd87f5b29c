//! Effort allocation for sparse multi-agent discrete search.
//!
//! `M` agents with integer effort budgets search `K` discrete locations for a
//! single stationary object. Each agent can only reach a subset of the
//! locations. When the detection probability depends on the location alone,
//! the allocation problem is a min-cost network flow and [`flowsolver`] solves
//! it exactly with a specialised primal-dual method. [`certificate`] rebuilds
//! dual prices from the solver's trace and checks optimality independently,
//! [`baseline`] provides a generic min-cost-flow solver and an exhaustive
//! oracle, and [`greedy`] handles agent-dependent detection probabilities with
//! a 1/2-approximate lazy greedy over a partition matroid.
//!
//! [`scenario`] generates random sensor fields and [`bench`] times the solvers
//! against each other.

pub mod baseline;
pub mod bench;
pub mod certificate;
pub mod flowsolver;
pub mod format;
pub mod greedy;
pub mod model;
pub mod scenario;

pub use certificate::{build_certificate, verify, Certificate, Verdict};
pub use flowsolver::{solve, SolveTrace};
pub use model::{validate, DetectionModel, InstanceSpec, Schedule, SearchInstance};
