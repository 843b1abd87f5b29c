//! Runtime sweeps comparing the specialised solver with the network baseline.
//!
//! Two sweeps are supported: budget per sensor on a fixed field, and sensing
//! radius (hence `|A|`) on a fixed field. Every timed solve runs alone on the
//! calling thread. Rows stream into a caller-supplied sink so that a failure
//! part-way keeps what was already measured.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::baseline::{self, BaselineError};
use crate::flowsolver::{self, Counters, SolveError};
use crate::model::{self, SearchInstance};
use crate::scenario::{self, AlphaModel, FieldConfig, PriorModel, ScenarioError, SpatialField};

/// Relative tolerance for objective agreement between solvers.
pub const AGREEMENT_TOLERANCE: f64 = 1e-9;

/// Constant `c` in the edge-visit bounds checked by [`complexity_audit`].
pub const AUDIT_CONSTANT: u64 = 4;

pub const CSV_HEADER: &str = "sweep,param,abs_A,solver,rep,seconds,objective";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("objectives disagree at {sweep} = {param}: flow {flow}, baseline {baseline}")]
    Disagreement {
        sweep: &'static str,
        param: f64,
        flow: f64,
        baseline: f64,
    },
    #[error("bench output failed: {0}")]
    Output(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Flow,
    Baseline,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub sweep: &'static str,
    pub param: f64,
    #[serde(rename = "abs_A")]
    pub abs_a: usize,
    pub solver: SolverKind,
    pub rep: usize,
    pub seconds: f64,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub reps: usize,
    pub with_baseline: bool,
    /// Per-solve limit for the baseline; it is dropped for the rest of the
    /// sweep after the first timeout.
    pub baseline_timeout: Duration,
    /// Fast solves are repeated until this much time has passed and the
    /// fastest single solve is recorded.
    pub min_sample: Duration,
    pub priors: PriorModel,
    pub alphas: AlphaModel,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            reps: 5,
            with_baseline: false,
            baseline_timeout: Duration::from_secs(300),
            min_sample: Duration::from_millis(50),
            priors: PriorModel::default(),
            alphas: AlphaModel::default(),
        }
    }
}

/// Budgets 10, 20, ..., 90.
pub fn default_budgets() -> Vec<u64> {
    (1..=9).map(|i| i * 10).collect()
}

/// Radii 15, 17.5, ..., 30.
pub fn default_radii() -> Vec<f64> {
    (0..=6).map(|i| 15.0 + 2.5 * i as f64).collect()
}

/// Field of the reduced-size budget sweep: 50 sensors, 300 locations, radius 15.
pub fn downscaled_field(seed: u64) -> FieldConfig {
    FieldConfig {
        num_sensors: 50,
        num_locations: 300,
        radius: 15.0,
        seed,
        ..FieldConfig::default()
    }
}

fn time_solve<T>(min_sample: Duration, mut solve: impl FnMut() -> T) -> (f64, T) {
    let start = Instant::now();
    let mut fastest = f64::INFINITY;
    loop {
        let t = Instant::now();
        let out = solve();
        fastest = fastest.min(t.elapsed().as_secs_f64());
        if start.elapsed() >= min_sample {
            return (fastest, out);
        }
    }
}

fn agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= AGREEMENT_TOLERANCE * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

struct Runner<'a, S: ?Sized> {
    opts: &'a BenchOptions,
    sink: &'a mut S,
    /// Points from this index on are not given to the baseline.
    baseline_cutoff: usize,
}

impl<S: FnMut(&BenchRow) -> Result<(), BenchError> + ?Sized> Runner<'_, S> {
    /// Reps form the outer loop so that a transient slowdown of the machine
    /// lands on one rep of many points rather than every rep of one point.
    fn run(
        &mut self,
        sweep: &'static str,
        points: &[(f64, SearchInstance)],
    ) -> Result<(), BenchError> {
        self.baseline_cutoff = if self.opts.with_baseline {
            points.len()
        } else {
            0
        };
        for rep in 0..self.opts.reps {
            for (i, (param, instance)) in points.iter().enumerate() {
                self.measure(sweep, *param, i, instance, rep)?;
            }
        }
        Ok(())
    }

    fn measure(
        &mut self,
        sweep: &'static str,
        param: f64,
        point: usize,
        instance: &SearchInstance,
        rep: usize,
    ) -> Result<(), BenchError> {
        let abs_a = instance.num_arcs();
        let (seconds, solved) = time_solve(self.opts.min_sample, || {
            flowsolver::solve_instrumented(instance)
        });
        let flow_objective =
            model::objective(&solved?.schedule, instance).expect("solver output matches");
        (self.sink)(&BenchRow {
            sweep,
            param,
            abs_a,
            solver: SolverKind::Flow,
            rep,
            seconds,
            objective: flow_objective,
        })?;

        if point >= self.baseline_cutoff {
            return Ok(());
        }
        let timeout = self.opts.baseline_timeout;
        let (seconds, result) = time_solve(self.opts.min_sample, || {
            baseline::solve_instance(instance, Some(Instant::now() + timeout))
        });
        let solution = match result {
            Ok(solution) => solution,
            Err(BaselineError::TimedOut) => {
                log::warn!("baseline timed out at {sweep} = {param}; skipping it there and beyond");
                self.baseline_cutoff = point;
                return Ok(());
            }
            Err(e) => return Err(e.into()),
        };
        if !agree(flow_objective, solution.objective) {
            return Err(BenchError::Disagreement {
                sweep,
                param,
                flow: flow_objective,
                baseline: solution.objective,
            });
        }
        (self.sink)(&BenchRow {
            sweep,
            param,
            abs_a,
            solver: SolverKind::Baseline,
            rep,
            seconds,
            objective: solution.objective,
        })
    }
}

/// Solve time against budget per sensor on one field.
pub fn run_budget_sweep<S>(
    field: &FieldConfig,
    budgets: &[u64],
    opts: &BenchOptions,
    sink: &mut S,
) -> Result<(), BenchError>
where
    S: FnMut(&BenchRow) -> Result<(), BenchError> + ?Sized,
{
    let field = scenario::generate_field(field)?;
    let points = budgets
        .iter()
        .map(|&b| {
            Ok((
                b as f64,
                scenario::compile_instance(&field, b, &opts.priors, &opts.alphas)?,
            ))
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    Runner {
        opts,
        sink,
        baseline_cutoff: 0,
    }
    .run("budget", &points)
}

/// Solve time against `|A|`, varied through the sensing radius of one fixed
/// field. The field is generated at the smallest radius.
pub fn run_sparsity_sweep<S>(
    field: &FieldConfig,
    radii: &[f64],
    budget: u64,
    opts: &BenchOptions,
    sink: &mut S,
) -> Result<(), BenchError>
where
    S: FnMut(&BenchRow) -> Result<(), BenchError> + ?Sized,
{
    let smallest = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let base = scenario::generate_field(&FieldConfig {
        radius: smallest,
        ..*field
    })?;
    run_sparsity_sweep_on(&base, radii, budget, opts, sink)
}

/// Radius sweep over an existing field.
pub fn run_sparsity_sweep_on<S>(
    field: &SpatialField,
    radii: &[f64],
    budget: u64,
    opts: &BenchOptions,
    sink: &mut S,
) -> Result<(), BenchError>
where
    S: FnMut(&BenchRow) -> Result<(), BenchError> + ?Sized,
{
    let points = radii
        .iter()
        .map(|&r| {
            let at_radius = field.with_radius(r)?;
            Ok((
                r,
                scenario::compile_instance(&at_radius, budget, &opts.priors, &opts.alphas)?,
            ))
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    Runner {
        opts,
        sink,
        baseline_cutoff: 0,
    }
    .run("sparsity", &points)
}

/// Runs `sweep` and collects its rows.
pub fn collect_rows(
    sweep: impl FnOnce(&mut dyn FnMut(&BenchRow) -> Result<(), BenchError>) -> Result<(), BenchError>,
) -> Result<Vec<BenchRow>, BenchError> {
    let mut rows = Vec::new();
    sweep(&mut |row: &BenchRow| {
        rows.push(row.clone());
        Ok(())
    })?;
    Ok(rows)
}

/// Streams rows as CSV, flushing after each one.
pub struct CsvRows<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> CsvRows<W> {
    pub fn new(out: W) -> Self {
        CsvRows {
            writer: csv::Writer::from_writer(out),
        }
    }

    pub fn write(&mut self, row: &BenchRow) -> Result<(), BenchError> {
        self.writer
            .serialize(row)
            .and_then(|_| self.writer.flush().map_err(csv::Error::from))
            .map_err(|e| BenchError::Output(e.to_string()))
    }

    pub fn into_inner(self) -> Result<W, BenchError> {
        self.writer
            .into_inner()
            .map_err(|e| BenchError::Output(e.to_string()))
    }
}

/// Median time of one solver at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: f64,
    pub abs_a: usize,
    pub solver: SolverKind,
    pub median_seconds: f64,
    pub reps: usize,
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Groups rows by `(param, solver)` in first-seen order and takes medians.
pub fn summarize(rows: &[BenchRow]) -> Vec<SweepPoint> {
    let mut keys: Vec<(f64, SolverKind, usize)> = Vec::new();
    for row in rows {
        if !keys
            .iter()
            .any(|&(p, s, _)| p == row.param && s == row.solver)
        {
            keys.push((row.param, row.solver, row.abs_a));
        }
    }
    keys.into_iter()
        .map(|(param, solver, abs_a)| {
            let mut times: Vec<f64> = rows
                .iter()
                .filter(|r| r.param == param && r.solver == solver)
                .map(|r| r.seconds)
                .collect();
            let reps = times.len();
            SweepPoint {
                param,
                abs_a,
                solver,
                median_seconds: median(&mut times),
                reps,
            }
        })
        .collect()
}

/// Whitespace-separated medians for plotting:
/// `param abs_A flow_seconds baseline_seconds` (`NaN` when absent).
pub fn write_gnuplot(points: &[SweepPoint], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "# param abs_A flow_seconds baseline_seconds")?;
    let mut params: Vec<(f64, usize)> = Vec::new();
    for p in points {
        if !params.iter().any(|&(q, _)| q == p.param) {
            params.push((p.param, p.abs_a));
        }
    }
    for (param, abs_a) in params {
        let time = |kind| {
            points
                .iter()
                .find(|p| p.param == param && p.solver == kind)
                .map_or(f64::NAN, |p| p.median_seconds)
        };
        writeln!(
            out,
            "{param} {abs_a} {:e} {:e}",
            time(SolverKind::Flow),
            time(SolverKind::Baseline)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityAudit {
    pub counters: Counters,
    pub total_budget: u64,
    pub num_arcs: u64,
    pub full_access: bool,
    /// `c * (N |A| + min(M, K) |A|)`.
    pub general_bound: u64,
    /// `c * (N + |A|)`, the amortised constant-time path bound when every
    /// agent reaches every location.
    pub full_access_bound: u64,
}

impl ComplexityAudit {
    pub fn within_bounds(&self) -> bool {
        self.counters.edge_visits <= self.general_bound
            && (!self.full_access || self.counters.edge_visits <= self.full_access_bound)
    }
}

/// Instrumented solve with the edge-visit bounds evaluated.
pub fn complexity_audit(instance: &SearchInstance) -> Result<ComplexityAudit, SolveError> {
    let solved = flowsolver::solve_instrumented(instance)?;
    let n = instance.total_budget();
    let arcs = instance.num_arcs() as u64;
    let m = instance.num_agents() as u64;
    let k = instance.num_locations() as u64;
    Ok(ComplexityAudit {
        counters: solved.counters,
        total_budget: n,
        num_arcs: arcs,
        full_access: arcs == m * k,
        general_bound: AUDIT_CONSTANT * (n * arcs + m.min(k) * arcs),
        full_access_bound: AUDIT_CONSTANT * (n + arcs),
    })
}
