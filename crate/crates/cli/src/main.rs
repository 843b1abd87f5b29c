//! `search-alloc` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 input or validation error.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use search_alloc::baseline::{self, BaselineError};
use search_alloc::bench::{self, BenchError, BenchOptions, BenchRow, CsvRows};
use search_alloc::certificate::{self, build_certificate, Verdict, Violation};
use search_alloc::flowsolver::{self, SolveTrace};
use search_alloc::format::{self, FormatError, IdMap, ScheduleFile};
use search_alloc::greedy;
use search_alloc::model::{objective, Schedule, SearchInstance};
use search_alloc::scenario::{self, AlphaModel, FieldConfig, PriorModel, SpatialField};

#[derive(Parser)]
#[command(
    name = "search-alloc",
    version,
    about = "Allocate search effort of several agents over discrete locations"
)]
struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal schedule with the specialised min-cost-flow solver.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Schedule output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Build and check the optimality certificate.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_name = "TRACE")]
        emit_trace: Option<PathBuf>,
    },
    /// Greedy schedule for agent-dependent detection probabilities.
    SolveGreedy {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare with the naive greedy and, when enumerable, the exact optimum.
        #[arg(long)]
        oracle_check: bool,
    },
    /// Optimal schedule with the generic network min-cost-flow solver.
    Baseline {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exhaustive enumeration instead of the network solver.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_name = "SECONDS")]
        timeout_s: Option<f64>,
    },
    /// Check a schedule against the certificate rebuilt from a solver trace.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Random sensor-field instance.
    Gen {
        #[arg(long, default_value_t = 100)]
        sensors: usize,
        #[arg(long, default_value_t = 1000)]
        locations: usize,
        #[arg(long, default_value_t = 15.0)]
        radius: f64,
        /// Budget of every sensor.
        #[arg(long)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// One detection probability per sensor/location pair.
        #[arg(long)]
        hetero: bool,
        #[arg(long, default_value_t = 100.0)]
        width: f64,
        #[arg(long, default_value_t = 100.0)]
        height: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha_low: f64,
        #[arg(long, default_value_t = 0.9)]
        alpha_high: f64,
        /// Equal priors instead of normalised uniform draws.
        #[arg(long)]
        equal_priors: bool,
        /// Reuse the positions of a saved field (`--radius` still applies).
        #[arg(long, conflicts_with_all = ["sensors", "locations", "seed", "width", "height"])]
        field: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Save the field positions for later sweeps.
        #[arg(long)]
        field_out: Option<PathBuf>,
    },
    /// Timing sweeps of the flow solver, optionally against the baseline.
    Bench {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 50)]
        sensors: usize,
        #[arg(long, default_value_t = 300)]
        locations: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        with_baseline: bool,
        /// Per-solve limit for the baseline.
        #[arg(long, default_value_t = 300.0)]
        timeout_s: f64,
        /// Sensing radius of the budget sweep.
        #[arg(long, default_value_t = 15.0)]
        radius: f64,
        /// Budget of the sparsity sweep.
        #[arg(long, default_value_t = 50)]
        budget: u64,
        /// Budgets of the budget sweep (default 10,20,...,90).
        #[arg(long, value_delimiter = ',')]
        budgets: Option<Vec<u64>>,
        /// Radii of the sparsity sweep (default 15,17.5,...,30).
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        /// Saved field for the sparsity sweep.
        #[arg(long)]
        field: Option<PathBuf>,
        /// Median times as a whitespace-separated data file.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Budget,
    Sparsity,
}

enum Failure {
    /// A check ran and did not pass.
    Verification(String),
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<(), Failure>;

fn read_instance(path: &Path) -> anyhow::Result<(SearchInstance, IdMap)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    format::parse_instance(&text).with_context(|| format!("instance {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout"),
    }
}

fn write_schedule(
    path: Option<&Path>,
    schedule: &Schedule,
    instance: &SearchInstance,
    ids: &IdMap,
) -> anyhow::Result<f64> {
    let value = objective(schedule, instance)?;
    write_json(
        path,
        &format::schedule_to_file(schedule, instance, ids, value),
    )?;
    Ok(value)
}

fn print_verdict(verdict: &Verdict) -> anyhow::Result<()> {
    write_json(None, verdict)
}

fn solve(instance: &Path, out: Option<&Path>, check: bool, emit_trace: Option<&Path>) -> Outcome {
    let (inst, ids) = read_instance(instance)?;
    if !inst.is_homogeneous() {
        return Err(anyhow!(
            "{} has agent-dependent detection probabilities; the exact solver does not apply, use `solve-greedy`",
            instance.display()
        )
        .into());
    }
    let (schedule, trace) = flowsolver::solve(&inst).map_err(anyhow::Error::from)?;
    let value = write_schedule(out, &schedule, &inst, &ids)?;
    log::info!("objective {value}");
    if let Some(path) = emit_trace {
        write_json(Some(path), &trace)?;
    }
    if check {
        let cert = build_certificate(&trace, &inst).map_err(anyhow::Error::from)?;
        let verdict = certificate::verify(&schedule, &cert, &inst);
        if !verdict.pass {
            print_verdict(&verdict)?;
            return Err(Failure::Verification("certificate check failed".into()));
        }
        log::info!("certificate verified");
    }
    Ok(())
}

fn solve_greedy(instance: &Path, out: Option<&Path>, oracle_check: bool) -> Outcome {
    let (inst, ids) = read_instance(instance)?;
    let schedule = greedy::greedy_solve(&inst);
    let value = write_schedule(out, &schedule, &inst, &ids)?;
    log::info!("objective {value}");
    if !oracle_check {
        return Ok(());
    }
    let naive = objective(&greedy::naive_greedy(&inst), &inst).map_err(anyhow::Error::from)?;
    if (naive - value).abs() > 1e-12 * value.abs().max(naive.abs()) {
        return Err(Failure::Verification(format!(
            "lazy greedy {value} differs from naive greedy {naive}"
        )));
    }
    match baseline::brute_force(&inst) {
        Ok((_, opt)) => {
            if value < 0.5 * opt - 1e-12 {
                return Err(Failure::Verification(format!(
                    "greedy {value} is below half of the optimum {opt}"
                )));
            }
            eprintln!("oracle check passed: greedy {value}, naive {naive}, optimum {opt}");
        }
        Err(BaselineError::TooLarge { estimate }) => {
            eprintln!(
                "oracle check passed against naive greedy {naive}; optimum not enumerated ({estimate:.3e} allocations)"
            );
        }
        Err(e) => return Err(anyhow::Error::from(e).into()),
    }
    Ok(())
}

fn run_baseline(
    instance: &Path,
    out: Option<&Path>,
    oracle: bool,
    timeout_s: Option<f64>,
) -> Outcome {
    let (inst, ids) = read_instance(instance)?;
    let schedule = if oracle {
        baseline::brute_force(&inst).map_err(anyhow::Error::from)?.0
    } else {
        let deadline = timeout_s
            .map(|s| Duration::try_from_secs_f64(s).map(|d| Instant::now() + d))
            .transpose()
            .map_err(|_| anyhow!("--timeout-s must be a nonnegative number of seconds"))?;
        baseline::solve_instance(&inst, deadline)
            .map_err(anyhow::Error::from)?
            .schedule
    };
    let value = write_schedule(out, &schedule, &inst, &ids)?;
    log::info!("objective {value}");
    Ok(())
}

fn run_verify(instance: &Path, schedule: &Path, trace_path: &Path) -> Outcome {
    let (inst, ids) = read_instance(instance)?;
    let file: ScheduleFile = read_json(schedule)?;
    let trace: SolveTrace = read_json(trace_path)?;
    let fail = |violations: Vec<Violation>| -> Outcome {
        print_verdict(&Verdict {
            pass: false,
            violations,
        })?;
        Err(Failure::Verification("schedule rejected".into()))
    };
    let schedule = match format::schedule_from_file(&file, &inst, &ids) {
        Ok(s) => s,
        Err(e @ (FormatError::NotAnArc { .. } | FormatError::DuplicateEntry { .. })) => {
            return fail(vec![Violation::Shape {
                detail: e.to_string(),
            }]);
        }
        Err(e) => return Err(anyhow::Error::from(e).into()),
    };
    let cert = build_certificate(&trace, &inst)
        .with_context(|| format!("trace {}", trace_path.display()))?;
    let mut verdict = certificate::verify(&schedule, &cert, &inst);
    if let Some(v) = certificate::check_reported_objective(&schedule, &inst, file.objective) {
        verdict.violations.push(v);
        verdict.pass = false;
    }
    if verdict.pass {
        print_verdict(&verdict)?;
        Ok(())
    } else {
        fail(verdict.violations)
    }
}

#[allow(clippy::too_many_arguments)]
fn generate(
    config: FieldConfig,
    budget: u64,
    hetero: bool,
    alpha_low: f64,
    alpha_high: f64,
    equal_priors: bool,
    field_in: Option<&Path>,
    out: Option<&Path>,
    field_out: Option<&Path>,
) -> Outcome {
    let field = match field_in {
        Some(path) => {
            let saved: SpatialField = read_json(path)?;
            saved
                .with_radius(config.radius)
                .map_err(anyhow::Error::from)?
        }
        None => scenario::generate_field(&config).map_err(anyhow::Error::from)?,
    };
    let priors = if equal_priors {
        PriorModel::Equal
    } else {
        PriorModel::UniformNormalized
    };
    let alphas = AlphaModel {
        low: alpha_low,
        high: alpha_high,
        per_arc: hetero,
    };
    let inst = scenario::compile_instance(&field, budget, &priors, &alphas)
        .map_err(anyhow::Error::from)?;
    log::info!(
        "{} sensors, {} locations, {} arcs",
        inst.num_agents(),
        inst.num_locations(),
        inst.num_arcs()
    );
    write_json(
        out,
        &format::instance_to_file(&inst, &IdMap::sequential(&inst)),
    )?;
    if let Some(path) = field_out {
        write_json(Some(path), &field)?;
    }
    Ok(())
}

struct BenchArgs {
    mode: Mode,
    field: FieldConfig,
    saved_field: Option<PathBuf>,
    budget: u64,
    budgets: Vec<u64>,
    radii: Vec<f64>,
    opts: BenchOptions,
    csv: PathBuf,
    gnuplot: Option<PathBuf>,
}

fn run_bench(args: BenchArgs) -> Outcome {
    if args.opts.reps == 0 {
        return Err(anyhow!("--reps must be at least 1").into());
    }
    let file =
        File::create(&args.csv).with_context(|| format!("creating {}", args.csv.display()))?;
    let mut csv = CsvRows::new(BufWriter::new(file));
    let mut rows: Vec<BenchRow> = Vec::new();
    let mut sink = |row: &BenchRow| -> Result<(), BenchError> {
        csv.write(row)?;
        rows.push(row.clone());
        Ok(())
    };
    let result = match args.mode {
        Mode::Budget => bench::run_budget_sweep(&args.field, &args.budgets, &args.opts, &mut sink),
        Mode::Sparsity => match &args.saved_field {
            Some(path) => {
                let field: SpatialField = read_json(path)?;
                bench::run_sparsity_sweep_on(
                    &field,
                    &args.radii,
                    args.budget,
                    &args.opts,
                    &mut sink,
                )
            }
            None => bench::run_sparsity_sweep(
                &args.field,
                &args.radii,
                args.budget,
                &args.opts,
                &mut sink,
            ),
        },
    };
    csv.into_inner().map_err(anyhow::Error::from)?;

    let points = bench::summarize(&rows);
    if let Some(path) = &args.gnuplot {
        let mut out = BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        );
        bench::write_gnuplot(&points, &mut out)
            .and_then(|_| out.flush())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    for p in &points {
        eprintln!(
            "param {:>6} |A| {:>7} {:<8} median {:.4e} s over {} reps",
            p.param,
            p.abs_a,
            format!("{:?}", p.solver).to_lowercase(),
            p.median_seconds,
            p.reps
        );
    }
    match result {
        Ok(()) => Ok(()),
        Err(e @ BenchError::Disagreement { .. }) => Err(Failure::Verification(e.to_string())),
        Err(e) => Err(anyhow::Error::from(e)
            .context("sweep aborted; rows so far are in the CSV")
            .into()),
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Solve {
            instance,
            out,
            verify,
            emit_trace,
        } => solve(&instance, out.as_deref(), verify, emit_trace.as_deref()),
        Command::SolveGreedy {
            instance,
            out,
            oracle_check,
        } => solve_greedy(&instance, out.as_deref(), oracle_check),
        Command::Baseline {
            instance,
            out,
            oracle,
            timeout_s,
        } => run_baseline(&instance, out.as_deref(), oracle, timeout_s),
        Command::Verify {
            instance,
            schedule,
            trace,
        } => run_verify(&instance, &schedule, &trace),
        Command::Gen {
            sensors,
            locations,
            radius,
            budget,
            seed,
            hetero,
            width,
            height,
            alpha_low,
            alpha_high,
            equal_priors,
            field,
            out,
            field_out,
        } => generate(
            FieldConfig {
                num_sensors: sensors,
                num_locations: locations,
                radius,
                width,
                height,
                seed,
            },
            budget,
            hetero,
            alpha_low,
            alpha_high,
            equal_priors,
            field.as_deref(),
            out.as_deref(),
            field_out.as_deref(),
        ),
        Command::Bench {
            mode,
            sensors,
            locations,
            reps,
            seed,
            csv,
            with_baseline,
            timeout_s,
            radius,
            budget,
            budgets,
            radii,
            field,
            gnuplot,
        } => {
            let baseline_timeout = Duration::try_from_secs_f64(timeout_s)
                .map_err(|_| anyhow!("--timeout-s must be a nonnegative number of seconds"))?;
            run_bench(BenchArgs {
                mode,
                field: FieldConfig {
                    num_sensors: sensors,
                    num_locations: locations,
                    radius,
                    seed,
                    ..FieldConfig::default()
                },
                saved_field: field,
                budget,
                budgets: budgets.unwrap_or_else(bench::default_budgets),
                radii: radii.unwrap_or_else(bench::default_radii),
                opts: BenchOptions {
                    reps,
                    with_baseline,
                    baseline_timeout,
                    ..BenchOptions::default()
                },
                csv,
                gnuplot,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Command::Bench {
        mode: Mode::Budget,
        field: Some(_),
        ..
    } = &cli.command
    {
        Cli::command()
            .error(
                ErrorKind::ArgumentConflict,
                "--field applies to --mode sparsity only",
            )
            .exit();
    }
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
