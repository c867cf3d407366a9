//! Command-line driver: solves configured problems and emits solution
//! samples, sign-change tables, Wronskian tables, verification reports and
//! campaign summaries as CSV or JSON.
//!
//! Exit codes: 0 success, 1 configuration error, 2 hypothesis violation,
//! 3 verification failure (a checked conclusion found no witness).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use sturm_measure::analysis::{find_sign_changes, wronskian, wronskian_product};
use sturm_measure::error::Error;
use sturm_measure::measure::{Atom, Interval, PiecewiseMeasure, Problem};
use sturm_measure::propagator::{solve_ivp, Side, Solution};
use sturm_measure::theorems::{
    run_campaign_with_tolerance, verify_comparison, verify_separation, CampaignMode,
    GeneratorConfig,
};

#[derive(Parser)]
#[command(name = "sturm-measure", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the solvability hypothesis of the configured problem.
    Check(CommonArgs),
    /// Sample a solution: uniform grid plus one row per atom side.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of uniform sample points (default 100).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Locate and classify the sign-changing points of a solution.
    Zeros(CommonArgs),
    /// Tabulate W, W⁻, W⁺ of two solutions with product-formula residuals.
    Wronskian {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of uniform sample points (default 50).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Verify the separation case table on the configured pair.
    Separation(CommonArgs),
    /// Verify the comparison case table on the configured pair (needs beta2).
    Comparison(CommonArgs),
    /// Run a randomized verification campaign.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// isolation | separation | comparison | wronskian
        #[arg(long)]
        mode: CampaignMode,
        /// Number of instances.
        #[arg(long)]
        n: Option<usize>,
        /// Campaign seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Multiplier on the default check tolerances.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    interval: Option<IntervalSpec>,
    r: Option<f64>,
    alpha: Option<MeasureSpec>,
    beta: Option<MeasureSpec>,
    beta2: Option<MeasureSpec>,
    ivp: Option<IvpSpec>,
    ivp2: Option<IvpSpec>,
    window: Option<WindowSpec>,
    samples: Option<usize>,
    seed: Option<u64>,
    n: Option<usize>,
    tolerance: Option<f64>,
    campaign: Option<GeneratorConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalSpec {
    a: f64,
    b: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureSpec {
    #[serde(default)]
    breakpoints: Vec<f64>,
    densities: Vec<f64>,
    #[serde(default)]
    atoms: Vec<AtomSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomSpec {
    x: f64,
    w: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IvpSpec {
    x0: f64,
    u0: f64,
    v0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowSpec {
    lo: f64,
    hi: f64,
}

/// A structured diagnostic naming the failing field, printed to stderr.
#[derive(Debug, Serialize)]
struct Diagnostic {
    field: String,
    message: String,
}

struct Failure {
    code: u8,
    diagnostic: Diagnostic,
}

impl Failure {
    fn config(field: &str, message: impl ToString) -> Self {
        Failure {
            code: 1,
            diagnostic: Diagnostic {
                field: field.into(),
                message: message.to_string(),
            },
        }
    }

    fn hypothesis(message: impl ToString) -> Self {
        Failure {
            code: 2,
            diagnostic: Diagnostic {
                field: "hypothesis".into(),
                message: message.to_string(),
            },
        }
    }

    fn verification(message: impl ToString) -> Self {
        Failure {
            code: 3,
            diagnostic: Diagnostic {
                field: "verification".into(),
                message: message.to_string(),
            },
        }
    }
}

fn map_solver_error(context: &str, err: Error) -> Failure {
    match err {
        Error::HypothesisViolation { .. } => Failure::hypothesis(err),
        _ => Failure::config(context, err),
    }
}

fn load_config(path: &PathBuf) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config("config", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::config("config", e))
}

fn build_interval(config: &RunConfig) -> Result<Interval<f64>, Failure> {
    let spec = config
        .interval
        .as_ref()
        .ok_or_else(|| Failure::config("interval", "missing required field"))?;
    Interval::new(spec.a, spec.b).map_err(|e| Failure::config("interval", e))
}

fn build_measure(
    interval: Interval<f64>,
    spec: &MeasureSpec,
    field: &str,
) -> Result<PiecewiseMeasure<f64>, Failure> {
    let atoms = spec.atoms.iter().map(|a| Atom::new(a.x, a.w)).collect();
    PiecewiseMeasure::new(
        interval,
        spec.breakpoints.clone(),
        spec.densities.clone(),
        atoms,
    )
    .map_err(|e| Failure::config(field, e))
}

fn build_problem(config: &RunConfig) -> Result<Problem<f64>, Failure> {
    let interval = build_interval(config)?;
    let r = config
        .r
        .ok_or_else(|| Failure::config("r", "missing required field"))?;
    let alpha_spec = config
        .alpha
        .as_ref()
        .ok_or_else(|| Failure::config("alpha", "missing required field"))?;
    let beta_spec = config
        .beta
        .as_ref()
        .ok_or_else(|| Failure::config("beta", "missing required field"))?;
    let alpha = build_measure(interval, alpha_spec, "alpha")?;
    let beta = build_measure(interval, beta_spec, "beta")?;
    Problem::new(r, alpha, beta).map_err(|e| Failure::config("r", e))
}

fn build_second_problem(config: &RunConfig) -> Result<Problem<f64>, Failure> {
    let interval = build_interval(config)?;
    let alpha_spec = config
        .alpha
        .as_ref()
        .ok_or_else(|| Failure::config("alpha", "missing required field"))?;
    let beta2_spec = config
        .beta2
        .as_ref()
        .ok_or_else(|| Failure::config("beta2", "missing required field"))?;
    let alpha = build_measure(interval, alpha_spec, "alpha")?;
    let beta2 = build_measure(interval, beta2_spec, "beta2")?;
    let r = config.r.unwrap_or(0.5);
    Problem::new(r, alpha, beta2).map_err(|e| Failure::config("r", e))
}

fn solve_from(
    problem: &Problem<f64>,
    ivp: Option<&IvpSpec>,
    field: &str,
) -> Result<Solution<f64>, Failure> {
    let ivp = ivp.ok_or_else(|| Failure::config(field, "missing required field"))?;
    solve_ivp(problem, ivp.x0, ivp.u0, ivp.v0).map_err(|e| map_solver_error(field, e))
}

fn window_of(config: &RunConfig, interval: Interval<f64>) -> (f64, f64) {
    match &config.window {
        Some(w) => (w.lo, w.hi),
        None => {
            let inset = interval.length() * 1e-6;
            (interval.a() + inset, interval.b() - inset)
        }
    }
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, content).map_err(|e| {
            Failure::config("output", format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

fn csv_from_rows(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    wtr.write_record(header).expect("csv header");
    for row in rows {
        wtr.write_record(row).expect("csv row");
    }
    String::from_utf8(wtr.into_inner().expect("csv flush")).expect("csv utf8")
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn cmd_check(args: &CommonArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let problem = build_problem(&config)?;
    let report = problem.check_hypothesis();
    emit(&args.output, &to_json(&report))?;
    if report.pass {
        Ok(())
    } else {
        let failing = report
            .failing_atoms()
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let detail = if failing.is_empty() {
            "alpha is not strictly increasing".to_string()
        } else {
            format!("theta vanishes at atom(s): {failing}")
        };
        Err(Failure::hypothesis(detail))
    }
}

fn solve_row(sol: &Solution<f64>, x: f64, side: Side) -> Result<Vec<String>, Failure> {
    let get = |s: Side| -> Result<_, Failure> {
        sol.evaluate(x, s).map_err(|e| map_solver_error("ivp", e))
    };
    let left = get(Side::Left)?;
    let mid = get(Side::Mid)?;
    let right = get(Side::Right)?;
    let own = match side {
        Side::Left => left,
        Side::Mid => mid,
        Side::Right => right,
    };
    Ok(vec![
        fmt_f64(x),
        side.to_string(),
        fmt_f64(left.u),
        fmt_f64(own.u),
        fmt_f64(right.u),
        fmt_f64(left.v),
        fmt_f64(own.v),
        fmt_f64(right.v),
    ])
}

fn cmd_solve(args: &CommonArgs, samples_flag: Option<usize>) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let problem = build_problem(&config)?;
    let sol = solve_from(&problem, config.ivp.as_ref(), "ivp")?;
    let samples = samples_flag.or(config.samples).unwrap_or(100).max(2);
    let (lo, hi) = window_of(&config, problem.interval());

    // rows keyed for a stable sort: atoms contribute three sides in order
    let mut keyed: Vec<(f64, u8, Vec<String>)> = Vec::new();
    for i in 0..samples {
        let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        if problem.alpha().delta(x).unwrap_or(0.0) != 0.0
            || problem.beta().delta(x).unwrap_or(0.0) != 0.0
        {
            continue; // atom rows are emitted below
        }
        keyed.push((x, 1, solve_row(&sol, x, Side::Mid)?));
    }
    for rec in sol.atom_records() {
        let x = rec.position;
        if x < lo || x > hi {
            continue;
        }
        keyed.push((x, 0, solve_row(&sol, x, Side::Left)?));
        keyed.push((x, 1, solve_row(&sol, x, Side::Mid)?));
        keyed.push((x, 2, solve_row(&sol, x, Side::Right)?));
    }
    keyed.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
    let rows: Vec<Vec<String>> = keyed.into_iter().map(|(_, _, row)| row).collect();
    let table = csv_from_rows(
        &[
            "x", "side", "u_minus", "u", "u_plus", "v_minus", "v", "v_plus",
        ],
        &rows,
    );
    emit(&args.output, &table)
}

fn cmd_zeros(args: &CommonArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let problem = build_problem(&config)?;
    let sol = solve_from(&problem, config.ivp.as_ref(), "ivp")?;
    let (lo, hi) = window_of(&config, problem.interval());
    let zs = find_sign_changes(&sol, lo, hi).map_err(|e| map_solver_error("window", e))?;
    let rows: Vec<Vec<String>> = zs
        .iter()
        .map(|z| {
            vec![
                fmt_f64(z.position),
                z.kind.to_string(),
                z.changes_sign.to_string(),
                z.criterion.to_string(),
            ]
        })
        .collect();
    let table = csv_from_rows(&["position", "kind", "changes_sign", "criterion"], &rows);
    emit(&args.output, &table)
}

fn cmd_wronskian(args: &CommonArgs, samples_flag: Option<usize>) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let problem = build_problem(&config)?;
    let u = solve_from(&problem, config.ivp.as_ref(), "ivp")?;
    let v = solve_from(&problem, config.ivp2.as_ref(), "ivp2")?;
    let samples = samples_flag.or(config.samples).unwrap_or(50).max(2);
    let (lo, hi) = window_of(&config, problem.interval());
    let mut xs: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    xs.extend(
        problem
            .atom_positions()
            .into_iter()
            .filter(|&x| x >= lo && x <= hi),
    );
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let w_ref = wronskian(&u, &v, lo)
        .map_err(|e| map_solver_error("ivp2", e))?
        .left;
    let denom = w_ref.abs().max(1.0);
    let mut rows = Vec::new();
    for &x in &xs {
        let w = wronskian(&u, &v, x).map_err(|e| map_solver_error("ivp2", e))?;
        let residual = if x > lo {
            let predicted =
                wronskian_product(&u, &v, lo, x).map_err(|e| map_solver_error("window", e))?;
            (predicted - w.left).abs() / denom
        } else {
            0.0
        };
        rows.push(vec![
            fmt_f64(x),
            fmt_f64(w.mid),
            fmt_f64(w.left),
            fmt_f64(w.right),
            fmt_f64(residual),
        ]);
    }
    let table = csv_from_rows(&["x", "w", "w_minus", "w_plus", "product_residual"], &rows);
    emit(&args.output, &table)
}

fn cmd_separation(args: &CommonArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let problem = build_problem(&config)?;
    let u = solve_from(&problem, config.ivp.as_ref(), "ivp")?;
    let v = solve_from(&problem, config.ivp2.as_ref(), "ivp2")?;
    let report = verify_separation(&u, &v).map_err(|e| map_solver_error("ivp2", e))?;
    emit(&args.output, &to_json(&report))?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::verification(format!(
            "{} conclusion(s) without witness",
            report.failure_count
        )))
    }
}

fn cmd_comparison(args: &CommonArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let problem = build_problem(&config)?;
    let second = build_second_problem(&config)?;
    let u = solve_from(&problem, config.ivp.as_ref(), "ivp")?;
    let v = solve_from(&second, config.ivp2.as_ref(), "ivp2")?;
    let report = match verify_comparison(&u, &v) {
        Ok(report) => report,
        Err(Error::UnsupportedMode(msg)) => return Err(Failure::config("r", msg)),
        Err(e) => return Err(map_solver_error("beta2", e)),
    };
    emit(&args.output, &to_json(&report))?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::verification(format!(
            "{} conclusion(s) without witness",
            report.failure_count
        )))
    }
}

fn cmd_verify(
    args: &CommonArgs,
    mode: CampaignMode,
    n: Option<usize>,
    seed: Option<u64>,
    tolerance: Option<f64>,
) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let n = n.or(config.n).unwrap_or(100);
    let seed = seed.or(config.seed).unwrap_or(0);
    let tol_scale = tolerance.or(config.tolerance).unwrap_or(1.0);
    let gen_config = match &config.campaign {
        Some(c) => c.clone(),
        None => match mode {
            CampaignMode::Isolation => GeneratorConfig::isolation(),
            CampaignMode::Separation => GeneratorConfig::separation(),
            CampaignMode::Comparison => GeneratorConfig::comparison(),
            CampaignMode::Wronskian => GeneratorConfig::wronskian(),
        },
    };
    let summary = run_campaign_with_tolerance(mode, n, seed, &gen_config, tol_scale)
        .map_err(|e| Failure::config("campaign", e))?;
    emit(&args.output, &to_json(&summary))?;
    if summary.pass {
        Ok(())
    } else {
        let seeds: Vec<String> = summary
            .failures
            .iter()
            .map(|f| f.instance_seed.to_string())
            .collect();
        Err(Failure::verification(format!(
            "{} failure(s); reproduction seeds: {}",
            summary.failures.len(),
            seeds.join(", ")
        )))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Check(common) => cmd_check(common),
        Command::Solve { common, samples } => cmd_solve(common, *samples),
        Command::Zeros(common) => cmd_zeros(common),
        Command::Wronskian { common, samples } => cmd_wronskian(common, *samples),
        Command::Separation(common) => cmd_separation(common),
        Command::Comparison(common) => cmd_comparison(common),
        Command::Verify {
            common,
            mode,
            n,
            seed,
            tolerance,
        } => cmd_verify(common, *mode, *n, *seed, *tolerance),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let diag =
                serde_json::to_string(&failure.diagnostic).expect("diagnostic serialization");
            eprintln!("{diag}");
            ExitCode::from(failure.code)
        }
    }
}
