//! The `herdlab` command line.
//!
//! Every subcommand takes its scenario from an optional `--config` file and
//! lets flags override individual keys. Exit codes: 0 success, 1 failed
//! verification, 2 bad configuration or input.

mod output;
mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use self::output::{
    corner_table_csv, ensemble_summary_csv, gfunc_csv, linspace, num, timevariant_csv, VERSION,
};
pub use self::scenario::{ScenarioFile, KEYS};

use crate::analysis::{
    consensus_fraction_report, AnalysisConfig, ComponentFate, ConsensusKind, DEFAULT_DELTA,
    DEFAULT_G_TOL, DEFAULT_WINDOW,
};
use crate::dynamics::{
    monte_carlo, simulate, time_variant_two_agent, write_trajectory_csv, Schedule, SimulationConfig,
};
use crate::error::{Error, Result};
use crate::graph::{
    is_irreducible, load_weight_matrix, parse_inline_matrix, strongly_connected_components,
    WeightMatrix,
};
use crate::spectral::{perron_left_vector, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Seeds for the `reproduce` trajectories on the four-component network,
/// with `α = 0.5` and every agent starting at 0.5. Seed 1 is the first seed
/// whose run reaches consensus at 1; seed 2 is the first whose run sends
/// C1 and C2 to 1 and C3 to 0, leaving C4 in between.
pub const CONSENSUS_FIGURE_SEED: u64 = 1;
pub const SPLIT_FIGURE_SEED: u64 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "herdlab",
    version,
    about = "Random-action opinion dynamics on directed networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one trajectory and write it as CSV.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo ensemble and summarize verdicts and corner events.
    Ensemble(EnsembleArgs),
    /// Print strongly connected components, covers and extremal elements.
    Scc(SccArgs),
    /// Export the g function on a grid of gamma and alpha values.
    Gfunc(GfuncArgs),
    /// Deterministic two-agent system with a time-varying weight.
    Timevariant(TimeVariantArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Write the g grid and two example trajectories on the four-component network.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weight matrix file, or inline rows such as "0.5 0.5; 0.5 0.5".
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Initial opinions: one value for every agent, or a comma-separated list.
    #[arg(long)]
    x1: Option<String>,
    #[arg(long)]
    t_max: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated 1-based agents whose opinion stays fixed.
    #[arg(long)]
    stubborn: Option<String>,
    /// Output directory; without it the main CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long)]
    runs: Option<usize>,
    /// Corner radius used by the verdicts and the corner table.
    #[arg(long)]
    delta: Option<f64>,
    /// Number of final steps a component must stay in a corner.
    #[arg(long)]
    window: Option<usize>,
    /// Comma-separated times for the corner table (default: t_max).
    #[arg(long)]
    sample_times: Option<String>,
    /// Worker threads, 0 = automatic. Falls back to HERDLAB_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct SccArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weight matrix file or inline rows; defaults to the four-component example.
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Debug, Args)]
struct GfuncArgs {
    /// Number of evenly spaced alpha values from 0.001 to 0.999.
    #[arg(long, default_value_t = 12)]
    alpha_grid: usize,
    /// Explicit comma-separated alpha values (overrides --alpha-grid).
    #[arg(long)]
    alphas: Option<String>,
    #[arg(long, default_value_t = 6)]
    n: u32,
    /// Number of evenly spaced gamma values from 0 to 1.
    #[arg(long, default_value_t = 101)]
    gamma_points: usize,
    #[arg(long, default_value_t = DEFAULT_G_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TimeVariantArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// `constant` or `halving`.
    #[arg(long)]
    schedule: Option<Schedule>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    steps: Option<u32>,
    /// Initial state of the two agents, e.g. "1,0".
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Run only the named checks (comma-separated).
    #[arg(long)]
    only: Option<String>,
    /// Write a JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(long, default_value = "reproduce")]
    out: PathBuf,
}

/// Resolved scenario: flags over config file over defaults.
#[derive(Debug, Clone)]
struct Scenario {
    sim: SimulationConfig,
    runs: usize,
    analysis: AnalysisConfig,
    sample_times: Vec<u64>,
    out: Option<PathBuf>,
}

fn load_weights(spec: &str) -> Result<WeightMatrix> {
    if scenario::looks_inline(spec) {
        parse_inline_matrix(spec)
    } else {
        load_weight_matrix(spec)
    }
}

fn flag_list<T: std::str::FromStr>(flag: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    scenario::parse_list(v).map_err(|e| Error::invalid(format!("--{flag}: {e}")))
}

fn broadcast(x1: Vec<f64>, n: usize) -> Vec<f64> {
    if x1.len() == 1 {
        vec![x1[0]; n]
    } else {
        x1
    }
}

fn one_based(agents: Vec<usize>) -> Result<Vec<usize>> {
    agents
        .into_iter()
        .map(|k| {
            k.checked_sub(1)
                .ok_or_else(|| Error::invalid("agents are numbered from 1"))
        })
        .collect()
}

impl Scenario {
    fn resolve(args: &ScenarioArgs, extra: Option<&EnsembleArgs>) -> Result<Self> {
        let file = match &args.config {
            Some(p) => ScenarioFile::load(p)?,
            None => ScenarioFile::default(),
        };
        let w = match &args.weights {
            Some(s) => load_weights(s)?,
            None => file
                .weights()?
                .unwrap_or_else(WeightMatrix::four_component_example),
        };
        let n = w.n();
        let alpha = args.alpha.or(file.get("alpha")?).unwrap_or(0.1);
        let x1 = match &args.x1 {
            Some(s) => flag_list("x1", s)?,
            None => file.list("x1")?.unwrap_or(vec![0.5]),
        };
        let t_max = args.t_max.or(file.get("t_max")?).unwrap_or(1000);
        let seed = args.seed.or(file.get("seed")?).unwrap_or(0);
        let stubborn = match &args.stubborn {
            Some(s) => flag_list("stubborn", s)?,
            None => file.list("stubborn")?.unwrap_or_default(),
        };
        let sim = SimulationConfig::new(w, alpha, broadcast(x1, n), t_max, seed)?
            .with_stubborn(one_based(stubborn)?)?;

        let runs = extra
            .and_then(|e| e.runs)
            .or(file.get("runs")?)
            .unwrap_or(100);
        let delta = extra
            .and_then(|e| e.delta)
            .or(file.get("delta")?)
            .unwrap_or(DEFAULT_DELTA);
        let window = extra
            .and_then(|e| e.window)
            .or(file.get("window")?)
            .unwrap_or(DEFAULT_WINDOW);
        let sample_times = match extra.and_then(|e| e.sample_times.as_deref()) {
            Some(s) => flag_list("sample-times", s)?,
            None => file.list("sample_times")?.unwrap_or(vec![t_max]),
        };
        Ok(Scenario {
            sim,
            runs,
            analysis: AnalysisConfig::new(delta, window)?,
            sample_times,
            out: args.out.clone().or(file.output_dir()),
        })
    }
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let n = match threads {
        Some(n) => n,
        None => match std::env::var("HERDLAB_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("HERDLAB_THREADS = `{v}` is not a count")))?,
            Err(_) => 0,
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start thread pool: {e}")))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    run_with(args, &mut stdout, &mut stderr)
}

/// Like [`run`], writing to the given streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::Ensemble(a) => cmd_ensemble(&a, out),
        Command::Scc(a) => cmd_scc(&a, out),
        Command::Gfunc(a) => cmd_gfunc(&a, out),
        Command::Timevariant(a) => cmd_timevariant(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Reproduce(a) => cmd_reproduce(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let sc = Scenario::resolve(&args.scenario, None)?;
    let traj = simulate(&sc.sim)?;
    let mut meta = vec![
        ("herdlab", "trajectory".to_string()),
        ("version", VERSION.to_string()),
        ("config_digest", sc.sim.digest()),
        ("seed", sc.sim.seed.to_string()),
        ("alpha", sc.sim.alpha.to_string()),
        ("t_max", sc.sim.t_max.to_string()),
    ];
    if !traj.is_full() {
        meta.push(("stride", traj.stride().to_string()));
    }
    let mut buf = Vec::new();
    write_trajectory_csv(&traj, &mut buf, &meta).map_err(io_err)?;
    match &sc.out {
        Some(dir) => {
            let text = String::from_utf8(buf).expect("csv is utf-8");
            let path = write_file(dir, "trajectory.csv", &text)?;
            writeln!(out, "wrote {}", path.display()).map_err(io_err)?;
        }
        None => out.write_all(&buf).map_err(io_err)?,
    }
    Ok(EXIT_OK)
}

fn cmd_ensemble(args: &EnsembleArgs, out: &mut dyn Write) -> Result<i32> {
    let sc = Scenario::resolve(&args.scenario, Some(args))?;
    let pool = thread_pool(args.threads)?;
    let ens = pool.install(|| monte_carlo(&sc.sim, sc.runs, &sc.analysis, &sc.sample_times))?;
    let poset = strongly_connected_components(&sc.sim.w);
    let summary = ensemble_summary_csv(&ens, &poset);
    let corners = corner_table_csv(&ens)?;

    let count = |k| ens.runs.iter().filter(|r| r.verdict.kind == k).count();
    let mut text = String::new();
    text.push_str(&format!("runs: {}\n", ens.runs.len()));
    for k in [
        ConsensusKind::ConsensusOne,
        ConsensusKind::ConsensusZero,
        ConsensusKind::NonConsensus,
        ConsensusKind::Undecided,
    ] {
        text.push_str(&format!("{k}: {}\n", count(k)));
    }
    if is_irreducible(&sc.sim.w) && sc.sim.stubborn.is_empty() {
        let pi = perron_left_vector(&sc.sim.w, DEFAULT_TOL, DEFAULT_MAX_ITERS)?;
        match consensus_fraction_report(&ens, &pi, &sc.sim.x1) {
            Ok(rep) => text.push_str(&format!(
                "predicted fraction at 1: {:.6}, observed {:.6}, 99% CI [{:.6}, {:.6}], {}\n",
                rep.predicted,
                rep.fraction,
                rep.ci_low,
                rep.ci_high,
                if rep.agrees() { "agrees" } else { "DISAGREES" }
            )),
            Err(Error::UndecidedRuns(k)) => {
                text.push_str(&format!("prediction skipped: {k} runs undecided\n"))
            }
            Err(e) => return Err(e),
        }
    }

    match &sc.out {
        Some(dir) => {
            write_file(dir, "summary.csv", &summary)?;
            write_file(dir, "corners.csv", &corners)?;
            text.push_str(&format!("wrote {}\n", dir.display()));
            out.write_all(text.as_bytes()).map_err(io_err)?;
        }
        None => {
            out.write_all(text.as_bytes()).map_err(io_err)?;
            out.write_all(corners.as_bytes()).map_err(io_err)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_scc(args: &SccArgs, out: &mut dyn Write) -> Result<i32> {
    let w = match (&args.weights, &args.config) {
        (Some(s), _) => load_weights(s)?,
        (None, Some(p)) => ScenarioFile::load(p)?
            .weights()?
            .ok_or_else(|| Error::invalid("scenario file has no `weights`"))?,
        (None, None) => WeightMatrix::four_component_example(),
    };
    let poset = strongly_connected_components(&w);
    writeln!(out, "{poset}").map_err(io_err)?;
    Ok(EXIT_OK)
}

fn cmd_gfunc(args: &GfuncArgs, out: &mut dyn Write) -> Result<i32> {
    let alphas = match &args.alphas {
        Some(s) => flag_list("alphas", s)?,
        None => linspace(0.001, 0.999, args.alpha_grid),
    };
    if alphas.is_empty() || args.gamma_points == 0 {
        return Err(Error::invalid("need at least one alpha and one gamma"));
    }
    let gammas = linspace(0.0, 1.0, args.gamma_points);
    let text = gfunc_csv(&alphas, args.n, &gammas, args.tol)?;
    match &args.out {
        Some(dir) => {
            let path = write_file(dir, "gfunc.csv", &text)?;
            writeln!(out, "wrote {}", path.display()).map_err(io_err)?;
        }
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    Ok(EXIT_OK)
}

fn cmd_timevariant(args: &TimeVariantArgs, out: &mut dyn Write) -> Result<i32> {
    let file = match &args.config {
        Some(p) => ScenarioFile::load(p)?,
        None => ScenarioFile::default(),
    };
    let schedule = args
        .schedule
        .or(file.get("schedule")?)
        .unwrap_or(Schedule::Halving);
    let beta = args.beta.or(file.get("beta")?).unwrap_or(0.25);
    let steps = args.steps.or(file.get("steps")?).unwrap_or(60);
    let x0: Vec<f64> = match &args.x0 {
        Some(s) => flag_list("x0", s)?,
        None => file.list("x0")?.unwrap_or(vec![1.0, 0.0]),
    };
    let x0: [f64; 2] = x0
        .try_into()
        .map_err(|v: Vec<f64>| Error::DimensionMismatch {
            expected: 2,
            found: v.len(),
        })?;
    let outcome = time_variant_two_agent(beta, schedule, x0, steps)?;
    let text = timevariant_csv(
        &outcome,
        &[
            ("herdlab", "time-variant two-agent system".into()),
            ("version", VERSION.into()),
            ("schedule", schedule.to_string()),
            ("beta", beta.to_string()),
        ],
    );
    match args.out.clone().or(file.output_dir()) {
        Some(dir) => {
            let path = write_file(&dir, "timevariant.csv", &text)?;
            writeln!(
                out,
                "terminal gap {}\nwrote {}",
                num(outcome.terminal_gap()),
                path.display()
            )
            .map_err(io_err)?;
        }
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let names: Option<Vec<String>> = match &args.only {
        Some(s) => Some(flag_list("only", s)?),
        None => None,
    };
    if let Some(names) = &names {
        if let Some(bad) = names.iter().find(|n| verify::find(n).is_none()) {
            return Err(Error::invalid(format!("unknown check `{bad}`")));
        }
    }
    let pool = thread_pool(args.threads)?;
    let mut outcomes = Vec::new();
    for check in verify::CHECKS {
        if names
            .as_ref()
            .is_some_and(|ns| !ns.iter().any(|n| n == check.name))
        {
            continue;
        }
        let outcome = pool.install(|| check.run());
        writeln!(out, "{outcome}").map_err(io_err)?;
        outcomes.push(outcome);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    writeln!(out, "{} checks, {} failed", outcomes.len(), failed).map_err(io_err)?;
    if let Some(path) = &args.report {
        let json = verify::json_report(&outcomes);
        std::fs::write(path, json).map_err(|e| Error::io(path, e))?;
    }
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

/// Trajectory CSV for one figure run on the four-component network.
fn figure_trajectory(seed: u64, expect: [ComponentFate; 4]) -> Result<String> {
    let w = WeightMatrix::four_component_example();
    let poset = strongly_connected_components(&w);
    let cfg = SimulationConfig::new(w, 0.5, vec![0.5; 7], 200, seed)?;
    let traj = simulate(&cfg)?;
    let verdict = crate::analysis::detect_consensus(&traj, &poset, &AnalysisConfig::default())?;
    if verdict.per_component != expect {
        return Err(Error::invalid(format!(
            "seed {seed} gives {:?}, expected {expect:?}",
            verdict.per_component
        )));
    }
    let fates: Vec<String> = verdict
        .per_component
        .iter()
        .enumerate()
        .map(|(r, f)| format!("C{}={f}", r + 1))
        .collect();
    let meta = [
        (
            "herdlab",
            "trajectory on the four-component network".to_string(),
        ),
        ("version", VERSION.to_string()),
        ("config_digest", cfg.digest()),
        ("seed", seed.to_string()),
        ("alpha", cfg.alpha.to_string()),
        ("verdict", verdict.kind.to_string()),
        ("components", fates.join(" ")),
    ];
    let mut buf = Vec::new();
    write_trajectory_csv(&traj, &mut buf, &meta).map_err(io_err)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

fn cmd_reproduce(args: &ReproduceArgs, out: &mut dyn Write) -> Result<i32> {
    use ComponentFate::{Oscillating, ToOne, ToZero};
    let alphas = linspace(0.001, 0.999, 12);
    let gammas = linspace(0.0, 1.0, 101);
    let files = [
        ("gfunc.csv", gfunc_csv(&alphas, 6, &gammas, DEFAULT_G_TOL)?),
        (
            "consensus.csv",
            figure_trajectory(CONSENSUS_FIGURE_SEED, [ToOne, ToOne, ToOne, ToOne])?,
        ),
        (
            "split.csv",
            figure_trajectory(SPLIT_FIGURE_SEED, [ToOne, ToOne, ToZero, Oscillating])?,
        ),
    ];
    for (name, text) in files {
        let path = write_file(&args.out, name, &text)?;
        writeln!(out, "wrote {}", path.display()).map_err(io_err)?;
    }
    Ok(EXIT_OK)
}
