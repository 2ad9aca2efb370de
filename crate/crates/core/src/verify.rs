//! The verification suite behind `herdlab verify` and the acceptance tests.
//!
//! Each check returns a one-line detail on success and a reason on failure,
//! and must finish within its time budget. Reference values come from the
//! [`oracle`] module or from closed forms, never from the code
//! under test.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    consensus_fraction_report, corner_event, detect_consensus, empirical_corner_probability,
    g_function, ln_g_function, residual_moments, AnalysisConfig, ComponentFate, ConsensusKind,
    DEFAULT_G_TOL,
};
use crate::cli::{self, linspace};
use crate::dynamics::{
    action_stream, monte_carlo, read_trajectory_csv, sample_actions, simulate, simulate_run, step,
    time_variant_two_agent, write_trajectory_csv, OpinionState, Schedule, SimulationConfig,
    Trajectory,
};
use crate::graph::{strongly_connected_components, WeightMatrix};
use crate::oracle;
use crate::spectral::{perron_left_vector, DEFAULT_MAX_ITERS, DEFAULT_TOL};

type CheckResult = Result<String, String>;

pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub description: &'static str,
    pub budget: Duration,
    body: fn() -> CheckResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
    pub budget_secs: f64,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:2} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_secs,
            self.detail
        )
    }
}

impl Check {
    /// Runs the check, turning panics and overruns into failures.
    pub fn run(&self) -> CheckOutcome {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(self.body)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if elapsed > self.budget {
            passed = false;
            detail = format!("{detail}; over the {}s budget", self.budget.as_secs());
        }
        CheckOutcome {
            id: self.id,
            name: self.name,
            passed,
            detail,
            elapsed_secs: elapsed.as_secs_f64(),
            budget_secs: self.budget.as_secs_f64(),
        }
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub static CHECKS: &[Check] = &[
    Check {
        id: 1,
        name: "poset-golden",
        description: "components, covers and extremal elements of the four-component network",
        budget: secs(1),
        body: poset_golden,
    },
    Check {
        id: 2,
        name: "scc-oracle",
        description: "SCCs and their order match transitive closure on random digraphs",
        budget: secs(10),
        body: scc_oracle,
    },
    Check {
        id: 3,
        name: "perron-residual",
        description: "Perron vectors of random irreducible matrices",
        budget: secs(5),
        body: perron_residual,
    },
    Check {
        id: 4,
        name: "martingale-identity",
        description: "increment identity on recorded paths and zero one-step drift",
        budget: secs(30),
        body: martingale_identity,
    },
    Check {
        id: 5,
        name: "consensus-fraction",
        description: "fraction of runs at 1 matches the martingale prediction",
        budget: secs(120),
        body: consensus_fraction,
    },
    Check {
        id: 6,
        name: "corner-probability",
        description: "mass concentrates on the consensus corners",
        budget: secs(120),
        body: corner_probability,
    },
    Check {
        id: 7,
        name: "residual-decay",
        description: "action residual second moments decay; residuals uncorrelated",
        budget: secs(120),
        body: residual_decay,
    },
    Check {
        id: 8,
        name: "g-function",
        description: "endpoints, monotonicity and brute-force agreement of g",
        budget: secs(1),
        body: g_function_check,
    },
    Check {
        id: 9,
        name: "maximal-dichotomy",
        description: "consensus iff the maximal components agree",
        budget: secs(300),
        body: maximal_dichotomy,
    },
    Check {
        id: 10,
        name: "stubborn-agent",
        description: "a pinned agent at 1 brings everyone to 1",
        budget: secs(60),
        body: stubborn_agent,
    },
    Check {
        id: 11,
        name: "time-variant",
        description: "constant weight averages; halving weight leaves the g gap",
        budget: secs(1),
        body: time_variant,
    },
    Check {
        id: 12,
        name: "counterexample",
        description: "alternating sequence oscillates; corner sequences are consensus",
        budget: secs(1),
        body: counterexample,
    },
    Check {
        id: 13,
        name: "thread-determinism",
        description: "ensemble output is identical with 1 and 8 threads",
        budget: secs(60),
        body: thread_determinism,
    },
    Check {
        id: 14,
        name: "corner-uniqueness",
        description: "no state lies in two corners for delta below 1/2",
        budget: secs(5),
        body: corner_uniqueness,
    },
    Check {
        id: 15,
        name: "csv-roundtrip",
        description: "trajectory CSV parses back to identical bits",
        budget: secs(5),
        body: csv_roundtrip,
    },
    Check {
        id: 16,
        name: "g-tolerance",
        description: "halving the truncation tolerance moves g by at most the tolerance",
        budget: secs(5),
        body: g_tolerance,
    },
];

pub fn find(name: &str) -> Option<&'static Check> {
    CHECKS.iter().find(|c| c.name == name)
}

pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS.iter().map(Check::run).collect()
}

pub fn json_report(outcomes: &[CheckOutcome]) -> String {
    #[derive(Serialize)]
    struct Report<'a> {
        version: &'static str,
        passed: bool,
        checks: &'a [CheckOutcome],
    }
    let report = Report {
        version: cli::VERSION,
        passed: outcomes.iter().all(|o| o.passed),
        checks: outcomes,
    };
    serde_json::to_string_pretty(&report).expect("report serializes")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Irreducible three-agent network shared by the ensemble checks.
pub fn three_agent_network() -> WeightMatrix {
    WeightMatrix::new(vec![
        vec![0.5, 0.3, 0.2],
        vec![0.1, 0.6, 0.3],
        vec![0.4, 0.2, 0.4],
    ])
    .expect("stochastic")
}

/// Directed ring `v_{i−1} → v_i` with self-weights 1/2.
pub fn ring_with_self_weights(n: usize) -> WeightMatrix {
    let rows = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] += 0.5;
            row[(i + n - 1) % n] += 0.5;
            row
        })
        .collect();
    WeightMatrix::new(rows).expect("stochastic")
}

fn poset_golden() -> CheckResult {
    let poset = strongly_connected_components(&WeightMatrix::four_component_example());
    let comps: Vec<Vec<usize>> = poset.components().to_vec();
    ensure(
        comps == vec![vec![0], vec![1, 2], vec![3, 4], vec![5, 6]],
        || format!("components {comps:?}"),
    )?;
    // 0-based (r, s) means C_s covers C_r
    let covers = poset.covers().to_vec();
    ensure(covers == vec![(1, 0), (3, 1), (3, 2)], || {
        format!("covers {covers:?}")
    })?;
    ensure(poset.maximal() == [0, 2], || {
        format!("maximal {:?}", poset.maximal())
    })?;
    ensure(poset.minimal() == [3], || {
        format!("minimal {:?}", poset.minimal())
    })?;
    Ok("4 components; covers (C2,C1) (C4,C2) (C4,C3); maximal C1 C3; minimal C4".into())
}

fn scc_oracle() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5cc);
    let graphs = 1500;
    for g in 0..graphs {
        let n = rng.random_range(1..=5);
        let p = [0.15, 0.3, 0.5, 0.8][g % 4];
        let adj = oracle::random_digraph(&mut rng, n, p);
        let w = oracle::stochastic_from_digraph(&mut rng, &adj);
        let poset = strongly_connected_components(&w);
        let classes = oracle::reachability_classes(&adj);
        ensure(poset.components() == classes.as_slice(), || {
            format!("graph {g}: {:?} vs oracle {classes:?}", poset.components())
        })?;
        let reach = oracle::transitive_closure(&adj);
        for r in 0..classes.len() {
            for s in 0..classes.len() {
                let expect = reach[classes[s][0]][classes[r][0]];
                ensure(poset.precedes(r, s) == expect, || {
                    format!("graph {g}: order ({r},{s}) disagrees with reachability")
                })?;
            }
        }
    }
    Ok(format!("{graphs} random digraphs with n <= 5 match"))
}

fn perron_residual() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e77);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let n = rng.random_range(1..=8);
        let w = oracle::random_irreducible(&mut rng, n);
        let pi = perron_left_vector(&w, DEFAULT_TOL, DEFAULT_MAX_ITERS).map_err(err)?;
        let p = pi.values();
        let residual = (0..n)
            .map(|j| ((0..n).map(|i| p[i] * w.get(i, j)).sum::<f64>() - p[j]).abs())
            .fold(0.0, f64::max);
        let sum: f64 = p.iter().sum();
        ensure(residual <= 1e-10, || {
            format!("matrix {k}: residual {residual:e}")
        })?;
        ensure(p.iter().all(|&v| v > 0.0), || {
            format!("matrix {k}: non-positive entry")
        })?;
        ensure((sum - 1.0).abs() <= 1e-12, || {
            format!("matrix {k}: sum {sum}")
        })?;
        let reference = oracle::perron_by_squaring(&w);
        let gap = p
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        ensure(gap <= 1e-9, || {
            format!("matrix {k}: differs from squaring oracle by {gap:e}")
        })?;
        worst = worst.max(residual);
    }
    Ok(format!("100 matrices, worst residual {worst:.1e}"))
}

fn martingale_identity() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3a7);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let n = rng.random_range(2..=8);
        let w = oracle::random_irreducible(&mut rng, n);
        let alpha = rng.random_range(0.05..0.95);
        let x1: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let cfg = SimulationConfig::new(w.clone(), alpha, x1, 300, k)
            .map_err(err)?
            .recording_actions(true);
        let traj = simulate(&cfg).map_err(err)?;
        let pi = perron_left_vector(&w, DEFAULT_TOL, DEFAULT_MAX_ITERS).map_err(err)?;
        let p = pi.values();
        for s in 0..traj.len() - 1 {
            let now = traj.state(s);
            let next = traj.state(s + 1);
            let a = traj.action(now.t).ok_or("missing action")?;
            let q0: f64 = p.iter().zip(now.x).map(|(a, b)| a * b).sum();
            let q1: f64 = p.iter().zip(next.x).map(|(a, b)| a * b).sum();
            let rhs: f64 = alpha
                * (0..n)
                    .map(|i| p[i] * (f64::from(a[i]) - now.x[i]))
                    .sum::<f64>();
            let e = (q1 - q0 - rhs).abs();
            ensure(e <= 1e-14, || {
                format!("path {k}, t = {}: error {e:e}", now.t)
            })?;
            worst = worst.max(e);
        }
    }

    // one step from a fixed interior state
    let w = three_agent_network();
    let pi = perron_left_vector(&w, DEFAULT_TOL, DEFAULT_MAX_ITERS).map_err(err)?;
    let alpha = 0.3;
    let x = OpinionState::new(1, vec![0.2, 0.5, 0.7]).map_err(err)?;
    let m = 100_000u64;
    let q0 = pi.dot(&x.x);
    let mut sum = 0.0;
    for r in 0..m {
        let mut rng = action_stream(0xd1f7, r);
        let a = sample_actions(&x, &mut rng);
        let next = step(&x, &a, &w, alpha, &[]).map_err(err)?;
        sum += pi.dot(&next.x) - q0;
    }
    let mean = sum / m as f64;
    let var: f64 = alpha
        * alpha
        * (0..3)
            .map(|i| pi[i] * pi[i] * x.x[i] * (1.0 - x.x[i]))
            .sum::<f64>();
    let bound = 4.0 * (var / m as f64).sqrt();
    ensure(mean.abs() <= bound, || {
        format!("one-step mean {mean:e} exceeds 4 sigma {bound:e}")
    })?;
    Ok(format!(
        "100 paths, worst identity error {worst:.1e}; one-step mean {mean:.2e} within {bound:.2e}"
    ))
}

fn consensus_fraction() -> CheckResult {
    let w = WeightMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).map_err(err)?;
    let cfg = SimulationConfig::new(w.clone(), 0.5, vec![0.3, 0.3], 3000, 0xf7ac).map_err(err)?;
    let analysis = AnalysisConfig::new(0.01, 50).map_err(err)?;
    let ens = monte_carlo(&cfg, 10_000, &analysis, &[]).map_err(err)?;
    let pi = perron_left_vector(&w, DEFAULT_TOL, DEFAULT_MAX_ITERS).map_err(err)?;
    let rep = consensus_fraction_report(&ens, &pi, &cfg.x1).map_err(err)?;
    ensure(rep.agrees(), || {
        format!(
            "fraction {} outside [{}, {}] around {}",
            rep.fraction, rep.ci_low, rep.ci_high, rep.predicted
        )
    })?;
    Ok(format!(
        "all 10000 decided; fraction {:.4} in 99% CI [{:.4}, {:.4}] containing {:.2}",
        rep.fraction, rep.ci_low, rep.ci_high, rep.predicted
    ))
}

fn corner_probability() -> CheckResult {
    let cfg = SimulationConfig::new(three_agent_network(), 0.3, vec![0.2, 0.5, 0.7], 2000, 0xc0)
        .map_err(err)?;
    let ens = monte_carlo(&cfg, 10_000, &AnalysisConfig::default(), &[2000]).map_err(err)?;
    let c = empirical_corner_probability(&ens, 2000, 0.05).map_err(err)?;
    let consensus = c.p_zero() + c.p_one();
    ensure(consensus > 0.99, || format!("p_zero + p_one = {consensus}"))?;
    ensure(c.p_mixed() < 0.01, || format!("p_mixed = {}", c.p_mixed()))?;
    ensure(c.any == c.zero + c.one + c.mixed, || {
        "counts do not add up".into()
    })?;
    Ok(format!(
        "at t = 2000: p_zero {:.4}, p_one {:.4}, p_mixed {:.4}",
        c.p_zero(),
        c.p_one(),
        c.p_mixed()
    ))
}

fn residual_decay() -> CheckResult {
    let times = [1, 50, 200, 800];
    // actions exist for t < t_max, so run one step past the last sample
    let cfg = SimulationConfig::new(three_agent_network(), 0.3, vec![0.2, 0.5, 0.7], 801, 0x7e5)
        .map_err(err)?
        .recording_actions(true);
    let ens = monte_carlo(&cfg, 10_000, &AnalysisConfig::default(), &times).map_err(err)?;
    let m = residual_moments(&ens, &times).map_err(err)?;
    for i in 0..3 {
        let series: Vec<f64> = m.second_moment.iter().map(|row| row[i]).collect();
        ensure(series.windows(2).all(|p| p[1] < p[0]), || {
            format!(
                "agent {}: E(y^2) not strictly decreasing: {series:?}",
                i + 1
            )
        })?;
        ensure(series[3] < 0.01, || {
            format!("agent {}: E(y^2) at 800 = {}", i + 1, series[3])
        })?;
    }
    let mut worst: f64 = 0.0;
    for &(i, j, rho) in &m.correlation[0] {
        let rho = rho.ok_or_else(|| format!("zero variance for pair ({i}, {j})"))?;
        ensure(rho.abs() < 0.03, || {
            format!("corr(y{}, y{}) = {rho}", i + 1, j + 1)
        })?;
        worst = worst.max(rho.abs());
    }
    let mean_sq: Vec<String> = m
        .second_moment
        .iter()
        .map(|row| format!("{:.2e}", row.iter().sum::<f64>() / 3.0))
        .collect();
    Ok(format!(
        "mean E(y^2) over t = 1, 50, 200, 800: {}; max |corr| at t = 1: {worst:.4}",
        mean_sq.join(", ")
    ))
}

fn g_function_check() -> CheckResult {
    let alphas = linspace(0.001, 0.999, 12);
    let gammas = linspace(0.0, 1.0, 101);
    for &a in &alphas {
        let g0 = g_function(a, 6, 0.0, DEFAULT_G_TOL).map_err(err)?;
        let g1 = g_function(a, 6, 1.0, DEFAULT_G_TOL).map_err(err)?;
        ensure(g0 == 1.0 && g1 == 0.0, || {
            format!("alpha {a}: g(0) = {g0}, g(1) = {g1}")
        })?;
        let ln: Vec<f64> = gammas
            .iter()
            .map(|&g| ln_g_function(a, 6, g, DEFAULT_G_TOL))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        ensure(ln.windows(2).all(|p| p[1] < p[0]), || {
            format!("alpha {a}: ln g not strictly decreasing")
        })?;
        let g: Vec<f64> = gammas
            .iter()
            .map(|&x| g_function(a, 6, x, DEFAULT_G_TOL))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        ensure(g.windows(2).all(|p| p[1] <= p[0]), || {
            format!("alpha {a}: g increases")
        })?;
        if a >= 0.1 {
            for (&x, &v) in gammas.iter().zip(&g) {
                let brute = oracle::truncated_product(a, 6, x, 200);
                ensure((v - brute).abs() <= 1e-10, || {
                    format!("alpha {a}, gamma {x}: {v} vs brute force {brute}")
                })?;
            }
        }
    }
    let coarse: Vec<f64> = linspace(0.0, 1.0, 11)
        .iter()
        .map(|&x| g_function(0.3, 6, x, DEFAULT_G_TOL))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(coarse.windows(2).all(|p| p[1] < p[0]), || {
        format!("g(0.3, 6, .) not strictly decreasing: {coarse:?}")
    })?;
    let half = g_function(0.5, 1, 0.5, DEFAULT_G_TOL).map_err(err)?;
    let brute = oracle::truncated_product(0.5, 1, 0.5, 200);
    ensure((half - brute).abs() <= 1e-12, || {
        format!("g(1/2, 1, 1/2) = {half} vs {brute}")
    })?;
    Ok(format!(
        "12 alphas x 101 gammas; g(1/2, 1, 1/2) = {half:.15}"
    ))
}

fn maximal_dichotomy() -> CheckResult {
    let w = WeightMatrix::four_component_example();
    let cfg = SimulationConfig::new(w, 0.1, vec![0.5; 7], 5000, 0xd1c0).map_err(err)?;
    let ens = monte_carlo(&cfg, 2000, &AnalysisConfig::default(), &[]).map_err(err)?;
    let (mut agree, mut split, mut undecided) = (0, 0, 0);
    for run in &ens.runs {
        let v = &run.verdict;
        if v.kind == ConsensusKind::Undecided {
            undecided += 1;
            continue;
        }
        let fates = &v.per_component;
        let bad = || format!("run {}: {:?} {:?}", run.run_index, v.kind, fates);
        match (fates[0], fates[2]) {
            (ComponentFate::ToOne, ComponentFate::ToOne) => {
                ensure(
                    v.kind == ConsensusKind::ConsensusOne && fates[3] == ComponentFate::ToOne,
                    bad,
                )?;
                agree += 1;
            }
            (ComponentFate::ToZero, ComponentFate::ToZero) => {
                ensure(
                    v.kind == ConsensusKind::ConsensusZero && fates[3] == ComponentFate::ToZero,
                    bad,
                )?;
                agree += 1;
            }
            (ComponentFate::ToOne, ComponentFate::ToZero)
            | (ComponentFate::ToZero, ComponentFate::ToOne) => {
                ensure(
                    v.kind == ConsensusKind::NonConsensus && fates[3] == ComponentFate::Oscillating,
                    bad,
                )?;
                split += 1;
            }
            _ => {
                return Err(format!(
                    "{}: decided with unsettled maximal component",
                    bad()
                ))
            }
        }
    }
    ensure(agree > 0 && split > 0, || {
        format!("agree {agree}, split {split}")
    })?;
    ensure(undecided * 100 < ens.runs.len(), || {
        format!("{undecided} undecided runs")
    })?;
    Ok(format!("2000 runs: {agree} agree -> consensus, {split} split -> C4 oscillating, {undecided} undecided"))
}

fn stubborn_agent() -> CheckResult {
    let mut x1 = vec![0.5; 7];
    x1[0] = 1.0;
    let cfg = SimulationConfig::new(ring_with_self_weights(7), 0.1, x1, 3000, 0x57b)
        .map_err(err)?
        .with_stubborn([0])
        .map_err(err)?;
    let ens = monte_carlo(&cfg, 1000, &AnalysisConfig::default(), &[]).map_err(err)?;
    let ones = ens
        .runs
        .iter()
        .filter(|r| r.verdict.kind == ConsensusKind::ConsensusOne)
        .count();
    ensure(ones == 1000, || {
        format!("{ones} of 1000 runs reached consensus at 1")
    })?;
    let latest = ens
        .runs
        .iter()
        .filter_map(|r| r.verdict.first_hit)
        .max()
        .unwrap_or(0);
    Ok(format!(
        "1000 of 1000 runs at consensus 1; latest entry t = {latest}"
    ))
}

fn time_variant() -> CheckResult {
    for beta in [0.1, 0.25, 0.4, 0.5] {
        let out = time_variant_two_agent(beta, Schedule::Constant, [1.0, 0.0], 200).map_err(err)?;
        let off = out
            .limit_matrix
            .iter()
            .flatten()
            .map(|v| (v - 0.5).abs())
            .fold(0.0, f64::max);
        ensure(off <= 1e-12, || {
            format!("constant beta {beta}: limit entries off by {off:e}")
        })?;
        let end = out.trajectory.last().copied().unwrap_or_default();
        ensure(end.iter().all(|v| (v - 0.5).abs() <= 1e-12), || {
            format!("constant beta {beta}: x_T = {end:?}")
        })?;
    }
    let steps = 200;
    let out = time_variant_two_agent(0.25, Schedule::Halving, [1.0, 0.0], steps).map_err(err)?;
    let betas: Vec<f64> = (0..steps).map(|t| 0.25 / 2f64.powi(t as i32)).collect();
    let direct = oracle::diagonal_product_gap(&betas, [1.0, 0.0]);
    let g = g_function(0.5, 1, 0.5, DEFAULT_G_TOL).map_err(err)?;
    let gap = out.terminal_gap();
    ensure((gap - direct).abs() <= 1e-10, || {
        format!("gap {gap} vs direct product {direct}")
    })?;
    ensure((g - direct).abs() <= 1e-10, || {
        format!("g {g} vs direct product {direct}")
    })?;
    ensure(gap > 0.0, || "gap closed".into())?;
    let lim = out.limit_matrix;
    ensure((lim[0][0] - lim[0][1] - g).abs() <= 1e-12, || {
        format!("limit matrix {lim:?}")
    })?;
    Ok(format!(
        "constant beta averages to 1/2; halving beta = 0.25 leaves gap {gap:.15}"
    ))
}

fn counterexample() -> CheckResult {
    let cfg = AnalysisConfig::default();
    let scalar = strongly_connected_components(&WeightMatrix::identity(1));
    let alternating = (1..=200).map(|t| vec![f64::from(t % 2)]).collect();
    let traj = Trajectory::from_states(alternating, 0.5).map_err(err)?;
    let v = detect_consensus(&traj, &scalar, &cfg).map_err(err)?;
    ensure(
        v.kind == ConsensusKind::NonConsensus && v.per_component == [ComponentFate::Oscillating],
        || format!("alternating sequence: {:?} {:?}", v.kind, v.per_component),
    )?;
    for n in [1, 3, 7] {
        let poset = strongly_connected_components(&WeightMatrix::identity(n));
        for (c, kind) in [
            (0.0, ConsensusKind::ConsensusZero),
            (1.0, ConsensusKind::ConsensusOne),
        ] {
            let traj = Trajectory::from_states(vec![vec![c; n]; 120], 0.5).map_err(err)?;
            let v = detect_consensus(&traj, &poset, &cfg).map_err(err)?;
            ensure(v.kind == kind && v.first_hit == Some(1), || {
                format!("constant {c} with {n} agents: {:?}", v.kind)
            })?;
        }
    }
    Ok("1,0,1,0,... is non_consensus/oscillating; constant corners are consensus".into())
}

fn thread_determinism() -> CheckResult {
    let base = std::env::temp_dir().join(format!(
        "herdlab-verify-{}-{}",
        std::process::id(),
        Instant::now().elapsed().as_nanos()
    ));
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let dir = base.join(format!("threads-{threads}"));
        let args = [
            "herdlab",
            "ensemble",
            "--runs",
            "400",
            "--seed",
            "2024",
            "--t-max",
            "600",
            "--alpha",
            "0.2",
            "--sample-times",
            "1,100,600",
            "--threads",
            threads,
            "--out",
        ];
        let mut argv: Vec<std::ffi::OsString> = args.iter().map(Into::into).collect();
        argv.push(dir.clone().into());
        let mut sink = Vec::new();
        let code = cli::run_with(argv, &mut sink, &mut Vec::new());
        ensure(code == 0, || {
            format!("ensemble with {threads} threads exited {code}")
        })?;
        let summary = std::fs::read(dir.join("summary.csv")).map_err(err)?;
        let corners = std::fs::read(dir.join("corners.csv")).map_err(err)?;
        outputs.push((summary, corners));
    }
    let _ = std::fs::remove_dir_all(&base);
    ensure(outputs[0] == outputs[1], || {
        "outputs differ between 1 and 8 threads".into()
    })?;
    Ok(format!(
        "summary.csv ({} bytes) and corners.csv identical",
        outputs[0].0.len()
    ))
}

fn corner_uniqueness() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    for k in 0..20_000 {
        let n = rng.random_range(1..=6);
        let delta = rng.random_range(1e-6..0.5);
        // bias coordinates toward the corners so labels actually occur
        let x: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                if rng.random::<bool>() {
                    u * u * 0.5
                } else {
                    1.0 - u * u * 0.5
                }
            })
            .collect();
        let matches = (0..1u32 << n)
            .filter(|mask| {
                (0..n).all(|i| {
                    let m = f64::from((mask >> i) & 1);
                    (x[i] - m).abs() < delta
                })
            })
            .count();
        let label = corner_event(&x, delta).map_err(err)?;
        ensure(matches <= 1 && (matches == 1) == label.is_some(), || {
            format!("state {k}: {matches} matching corners, label {label:?}")
        })?;
    }
    Ok("20000 random states have at most one corner label".into())
}

fn csv_roundtrip() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc5f);
    for k in 0..50 {
        let n = rng.random_range(1..=6);
        let w = oracle::random_irreducible(&mut rng, n);
        let x1: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let cfg =
            SimulationConfig::new(w, rng.random_range(0.01..0.99), x1, 100, k).map_err(err)?;
        let traj = simulate_run(&cfg, k).map_err(err)?;
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf, &[("seed", k.to_string())]).map_err(err)?;
        let table = read_trajectory_csv(std::str::from_utf8(&buf).map_err(err)?).map_err(err)?;
        for (s, row) in traj.states().zip(&table.states) {
            ensure(
                s.x.iter().zip(row).all(|(a, b)| a.to_bits() == b.to_bits()),
                || format!("trajectory {k}, t = {}: bits differ", s.t),
            )?;
        }
    }
    Ok("50 trajectories re-parse to identical bits".into())
}

fn g_tolerance() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6701);
    for _ in 0..2000 {
        let a = rng.random_range(0.001..0.999);
        let n = rng.random_range(1..=20);
        let g = rng.random::<f64>();
        let tol = 10f64.powi(-rng.random_range(3..=14));
        let coarse = g_function(a, n, g, tol).map_err(err)?;
        let fine = g_function(a, n, g, tol / 2.0).map_err(err)?;
        ensure((0.0..=1.0).contains(&coarse), || {
            format!("g = {coarse} outside [0, 1]")
        })?;
        ensure((coarse - fine).abs() <= tol, || {
            format!("alpha {a}, N {n}, gamma {g}, tol {tol}: {coarse} vs {fine}")
        })?;
    }
    Ok("2000 random (alpha, N, gamma, tol) stable under halving tol".into())
}
