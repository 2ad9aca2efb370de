//! The Random Actions update rule and its simulation.
//!
//! Every agent `i` holds an opinion `x_i ∈ [0, 1]`, which is the probability
//! it takes action 1. At each step all agents act independently,
//! `a_i ~ Bernoulli(x_i)`, and opinions move towards the trust-weighted
//! average of the observed actions:
//!
//! > x_{t+1} = (1 − α) x_t + α W a_t
//!
//! Time starts at `t = 1`. Opinions stay in the unit cube because each update
//! is a convex combination, and the corners `{0,1}^n` with `a = x` are
//! absorbing.

mod csv;
mod ensemble;
mod rng;
mod time_variant;

use std::collections::BTreeSet;

use rand::Rng;
use sha2::{Digest, Sha256};

pub use self::csv::{read_trajectory_csv, write_trajectory_csv, TrajectoryTable};
pub use self::ensemble::{monte_carlo, Ensemble, RunSummary, Sample};
pub use self::rng::{action_stream, ActionRng};
pub use self::time_variant::{time_variant_two_agent, Schedule, TimeVariantOutcome};

use crate::error::{Error, Result};
use crate::graph::WeightMatrix;

/// Trajectories up to this horizon keep every state.
pub const FULL_HISTORY_LIMIT: u64 = 100_000;
/// Length of the contiguous final segment kept by strided trajectories.
pub const STRIDED_TAIL: u64 = 10_000;

/// Opinions of all agents at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionState {
    pub t: u64,
    pub x: Vec<f64>,
}

impl OpinionState {
    pub fn new(t: u64, x: Vec<f64>) -> Result<Self> {
        if t == 0 {
            return Err(Error::invalid("time index starts at 1"));
        }
        if let Some((i, v)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::invalid(format!(
                "opinion x[{i}] = {v} outside [0, 1]"
            )));
        }
        Ok(OpinionState { t, x })
    }

    /// All agents at opinion `p`, at `t = 1`.
    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        Self::new(1, vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Binary actions of all agents at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionVector {
    pub a: Vec<u8>,
}

impl ActionVector {
    pub fn new(a: Vec<u8>) -> Result<Self> {
        if a.iter().any(|&b| b > 1) {
            return Err(Error::invalid("actions must be 0 or 1"));
        }
        Ok(ActionVector { a })
    }

    pub fn zeros(n: usize) -> Self {
        ActionVector { a: vec![0; n] }
    }

    pub fn ones(n: usize) -> Self {
        ActionVector { a: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// One independent Bernoulli draw per agent, in ascending agent order.
pub fn sample_actions<R: Rng + ?Sized>(x: &OpinionState, rng: &mut R) -> ActionVector {
    let mut a = vec![0; x.len()];
    sample_actions_into(&x.x, rng, &mut a);
    ActionVector { a }
}

/// `a_i = 1` iff `u_i < x_i` for `u_i` uniform on `[0, 1)`, so opinions 0 and
/// 1 act deterministically.
#[inline]
pub fn sample_actions_into<R: Rng + ?Sized>(x: &[f64], rng: &mut R, out: &mut [u8]) {
    for (a, &p) in out.iter_mut().zip(x) {
        *a = u8::from(rng.random::<f64>() < p);
    }
}

/// `(W a)_i`, exact at the endpoints: when every agent `i` listens to acted
/// alike the result is exactly 0 or 1.
#[inline]
fn observed_average(row: &[f64], a: &[u8]) -> f64 {
    let mut sum = 0.0;
    let mut saw_zero = false;
    let mut saw_one = false;
    for (&w, &b) in row.iter().zip(a) {
        if w > 0.0 {
            if b == 1 {
                sum += w;
                saw_one = true;
            } else {
                saw_zero = true;
            }
        }
    }
    match (saw_zero, saw_one) {
        (false, _) => 1.0,
        (_, false) => 0.0,
        _ => sum.min(1.0),
    }
}

fn step_in_place(x: &mut [f64], a: &[u8], w: &WeightMatrix, alpha: f64) {
    for (i, xi) in x.iter_mut().enumerate() {
        let s = observed_average(w.row(i), a);
        *xi = (*xi + alpha * (s - *xi)).clamp(0.0, 1.0);
    }
}

/// One application of the update rule. Agents listed in `stubborn` keep
/// their opinion.
pub fn step(
    x: &OpinionState,
    a: &ActionVector,
    w: &WeightMatrix,
    alpha: f64,
    stubborn: &[usize],
) -> Result<OpinionState> {
    let n = w.n();
    for found in [x.len(), a.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    if let Some(&k) = stubborn.iter().find(|&&k| k >= n) {
        return Err(Error::invalid(format!("stubborn agent {k} out of range")));
    }
    let mut next = x.x.clone();
    step_in_place(&mut next, &a.a, w, alpha);
    for &k in stubborn {
        next[k] = x.x[k];
    }
    Ok(OpinionState {
        t: x.t + 1,
        x: next,
    })
}

/// Everything needed to generate one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub w: WeightMatrix,
    pub alpha: f64,
    pub x1: Vec<f64>,
    pub t_max: u64,
    pub seed: u64,
    /// Agents whose opinion the engine pins (0-based).
    pub stubborn: BTreeSet<usize>,
    pub record_actions: bool,
}

impl SimulationConfig {
    pub fn new(w: WeightMatrix, alpha: f64, x1: Vec<f64>, t_max: u64, seed: u64) -> Result<Self> {
        let cfg = SimulationConfig {
            w,
            alpha,
            x1,
            t_max,
            seed,
            stubborn: BTreeSet::new(),
            record_actions: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_stubborn(mut self, agents: impl IntoIterator<Item = usize>) -> Result<Self> {
        self.stubborn = agents.into_iter().collect();
        self.validate()?;
        Ok(self)
    }

    pub fn recording_actions(mut self, yes: bool) -> Self {
        self.record_actions = yes;
        self
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!(
                "alpha = {} outside (0, 1)",
                self.alpha
            )));
        }
        if self.x1.len() != self.w.n() {
            return Err(Error::DimensionMismatch {
                expected: self.w.n(),
                found: self.x1.len(),
            });
        }
        OpinionState::new(1, self.x1.clone())?;
        if self.t_max == 0 {
            return Err(Error::invalid("t_max must be positive"));
        }
        if let Some(&k) = self.stubborn.iter().find(|&&k| k >= self.w.n()) {
            return Err(Error::invalid(format!("stubborn agent {k} out of range")));
        }
        Ok(())
    }

    /// Hex SHA-256 over a canonical, bit-exact rendering of the config.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"herdlab-config-v1\n");
        h.update(format!("n={}\n", self.w.n()));
        for row in self.w.rows() {
            for v in row {
                h.update(format!("{:016x} ", v.to_bits()));
            }
            h.update(b"\n");
        }
        h.update(format!("alpha={:016x}\n", self.alpha.to_bits()));
        for v in &self.x1 {
            h.update(format!("{:016x} ", v.to_bits()));
        }
        h.update(format!(
            "\nt_max={}\nseed={}\nstubborn={:?}\nactions={}\n",
            self.t_max, self.seed, self.stubborn, self.record_actions
        ));
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One sample path. States are stored flat; with a long horizon only every
/// `stride`-th state is kept before a contiguous final segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    n: usize,
    alpha: f64,
    times: Vec<u64>,
    states: Vec<f64>,
    /// `a_t` for `t = 1..t_max−1`, flat; only with full history.
    actions: Option<Vec<u8>>,
    tail_start: usize,
    stride: u64,
    config_digest: String,
}

/// Borrowed view of one stored state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateView<'a> {
    pub t: u64,
    pub x: &'a [f64],
}

impl<'a> StateView<'a> {
    pub fn to_owned(&self) -> OpinionState {
        OpinionState {
            t: self.t,
            x: self.x.to_vec(),
        }
    }
}

impl Trajectory {
    /// Builds a trajectory from explicit states at consecutive times starting
    /// at `t = 1`. Useful for classifying externally produced sequences.
    pub fn from_states(states: Vec<Vec<f64>>, alpha: f64) -> Result<Self> {
        let n = states.first().map(Vec::len).unwrap_or(0);
        if n == 0 {
            return Err(Error::invalid(
                "trajectory needs at least one non-empty state",
            ));
        }
        let mut flat = Vec::with_capacity(n * states.len());
        for s in &states {
            if s.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.len(),
                });
            }
            flat.extend_from_slice(s);
        }
        Ok(Trajectory {
            n,
            alpha,
            times: (1..=states.len() as u64).collect(),
            states: flat,
            actions: None,
            tail_start: 0,
            stride: 1,
            config_digest: String::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of stored states.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn stride(&self) -> u64 {
        self.stride
    }

    pub fn is_full(&self) -> bool {
        self.stride == 1
    }

    pub fn config_digest(&self) -> &str {
        &self.config_digest
    }

    pub fn horizon(&self) -> u64 {
        *self.times.last().expect("non-empty trajectory")
    }

    pub fn state(&self, k: usize) -> StateView<'_> {
        StateView {
            t: self.times[k],
            x: &self.states[k * self.n..(k + 1) * self.n],
        }
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = StateView<'_>> + '_ {
        (0..self.len()).map(move |k| self.state(k))
    }

    /// The state at time `t`, if stored.
    pub fn at(&self, t: u64) -> Option<StateView<'_>> {
        self.times.binary_search(&t).ok().map(|k| self.state(k))
    }

    pub fn final_state(&self) -> StateView<'_> {
        self.state(self.len() - 1)
    }

    /// Index of the first state in the contiguous final segment.
    pub fn tail_start(&self) -> usize {
        self.tail_start
    }

    pub fn has_actions(&self) -> bool {
        self.actions.is_some()
    }

    /// `a_t`, when actions were recorded and `1 ≤ t < t_max`.
    pub fn action(&self, t: u64) -> Option<&[u8]> {
        let acts = self.actions.as_ref()?;
        let k = usize::try_from(t.checked_sub(1)?).ok()?;
        acts.get(k * self.n..(k + 1) * self.n)
    }

    /// Largest `|x_{t+1} − ((1−α)x_t + αW a_t)|` over recorded steps, ignoring
    /// `pinned` agents.
    pub fn update_rule_residual(&self, w: &WeightMatrix, pinned: &[usize]) -> Option<f64> {
        let acts = self.actions.as_ref()?;
        let mut wa = vec![0.0; self.n];
        let mut af = vec![0.0; self.n];
        let mut worst: f64 = 0.0;
        for k in 0..self.len().saturating_sub(1) {
            let a = &acts[k * self.n..(k + 1) * self.n];
            af.iter_mut().zip(a).for_each(|(f, &b)| *f = f64::from(b));
            w.mul_vec_into(&af, &mut wa);
            let x = self.state(k).x;
            let next = self.state(k + 1).x;
            for i in (0..self.n).filter(|i| !pinned.contains(i)) {
                let expect = (1.0 - self.alpha) * x[i] + self.alpha * wa[i];
                worst = worst.max((next[i] - expect).abs());
            }
        }
        Some(worst)
    }
}

struct Recorder {
    n: usize,
    t_max: u64,
    stride: u64,
    tail_from: u64,
    times: Vec<u64>,
    states: Vec<f64>,
    tail_start: Option<usize>,
}

impl Recorder {
    fn new(n: usize, t_max: u64) -> Self {
        let (stride, tail_from, cap) = if t_max <= FULL_HISTORY_LIMIT {
            (1, 1, t_max)
        } else {
            let stride = t_max.div_ceil(FULL_HISTORY_LIMIT);
            let tail_from = t_max - STRIDED_TAIL + 1;
            (stride, tail_from, tail_from / stride + STRIDED_TAIL + 1)
        };
        let cap = usize::try_from(cap).unwrap_or(usize::MAX / n.max(1) / 2);
        Recorder {
            n,
            t_max,
            stride,
            tail_from,
            times: Vec::with_capacity(cap),
            states: Vec::with_capacity(cap * n),
            tail_start: None,
        }
    }

    #[inline]
    fn record(&mut self, t: u64, x: &[f64]) {
        let in_tail = t >= self.tail_from;
        if in_tail || (t - 1).is_multiple_of(self.stride) {
            if in_tail && self.tail_start.is_none() {
                self.tail_start = Some(self.times.len());
            }
            self.times.push(t);
            self.states.extend_from_slice(x);
        }
    }

    fn finish(self, alpha: f64, actions: Option<Vec<u8>>, digest: String) -> Trajectory {
        debug_assert_eq!(self.times.last().copied(), Some(self.t_max));
        Trajectory {
            n: self.n,
            alpha,
            times: self.times,
            states: self.states,
            actions,
            tail_start: self.tail_start.unwrap_or(0),
            stride: self.stride,
            config_digest: digest,
        }
    }
}

/// Simulates the run with index `run_index` of the ensemble keyed by
/// `config.seed`. [`simulate`] is run 0.
pub fn simulate_run(config: &SimulationConfig, run_index: u64) -> Result<Trajectory> {
    config.validate()?;
    let n = config.n();
    let stubborn: Vec<usize> = config.stubborn.iter().copied().collect();
    let mut rng = action_stream(config.seed, run_index);
    let mut rec = Recorder::new(n, config.t_max);
    let record_actions = config.record_actions && rec.stride == 1;
    let mut actions =
        record_actions.then(|| Vec::with_capacity(n * config.t_max.saturating_sub(1) as usize));

    let mut x = config.x1.clone();
    let mut a = vec![0u8; n];
    let mut pinned = vec![0.0; stubborn.len()];
    for (p, &k) in pinned.iter_mut().zip(&stubborn) {
        *p = x[k];
    }
    rec.record(1, &x);
    for t in 1..config.t_max {
        sample_actions_into(&x, &mut rng, &mut a);
        if let Some(buf) = actions.as_mut() {
            buf.extend_from_slice(&a);
        }
        step_in_place(&mut x, &a, &config.w, config.alpha);
        // pinned agents still drew an action above, so their stream position
        // does not depend on stubbornness
        for (&p, &k) in pinned.iter().zip(&stubborn) {
            x[k] = p;
        }
        rec.record(t + 1, &x);
    }
    Ok(rec.finish(config.alpha, actions, config.digest()))
}

pub fn simulate(config: &SimulationConfig) -> Result<Trajectory> {
    simulate_run(config, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::corner_event;

    fn sym(beta: f64) -> WeightMatrix {
        WeightMatrix::new(vec![vec![1.0 - beta, beta], vec![beta, 1.0 - beta]]).unwrap()
    }

    #[test]
    fn bernoulli_endpoints_are_deterministic() {
        let mut rng = action_stream(7, 0);
        let zero = OpinionState::uniform(5, 0.0).unwrap();
        let one = OpinionState::uniform(2, 1.0).unwrap();
        for _ in 0..1000 {
            assert_eq!(sample_actions(&zero, &mut rng), ActionVector::zeros(5));
            assert_eq!(sample_actions(&one, &mut rng), ActionVector::ones(2));
        }
    }

    #[test]
    fn bernoulli_mean_within_binomial_band() {
        let mut rng = action_stream(2024, 3);
        let x = OpinionState::new(1, vec![0.3]).unwrap();
        let draws = 100_000;
        let hits: u32 = (0..draws)
            .map(|_| u32::from(sample_actions(&x, &mut rng).a[0]))
            .sum();
        let mean = f64::from(hits) / draws as f64;
        // 3σ = 3·sqrt(0.21/1e5) ≈ 0.0043
        assert!((mean - 0.3).abs() < 0.005, "{mean}");
    }

    #[test]
    fn step_fixed_point_and_stubborn() {
        let w = WeightMatrix::four_component_example();
        let zero = OpinionState::uniform(7, 0.0).unwrap();
        let next = step(&zero, &ActionVector::zeros(7), &w, 0.3, &[]).unwrap();
        assert_eq!(next.x, vec![0.0; 7]);
        assert_eq!(next.t, 2);

        let mut x = OpinionState::uniform(7, 0.4).unwrap();
        x.x[2] = 1.0;
        let next = step(&x, &ActionVector::zeros(7), &w, 0.3, &[2]).unwrap();
        assert_eq!(next.x[2], 1.0);
        assert!((next.x[0] - 0.28).abs() < 1e-15);
    }

    #[test]
    fn step_dimension_mismatch() {
        let w = sym(0.5);
        let x = OpinionState::uniform(3, 0.5).unwrap();
        let err = step(&x, &ActionVector::zeros(3), &w, 0.5, &[]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn corner_contracts_under_zero_actions() {
        let w = WeightMatrix::four_component_example();
        let alpha = 0.2;
        let delta = 0.05;
        let x = OpinionState::new(1, vec![0.049, 0.0, 0.01, 0.03, 0.0499, 0.02, 0.001]).unwrap();
        assert!(corner_event(&x.x, delta).unwrap().unwrap().is_zero());
        let next = step(&x, &ActionVector::zeros(7), &w, alpha, &[]).unwrap();
        let shrunk = (1.0 - alpha) * delta;
        assert!(next.x.iter().all(|&v| v < shrunk));
        for (a, b) in next.x.iter().zip(&x.x) {
            assert_eq!(*a, b - alpha * b);
        }
    }

    #[test]
    fn corners_are_absorbing() {
        // consensus corners always; mixed corners only without cross edges
        let cases = [
            (WeightMatrix::four_component_example(), 0u32),
            (WeightMatrix::four_component_example(), 0b1111111),
            (WeightMatrix::identity(7), 0b1010011),
            (WeightMatrix::identity(7), 0b0000001),
        ];
        for (w, mask) in cases {
            let x1: Vec<f64> = (0..7).map(|i| f64::from((mask >> i) & 1)).collect();
            let cfg = SimulationConfig::new(w, 0.37, x1.clone(), 101, 11).unwrap();
            let traj = simulate(&cfg).unwrap();
            assert!(traj.states().all(|s| s.x == x1.as_slice()));
        }
    }

    #[test]
    fn simulate_is_reproducible_and_follows_update_rule() {
        let w = WeightMatrix::four_component_example();
        let cfg = SimulationConfig::new(w.clone(), 0.3, vec![0.5; 7], 400, 99)
            .unwrap()
            .recording_actions(true);
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 400);
        assert_eq!(a.state(0).x, vec![0.5; 7].as_slice());
        assert!(a.update_rule_residual(&w, &[]).unwrap() < 1e-15);
        assert!(a
            .states()
            .all(|s| s.x.iter().all(|v| (0.0..=1.0).contains(v))));
        assert_eq!(a.config_digest(), cfg.digest());

        let other = SimulationConfig {
            seed: 100,
            ..cfg.clone()
        };
        assert_ne!(simulate(&other).unwrap(), a);
        assert_ne!(other.digest(), cfg.digest());
    }

    #[test]
    fn structural_stubbornness_matches_enforced() {
        // agent 0 listens only to itself and starts at 1
        let w = WeightMatrix::new(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap();
        let x1 = vec![1.0, 0.2, 0.7];
        let structural = SimulationConfig::new(w.clone(), 0.25, x1.clone(), 300, 5).unwrap();
        let enforced = structural.clone().with_stubborn([0]).unwrap();
        let a = simulate(&structural).unwrap();
        let b = simulate(&enforced).unwrap();
        assert!(a.states().all(|s| s.x[0] == 1.0));
        assert_eq!(
            a.states().map(|s| s.x.to_vec()).collect::<Vec<_>>(),
            b.states().map(|s| s.x.to_vec()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn enforced_stubbornness_pins_interior_opinion() {
        let w = sym(0.5);
        let cfg = SimulationConfig::new(w, 0.5, vec![0.4, 0.9], 200, 1)
            .unwrap()
            .with_stubborn([0])
            .unwrap();
        let traj = simulate(&cfg).unwrap();
        assert!(traj.states().all(|s| s.x[0] == 0.4));
    }

    #[test]
    fn long_horizons_are_strided() {
        let w = sym(0.5);
        let cfg = SimulationConfig::new(w, 0.5, vec![0.5, 0.5], 250_000, 3)
            .unwrap()
            .recording_actions(true);
        let traj = simulate(&cfg).unwrap();
        assert_eq!(traj.stride(), 3);
        assert!(!traj.has_actions());
        assert_eq!(traj.horizon(), 250_000);
        let tail = traj.len() - traj.tail_start();
        assert_eq!(tail as u64, STRIDED_TAIL);
        assert!(traj.at(1).is_some() && traj.at(4).is_some() && traj.at(2).is_none());
    }

    #[test]
    fn config_validation() {
        let w = sym(0.5);
        assert!(SimulationConfig::new(w.clone(), 1.0, vec![0.5; 2], 10, 0).is_err());
        assert!(SimulationConfig::new(w.clone(), 0.5, vec![0.5; 3], 10, 0).is_err());
        assert!(SimulationConfig::new(w.clone(), 0.5, vec![1.5, 0.0], 10, 0).is_err());
        assert!(SimulationConfig::new(w.clone(), 0.5, vec![0.5; 2], 0, 0).is_err());
        let ok = SimulationConfig::new(w, 0.5, vec![0.5; 2], 10, 0).unwrap();
        assert!(ok.with_stubborn([2]).is_err());
    }
}
