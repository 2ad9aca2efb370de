//! Consensus-fraction prediction.
//!
//! For an irreducible network every run is absorbed in `0` or `1`, and the
//! martingale `q_t = πᵀx_t` is bounded, so `P(consensus at 1) = E{q_∞} = q_1
//! = πᵀx_1`. The report compares the empirical fraction against `q_1` using a
//! 99% Wilson score interval.

use crate::dynamics::Ensemble;
use crate::error::{Error, Result};
use crate::spectral::PerronVector;

use super::ConsensusKind;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusReport {
    pub runs: usize,
    pub consensus_one: usize,
    pub consensus_zero: usize,
    pub fraction: f64,
    pub predicted: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ConsensusReport {
    pub fn agrees(&self) -> bool {
        self.ci_low <= self.predicted && self.predicted <= self.ci_high
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub fn consensus_fraction_report(
    ensemble: &Ensemble,
    pi: &PerronVector,
    x1: &[f64],
) -> Result<ConsensusReport> {
    if pi.len() != x1.len() {
        return Err(Error::DimensionMismatch {
            expected: pi.len(),
            found: x1.len(),
        });
    }
    let count = |k| ensemble.runs.iter().filter(|r| r.verdict.kind == k).count();
    let consensus_one = count(ConsensusKind::ConsensusOne);
    let consensus_zero = count(ConsensusKind::ConsensusZero);
    let runs = ensemble.runs.len();
    let undecided = runs - consensus_one - consensus_zero;
    if undecided > 0 {
        return Err(Error::UndecidedRuns(undecided));
    }
    let (ci_low, ci_high) = wilson_interval(consensus_one, runs, Z_99);
    Ok(ConsensusReport {
        runs,
        consensus_one,
        consensus_zero,
        fraction: consensus_one as f64 / runs as f64,
        predicted: pi.dot(x1),
        ci_low,
        ci_high,
    })
}
