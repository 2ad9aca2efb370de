//! Deterministic two-agent averaging with a time-varying weight,
//!
//! > x_{t+1} = W_t x_t,   W_t = [[1 − β_t, β_t], [β_t, 1 − β_t]].
//!
//! Every `W_t` is diagonal in the basis `U = [[1, −1], [1, 1]]/√2` with
//! eigenvalues `1` and `1 − 2β_t`. A constant weight drives both agents to the
//! average of `x_0`. A weight that halves every step leaves a permanent gap:
//! with `β_t = β / 2^t` for `t = 0, 1, 2, …` the second eigenvalue product is
//! `Π_s (1 − (1/2)^s · 2β) = g_{1/2,1}(2β) > 0` for `β < 1/2`.

use crate::analysis::{g_function, DEFAULT_G_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Constant,
    /// `β_t = β / 2^t`, the first step using `β_0 = β`.
    Halving,
}

impl Schedule {
    pub fn beta_at(self, beta: f64, t: u32) -> f64 {
        match self {
            Schedule::Constant => beta,
            Schedule::Halving => beta * 0.5f64.powi(t as i32),
        }
    }
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Schedule::Constant => "constant",
            Schedule::Halving => "halving",
        })
    }
}

impl std::str::FromStr for Schedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Schedule::Constant),
            "halving" => Ok(Schedule::Halving),
            other => Err(Error::invalid(format!(
                "unknown schedule `{other}` (expected constant or halving)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeVariantOutcome {
    /// `x_0, x_1, …, x_T`.
    pub trajectory: Vec<[f64; 2]>,
    /// `lim_{T→∞} W_{T−1} ⋯ W_0`.
    pub limit_matrix: [[f64; 2]; 2],
}

impl TimeVariantOutcome {
    pub fn terminal_gap(&self) -> f64 {
        let [a, b] = *self.trajectory.last().expect("non-empty");
        (a - b).abs()
    }
}

/// `U diag(1, λ) Uᵀ = ½ [[1 + λ, 1 − λ], [1 − λ, 1 + λ]]`.
fn from_second_eigenvalue(lambda: f64) -> [[f64; 2]; 2] {
    let d = 0.5 * (1.0 + lambda);
    let o = 0.5 * (1.0 - lambda);
    [[d, o], [o, d]]
}

pub fn time_variant_two_agent(
    beta: f64,
    schedule: Schedule,
    x0: [f64; 2],
    steps: u32,
) -> Result<TimeVariantOutcome> {
    if !(0.0..=0.5).contains(&beta) {
        return Err(Error::invalid(format!("beta = {beta} outside [0, 1/2]")));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial state must be finite"));
    }

    let mut trajectory = Vec::with_capacity(steps as usize + 1);
    let mut x = x0;
    trajectory.push(x);
    for t in 0..steps {
        let b = schedule.beta_at(beta, t);
        x = [(1.0 - b) * x[0] + b * x[1], b * x[0] + (1.0 - b) * x[1]];
        trajectory.push(x);
    }

    let lambda = match schedule {
        // |1 − 2β| < 1 unless β = 0
        Schedule::Constant if beta > 0.0 => 0.0,
        Schedule::Constant => 1.0,
        Schedule::Halving => g_function(0.5, 1, 2.0 * beta, DEFAULT_G_TOL)?,
    };

    Ok(TimeVariantOutcome {
        trajectory,
        limit_matrix: from_second_eigenvalue(lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_half_averages_immediately() {
        let out = time_variant_two_agent(0.5, Schedule::Constant, [1.0, 0.0], 10).unwrap();
        assert_eq!(out.trajectory[1], [0.5, 0.5]);
        assert_eq!(out.limit_matrix, [[0.5, 0.5], [0.5, 0.5]]);
    }

    #[test]
    fn zero_beta_is_identity() {
        for schedule in [Schedule::Constant, Schedule::Halving] {
            let out = time_variant_two_agent(0.0, schedule, [0.3, 0.8], 25).unwrap();
            assert_eq!(*out.trajectory.last().unwrap(), [0.3, 0.8]);
            assert_eq!(out.limit_matrix, [[1.0, 0.0], [0.0, 1.0]]);
        }
    }

    #[test]
    fn halving_leaves_a_gap() {
        let out = time_variant_two_agent(0.25, Schedule::Halving, [1.0, 0.0], 60).unwrap();
        let gap = out.terminal_gap();
        let g = g_function(0.5, 1, 0.5, 1e-15).unwrap();
        assert!(gap > 0.2);
        assert!((gap - g).abs() < 1e-12, "{gap} vs {g}");
        let [[a, b], _] = out.limit_matrix;
        assert!((a - b - g).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_beta() {
        assert!(time_variant_two_agent(0.6, Schedule::Constant, [1.0, 0.0], 1).is_err());
        assert!("sometimes".parse::<Schedule>().is_err());
        assert_eq!("halving".parse::<Schedule>().unwrap(), Schedule::Halving);
    }
}
