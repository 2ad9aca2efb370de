//! Moments of the action residuals `y_t = a_t − x_t` across an ensemble, and
//! the distance of `x_t` to each run's consensus limit.

use crate::dynamics::Ensemble;
use crate::error::{Error, Result};

use super::ConsensusKind;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualMoments {
    pub times: Vec<u64>,
    /// `second_moment[k][i]` estimates `E{y_{t_k,i}²}`.
    pub second_moment: Vec<Vec<f64>>,
    /// `correlation[k]` holds `(i, j, ρ)` for `i < j`; `ρ` is `None` when
    /// either residual has zero sample variance.
    pub correlation: Vec<Vec<(usize, usize, Option<f64>)>>,
    pub runs: usize,
}

pub fn residual_moments(ensemble: &Ensemble, times: &[u64]) -> Result<ResidualMoments> {
    let n = ensemble.n;
    let runs = ensemble.runs.len();
    let mut second_moment = Vec::with_capacity(times.len());
    let mut correlation = Vec::with_capacity(times.len());

    for &t in times {
        let mut ys: Vec<Vec<f64>> = Vec::with_capacity(runs);
        for run in &ensemble.runs {
            let s = run.sample(t).ok_or(Error::MissingActions(t))?;
            let a = s.a.as_ref().ok_or(Error::MissingActions(t))?;
            ys.push(
                a.iter()
                    .zip(&s.x)
                    .map(|(&ai, xi)| f64::from(ai) - xi)
                    .collect(),
            );
        }
        let m = runs as f64;
        let sq: Vec<f64> = (0..n)
            .map(|i| ys.iter().map(|y| y[i] * y[i]).sum::<f64>() / m)
            .collect();
        let mean: Vec<f64> = (0..n)
            .map(|i| ys.iter().map(|y| y[i]).sum::<f64>() / m)
            .collect();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (mut cov, mut vi, mut vj) = (0.0, 0.0, 0.0);
                for y in &ys {
                    let di = y[i] - mean[i];
                    let dj = y[j] - mean[j];
                    cov += di * dj;
                    vi += di * di;
                    vj += dj * dj;
                }
                let rho = (vi > 0.0 && vj > 0.0).then(|| cov / (vi * vj).sqrt());
                pairs.push((i, j, rho));
            }
        }
        second_moment.push(sq);
        correlation.push(pairs);
    }

    Ok(ResidualMoments {
        times: times.to_vec(),
        second_moment,
        correlation,
        runs,
    })
}

/// Mean over consensus runs of `(1/n) Σ_i |x_{t,i} − x_∞|^r`, where `x_∞` is
/// the run's consensus corner. Returns the estimate and the number of runs
/// used; runs without a consensus verdict are skipped.
pub fn moment_distance(ensemble: &Ensemble, t: u64, r: f64) -> Result<(f64, usize)> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::invalid("moment order must be positive"));
    }
    let mut total = 0.0;
    let mut used = 0;
    for run in &ensemble.runs {
        let limit = match run.verdict.kind {
            ConsensusKind::ConsensusZero => 0.0,
            ConsensusKind::ConsensusOne => 1.0,
            _ => continue,
        };
        let s = run.sample(t).ok_or(Error::MissingSample(t))?;
        total += s.x.iter().map(|v| (v - limit).abs().powf(r)).sum::<f64>() / s.x.len() as f64;
        used += 1;
    }
    if used == 0 {
        return Err(Error::UndecidedRuns(ensemble.runs.len()));
    }
    Ok((total / used as f64, used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::AnalysisConfig;
    use crate::dynamics::{monte_carlo, SimulationConfig};
    use crate::graph::WeightMatrix;

    #[test]
    fn frozen_runs_have_zero_moments() {
        let w = WeightMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let cfg = SimulationConfig::new(w, 0.5, vec![0.0, 0.0], 60, 4)
            .unwrap()
            .recording_actions(true);
        let ens = monte_carlo(&cfg, 20, &AnalysisConfig::default(), &[1, 30]).unwrap();
        let m = residual_moments(&ens, &[1, 30]).unwrap();
        assert!(m.second_moment.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(m.correlation[0], vec![(0, 1, None)]);
        assert_eq!(moment_distance(&ens, 30, 2.0).unwrap(), (0.0, 20));
    }

    #[test]
    fn missing_actions_reported() {
        let w = WeightMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let cfg = SimulationConfig::new(w, 0.5, vec![0.5, 0.5], 60, 4).unwrap();
        let ens = monte_carlo(&cfg, 3, &AnalysisConfig::default(), &[5]).unwrap();
        assert_eq!(residual_moments(&ens, &[5]), Err(Error::MissingActions(5)));
        assert_eq!(residual_moments(&ens, &[6]), Err(Error::MissingActions(6)));
    }

    #[test]
    fn interior_start_has_bernoulli_variance() {
        let w = WeightMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let cfg = SimulationConfig::new(w, 0.5, vec![0.5, 0.2], 60, 9)
            .unwrap()
            .recording_actions(true);
        let ens = monte_carlo(&cfg, 4000, &AnalysisConfig::default(), &[1]).unwrap();
        let m = residual_moments(&ens, &[1]).unwrap();
        // E{y²} = x(1−x); 4σ of the sample mean is about 0.004
        assert!((m.second_moment[0][0] - 0.25).abs() < 0.005);
        assert!((m.second_moment[0][1] - 0.16).abs() < 0.01);
    }
}
