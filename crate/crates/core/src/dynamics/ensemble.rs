//! Monte Carlo ensembles of independent runs.
//!
//! Run `r` uses stream `r` of the generator keyed by the config seed (see
//! [`action_stream`](super::action_stream)), so results do not depend on how
//! runs are scheduled across threads. Runs are executed on the current rayon
//! pool and collected in run order.

use rayon::prelude::*;

use super::{simulate_run, SimulationConfig};
use crate::analysis::{detect_consensus, AnalysisConfig, ConvergenceVerdict};
use crate::error::{Error, Result};
use crate::graph::strongly_connected_components;

/// State (and, if recorded, action) of one run at one requested time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: u64,
    pub x: Vec<f64>,
    pub a: Option<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run_index: u64,
    pub verdict: ConvergenceVerdict,
    pub final_state: Vec<f64>,
    /// One entry per requested sample time, in request order.
    pub samples: Vec<Sample>,
}

impl RunSummary {
    pub fn sample(&self, t: u64) -> Option<&Sample> {
        self.samples.iter().find(|s| s.t == t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub master_seed: u64,
    pub run_count: usize,
    pub alpha: f64,
    pub n: usize,
    pub t_max: u64,
    pub analysis: AnalysisConfig,
    pub sample_times: Vec<u64>,
    pub config_digest: String,
    pub runs: Vec<RunSummary>,
}

/// Simulates `runs` independent trajectories of `config` and classifies each
/// one. States are kept only at `sample_times`.
pub fn monte_carlo(
    config: &SimulationConfig,
    runs: usize,
    analysis: &AnalysisConfig,
    sample_times: &[u64],
) -> Result<Ensemble> {
    config.validate()?;
    if runs == 0 {
        return Err(Error::invalid("an ensemble needs at least one run"));
    }
    if let Some(&t) = sample_times.iter().find(|&&t| t == 0 || t > config.t_max) {
        return Err(Error::invalid(format!(
            "sample time {t} outside 1..={}",
            config.t_max
        )));
    }
    let poset = strongly_connected_components(&config.w);

    let summaries = (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let traj = simulate_run(config, r)?;
            let verdict = detect_consensus(&traj, &poset, analysis)?;
            let samples = sample_times
                .iter()
                .map(|&t| {
                    let s = traj.at(t).ok_or(Error::MissingSample(t))?;
                    Ok(Sample {
                        t,
                        x: s.x.to_vec(),
                        a: traj.action(t).map(<[u8]>::to_vec),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RunSummary {
                run_index: r,
                verdict,
                final_state: traj.final_state().x.to_vec(),
                samples,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Ensemble {
        master_seed: config.seed,
        run_count: runs,
        alpha: config.alpha,
        n: config.n(),
        t_max: config.t_max,
        analysis: *analysis,
        sample_times: sample_times.to_vec(),
        config_digest: config.digest(),
        runs: summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ConsensusKind;
    use crate::dynamics::simulate;
    use crate::graph::WeightMatrix;

    #[test]
    fn single_run_matches_simulate() {
        let w = WeightMatrix::four_component_example();
        let cfg = SimulationConfig::new(w, 0.3, vec![0.5; 7], 300, 17).unwrap();
        let acfg = AnalysisConfig::default();
        let ens = monte_carlo(&cfg, 1, &acfg, &[1, 150, 300]).unwrap();
        let traj = simulate(&cfg).unwrap();
        assert_eq!(ens.runs.len(), 1);
        assert_eq!(ens.runs[0].final_state, traj.final_state().x);
        assert_eq!(ens.runs[0].samples[1].x, traj.at(150).unwrap().x);
        let poset = strongly_connected_components(&cfg.w);
        assert_eq!(
            ens.runs[0].verdict,
            detect_consensus(&traj, &poset, &acfg).unwrap()
        );
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let w = WeightMatrix::four_component_example();
        let cfg = SimulationConfig::new(w, 0.2, vec![0.5; 7], 500, 3).unwrap();
        let acfg = AnalysisConfig::default();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| monte_carlo(&cfg, 64, &acfg, &[10]).unwrap())
        };
        assert_eq!(run(1), run(5));
    }

    #[test]
    fn stubborn_zero_forces_consensus_zero() {
        let w = WeightMatrix::new(vec![
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.5],
        ])
        .unwrap();
        let cfg = SimulationConfig::new(w, 0.3, vec![0.0, 0.9, 0.9], 2000, 8)
            .unwrap()
            .with_stubborn([0])
            .unwrap();
        let ens = monte_carlo(&cfg, 200, &AnalysisConfig::default(), &[]).unwrap();
        assert!(ens
            .runs
            .iter()
            .all(|r| r.verdict.kind == ConsensusKind::ConsensusZero));
    }

    #[test]
    fn rejects_bad_sample_times() {
        let cfg =
            SimulationConfig::new(WeightMatrix::identity(2), 0.5, vec![0.5; 2], 10, 0).unwrap();
        let acfg = AnalysisConfig::new(0.05, 5).unwrap();
        assert!(monte_carlo(&cfg, 1, &acfg, &[11]).is_err());
        assert!(monte_carlo(&cfg, 0, &acfg, &[]).is_err());
    }
}
