//! Convergence verdicts over the component poset.
//!
//! A component has settled to corner `c` when all of its agents stayed within
//! `δ` of `c` for each of the final `window` states. The run reaches consensus
//! when every component settled to the same corner.
//!
//! An unsettled component is `Oscillating` when either
//! * some agent swept at least `1 − 2δ` within the window (it visited both
//!   corners, like the alternating sequence 1, 0, 1, 0, …), or
//! * it is not maximal, every maximal component has settled, and at no step
//!   of the window did the whole component sit in the 0 corner or the 1
//!   corner. This is a downstream component pulled in two directions.
//!
//! Anything else is `Undecided`: the horizon was too short to tell.

use std::fmt;

use crate::dynamics::{StateView, Trajectory};
use crate::error::{Error, Result};
use crate::graph::SccPoset;

use super::AnalysisConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConsensusKind {
    ConsensusZero,
    ConsensusOne,
    NonConsensus,
    Undecided,
}

impl ConsensusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConsensusKind::ConsensusZero => "consensus_0",
            ConsensusKind::ConsensusOne => "consensus_1",
            ConsensusKind::NonConsensus => "non_consensus",
            ConsensusKind::Undecided => "undecided",
        }
    }

    pub fn is_consensus(self) -> bool {
        matches!(
            self,
            ConsensusKind::ConsensusZero | ConsensusKind::ConsensusOne
        )
    }

    pub fn is_decided(self) -> bool {
        self != ConsensusKind::Undecided
    }
}

impl fmt::Display for ConsensusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentFate {
    ToZero,
    ToOne,
    Oscillating,
    Undecided,
}

impl ComponentFate {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentFate::ToZero => "to_0",
            ComponentFate::ToOne => "to_1",
            ComponentFate::Oscillating => "oscillating",
            ComponentFate::Undecided => "undecided",
        }
    }

    fn corner(self) -> Option<u8> {
        match self {
            ComponentFate::ToZero => Some(0),
            ComponentFate::ToOne => Some(1),
            _ => None,
        }
    }
}

impl fmt::Display for ComponentFate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceVerdict {
    pub kind: ConsensusKind,
    /// Indexed like the poset's components.
    pub per_component: Vec<ComponentFate>,
    /// For consensus: first time from which every stored state lies in the
    /// consensus corner.
    pub first_hit: Option<u64>,
}

fn near(v: f64, corner: u8, delta: f64) -> bool {
    if corner == 0 {
        v < delta
    } else {
        v > 1.0 - delta
    }
}

fn all_near(x: &[f64], agents: &[usize], corner: u8, delta: f64) -> bool {
    agents.iter().all(|&i| near(x[i], corner, delta))
}

pub fn detect_consensus(
    traj: &Trajectory,
    scc: &SccPoset,
    cfg: &AnalysisConfig,
) -> Result<ConvergenceVerdict> {
    let n = traj.n();
    let covered: usize = scc.components().iter().map(Vec::len).sum();
    if covered != n {
        return Err(Error::DimensionMismatch {
            expected: covered,
            found: n,
        });
    }
    let delta = cfg.delta();
    let window = cfg.window();
    let available = traj.len() - traj.tail_start();
    if available < window {
        return Err(Error::TrajectoryTooShort { available, window });
    }
    let first = traj.len() - window;
    let tail: Vec<StateView<'_>> = (first..traj.len()).map(|k| traj.state(k)).collect();

    let settled: Vec<Option<u8>> = scc
        .components()
        .iter()
        .map(|agents| {
            [0u8, 1]
                .into_iter()
                .find(|&c| tail.iter().all(|s| all_near(s.x, agents, c, delta)))
        })
        .collect();
    let maximal_settled = scc.maximal().iter().all(|&r| settled[r].is_some());

    let per_component: Vec<ComponentFate> = scc
        .components()
        .iter()
        .enumerate()
        .map(|(r, agents)| match settled[r] {
            Some(0) => ComponentFate::ToZero,
            Some(_) => ComponentFate::ToOne,
            None => {
                let swept = agents.iter().any(|&i| {
                    let (lo, hi) = tail
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                            (lo.min(s.x[i]), hi.max(s.x[i]))
                        });
                    hi - lo >= 1.0 - 2.0 * delta
                });
                let torn = !scc.is_maximal(r)
                    && maximal_settled
                    && tail.iter().all(|s| {
                        !all_near(s.x, agents, 0, delta) && !all_near(s.x, agents, 1, delta)
                    });
                if swept || torn {
                    ComponentFate::Oscillating
                } else {
                    ComponentFate::Undecided
                }
            }
        })
        .collect();

    let corners: Vec<Option<u8>> = per_component.iter().map(|f| f.corner()).collect();
    let unanimous = match corners.first().copied().flatten() {
        Some(c) if corners.iter().all(|&k| k == Some(c)) => Some(c),
        _ => None,
    };
    let maximal_split = {
        let limits: Vec<u8> = scc.maximal().iter().filter_map(|&r| corners[r]).collect();
        limits.contains(&0) && limits.contains(&1)
    };

    let (kind, first_hit) = if let Some(c) = unanimous {
        let kind = if c == 0 {
            ConsensusKind::ConsensusZero
        } else {
            ConsensusKind::ConsensusOne
        };
        let all: Vec<usize> = (0..n).collect();
        let mut k = traj.len() - 1;
        while k > traj.tail_start() && all_near(traj.state(k - 1).x, &all, c, delta) {
            k -= 1;
        }
        (kind, Some(traj.state(k).t))
    } else if maximal_split || per_component.contains(&ComponentFate::Oscillating) {
        (ConsensusKind::NonConsensus, None)
    } else {
        (ConsensusKind::Undecided, None)
    };

    Ok(ConvergenceVerdict {
        kind,
        per_component,
        first_hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{strongly_connected_components, WeightMatrix};

    fn scalar_poset() -> SccPoset {
        strongly_connected_components(&WeightMatrix::identity(1))
    }

    #[test]
    fn constant_one_is_consensus_from_start() {
        let traj = Trajectory::from_states(vec![vec![1.0; 3]; 80], 0.1).unwrap();
        let poset = strongly_connected_components(&WeightMatrix::identity(3));
        let v = detect_consensus(&traj, &poset, &AnalysisConfig::default()).unwrap();
        assert_eq!(v.kind, ConsensusKind::ConsensusOne);
        assert_eq!(v.first_hit, Some(1));
    }

    #[test]
    fn first_hit_marks_entry_into_corner() {
        let mut states = vec![vec![0.5]; 10];
        states.extend(vec![vec![0.01]; 60]);
        let traj = Trajectory::from_states(states, 0.1).unwrap();
        let v = detect_consensus(&traj, &scalar_poset(), &AnalysisConfig::default()).unwrap();
        assert_eq!(v.kind, ConsensusKind::ConsensusZero);
        assert_eq!(v.first_hit, Some(11));
    }

    #[test]
    fn alternating_sequence_oscillates() {
        let states = (1..=200)
            .map(|t| vec![if t % 2 == 1 { 1.0 } else { 0.0 }])
            .collect();
        let traj = Trajectory::from_states(states, 0.1).unwrap();
        let v = detect_consensus(&traj, &scalar_poset(), &AnalysisConfig::default()).unwrap();
        assert_eq!(v.kind, ConsensusKind::NonConsensus);
        assert_eq!(v.per_component, vec![ComponentFate::Oscillating]);
        assert_eq!(v.first_hit, None);
    }

    #[test]
    fn slow_drift_is_undecided() {
        let states = (0..100).map(|k| vec![0.3 + 0.001 * f64::from(k)]).collect();
        let traj = Trajectory::from_states(states, 0.1).unwrap();
        let v = detect_consensus(&traj, &scalar_poset(), &AnalysisConfig::default()).unwrap();
        assert_eq!(v.kind, ConsensusKind::Undecided);
    }

    #[test]
    fn split_maximal_components_tear_the_minimal_one() {
        let w = WeightMatrix::four_component_example();
        let poset = strongly_connected_components(&w);
        // C1, C2 at 1; C3 at 0; C4 stuck in between
        let state = vec![1.0, 0.99, 0.995, 0.0, 0.01, 0.7, 0.3];
        let traj = Trajectory::from_states(vec![state; 60], 0.1).unwrap();
        let v = detect_consensus(&traj, &poset, &AnalysisConfig::default()).unwrap();
        assert_eq!(v.kind, ConsensusKind::NonConsensus);
        assert_eq!(
            v.per_component,
            vec![
                ComponentFate::ToOne,
                ComponentFate::ToOne,
                ComponentFate::ToZero,
                ComponentFate::Oscillating
            ]
        );
    }

    #[test]
    fn unsettled_maximal_component_keeps_downstream_undecided() {
        let w = WeightMatrix::four_component_example();
        let poset = strongly_connected_components(&w);
        let state = vec![0.5, 0.5, 0.5, 0.0, 0.0, 0.3, 0.2];
        let traj = Trajectory::from_states(vec![state; 60], 0.1).unwrap();
        let v = detect_consensus(&traj, &poset, &AnalysisConfig::default()).unwrap();
        assert_eq!(v.kind, ConsensusKind::Undecided);
        assert_eq!(v.per_component[3], ComponentFate::Undecided);
    }

    #[test]
    fn too_short_and_mismatched() {
        let traj = Trajectory::from_states(vec![vec![1.0]; 10], 0.1).unwrap();
        let err = detect_consensus(&traj, &scalar_poset(), &AnalysisConfig::default()).unwrap_err();
        assert_eq!(
            err,
            Error::TrajectoryTooShort {
                available: 10,
                window: 50
            }
        );
        let poset = strongly_connected_components(&WeightMatrix::identity(2));
        let cfg = AnalysisConfig::new(0.05, 5).unwrap();
        assert!(matches!(
            detect_consensus(&traj, &poset, &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
