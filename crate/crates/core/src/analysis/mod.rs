//! Measurements on trajectories and ensembles.
//!
//! * corner events and their empirical probabilities,
//! * per-run convergence verdicts over the component poset,
//! * the martingale `q_t = πᵀx_t` and the residuals `y_t = a_t − x_t`,
//! * the infinite product `g_{α,N}(γ)` that bounds how likely a run stays in a
//!   contracting corner forever.

mod corner;
mod gfunc;
mod martingale;
mod moments;
mod report;
mod verdict;

pub use self::corner::{
    corner_event, empirical_corner_probability, mixed_corner_delta_bound, CornerCounts, CornerLabel,
};
pub use self::gfunc::{
    corner_stay_bound, g_function, g_grid, ln_g_function, truncation_index, DEFAULT_G_TOL,
};
pub use self::martingale::{martingale_series, MartingaleSeries};
pub use self::moments::{moment_distance, residual_moments, ResidualMoments};
pub use self::report::{consensus_fraction_report, wilson_interval, ConsensusReport, Z_99};
pub use self::verdict::{detect_consensus, ComponentFate, ConsensusKind, ConvergenceVerdict};

use crate::error::{Error, Result};

pub const DEFAULT_DELTA: f64 = 0.05;
pub const DEFAULT_WINDOW: usize = 50;

/// Corner radius and persistence window used to classify runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    delta: f64,
    window: usize,
}

impl AnalysisConfig {
    pub fn new(delta: f64, window: usize) -> Result<Self> {
        check_delta(delta)?;
        if window == 0 {
            return Err(Error::invalid("window must be positive"));
        }
        Ok(AnalysisConfig { delta, window })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn window(&self) -> usize {
        self.window
    }
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            delta: DEFAULT_DELTA,
            window: DEFAULT_WINDOW,
        }
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}
