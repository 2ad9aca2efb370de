//! Simulation and checking of the random actions opinion-dynamics model.
//!
//! Agents hold opinions `x_t ∈ [0, 1]^N`, act by independent coin flips
//! `a_{t,i} ~ Bernoulli(x_{t,i})`, and update by
//! `x_{t+1} = (1 − α) x_t + α W a_t` for a row-stochastic trust matrix `W`.
//!
//! * [`graph`]: weight matrices and the poset of strongly connected components
//! * [`spectral`]: the Perron left vector of an irreducible network
//! * [`dynamics`]: seeded simulation, ensembles, the time-varying example
//! * [`analysis`]: corner events, verdicts, martingale and moments, `g_{α,N}`
//! * [`oracle`]: slow reference implementations for cross-checks
//! * [`verify`]: the verification suite
//! * [`cli`]: the `herdlab` command line
//!
//! ```
//! use herdlab::analysis::{detect_consensus, AnalysisConfig};
//! use herdlab::dynamics::{simulate, SimulationConfig};
//! use herdlab::graph::{strongly_connected_components, WeightMatrix};
//!
//! let w = WeightMatrix::four_component_example();
//! let poset = strongly_connected_components(&w);
//! let cfg = SimulationConfig::new(w, 0.5, vec![0.5; 7], 200, 1)?;
//! let verdict = detect_consensus(&simulate(&cfg)?, &poset, &AnalysisConfig::default())?;
//! assert!(verdict.kind.is_decided());
//! # Ok::<(), herdlab::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/martingale.md")]
    mod martingale {}
    #[doc = include_str!("../../../book/src/verdicts.md")]
    mod verdicts {}
    #[doc = include_str!("../../../book/src/gfunction.md")]
    mod gfunction {}
    #[doc = include_str!("../../../book/src/time_variant.md")]
    mod time_variant {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
