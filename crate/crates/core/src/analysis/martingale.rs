//! The martingale `q_t = πᵀx_t`.
//!
//! Because `πᵀW = πᵀ`, the increment only depends on the action surprise:
//! `Δq_t = q_{t+1} − q_t = α πᵀ(a_t − x_t)`, whose conditional mean given
//! `x_t` is zero.

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::PerronVector;

#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleSeries {
    pub times: Vec<u64>,
    pub q: Vec<f64>,
    /// `q_{t+1} − q_t` for consecutive stored states.
    pub dq: Vec<f64>,
    /// `max_t |Δq_t − απᵀ(a_t − x_t)|`, when actions were recorded.
    pub identity_error: Option<f64>,
}

pub fn martingale_series(traj: &Trajectory, pi: &PerronVector) -> Result<MartingaleSeries> {
    if pi.len() != traj.n() {
        return Err(Error::DimensionMismatch {
            expected: traj.n(),
            found: pi.len(),
        });
    }
    let times: Vec<u64> = traj.states().map(|s| s.t).collect();
    let q: Vec<f64> = traj.states().map(|s| pi.dot(s.x)).collect();
    let dq: Vec<f64> = q.windows(2).map(|p| p[1] - p[0]).collect();

    let identity_error = traj.has_actions().then(|| {
        let alpha = traj.alpha();
        (0..dq.len())
            .map(|k| {
                let s = traj.state(k);
                let a = traj.action(s.t).expect("recorded action");
                let surprise: f64 = pi
                    .values()
                    .iter()
                    .zip(a.iter().zip(s.x))
                    .map(|(p, (&ai, xi))| p * (f64::from(ai) - xi))
                    .sum();
                (dq[k] - alpha * surprise).abs()
            })
            .fold(0.0, f64::max)
    });

    Ok(MartingaleSeries {
        times,
        q,
        dq,
        identity_error,
    })
}
