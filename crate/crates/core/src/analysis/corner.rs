use crate::dynamics::Ensemble;
use crate::error::{Error, Result};

use super::check_delta;

/// A corner `m ∈ {0,1}^n` of the unit cube.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CornerLabel(pub Vec<u8>);

impl CornerLabel {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&b| b == 1)
    }

    pub fn is_mixed(&self) -> bool {
        !self.is_zero() && !self.is_one()
    }
}

/// The corner `x` is `δ`-close to, if any: `x_i < δ` gives `m_i = 0` and
/// `x_i > 1 − δ` gives `m_i = 1`. With `δ < 1/2` the label is unique.
pub fn corner_event(x: &[f64], delta: f64) -> Result<Option<CornerLabel>> {
    check_delta(delta)?;
    Ok(corner_of(x, delta))
}

pub(crate) fn corner_of(x: &[f64], delta: f64) -> Option<CornerLabel> {
    x.iter()
        .map(|&v| {
            if v < delta {
                Some(0)
            } else if v > 1.0 - delta {
                Some(1)
            } else {
                None
            }
        })
        .collect::<Option<Vec<u8>>>()
        .map(CornerLabel)
}

/// Run counts at one time, with fractions over `runs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerCounts {
    pub runs: usize,
    pub any: usize,
    pub zero: usize,
    pub one: usize,
    pub mixed: usize,
}

impl CornerCounts {
    fn frac(&self, k: usize) -> f64 {
        k as f64 / self.runs as f64
    }

    pub fn p_corner_any(&self) -> f64 {
        self.frac(self.any)
    }

    pub fn p_zero(&self) -> f64 {
        self.frac(self.zero)
    }

    pub fn p_one(&self) -> f64 {
        self.frac(self.one)
    }

    pub fn p_mixed(&self) -> f64 {
        self.frac(self.mixed)
    }
}

pub fn empirical_corner_probability(
    ensemble: &Ensemble,
    t: u64,
    delta: f64,
) -> Result<CornerCounts> {
    check_delta(delta)?;
    let mut c = CornerCounts {
        runs: ensemble.runs.len(),
        any: 0,
        zero: 0,
        one: 0,
        mixed: 0,
    };
    for run in &ensemble.runs {
        let s = run.sample(t).ok_or(Error::MissingSample(t))?;
        if let Some(m) = corner_of(&s.x, delta) {
            c.any += 1;
            if m.is_zero() {
                c.zero += 1;
            } else if m.is_one() {
                c.one += 1;
            } else {
                c.mixed += 1;
            }
        }
    }
    Ok(c)
}

/// Largest corner radius for which two linked agents `k ← l` (with weight
/// `w_kl`) provably stop acting differently: `min{α w_kl, (1−α)/(2−α)}`.
pub fn mixed_corner_delta_bound(alpha: f64, w_kl: f64) -> f64 {
    (alpha * w_kl).min((1.0 - alpha) / (2.0 - alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn labels() {
        assert_eq!(
            corner_event(&[0.01, 0.99], 0.05).unwrap(),
            Some(CornerLabel(vec![0, 1]))
        );
        assert_eq!(corner_event(&[0.5, 0.1], 0.05).unwrap(), None);
        let m = corner_event(&[0.02; 7], 0.05).unwrap().unwrap();
        assert!(m.is_zero() && !m.is_mixed());
        // boundaries are outside the open corner sets
        assert_eq!(corner_event(&[0.05], 0.05).unwrap(), None);
        assert_eq!(corner_event(&[0.95], 0.05).unwrap(), None);
    }

    #[test]
    fn invalid_delta() {
        assert_eq!(corner_event(&[0.0], 0.5), Err(Error::InvalidDelta(0.5)));
        assert_eq!(corner_event(&[0.0], 0.0), Err(Error::InvalidDelta(0.0)));
    }

    #[test]
    fn delta_bound() {
        assert!((mixed_corner_delta_bound(0.5, 0.5) - 0.25).abs() < 1e-15);
        assert!((mixed_corner_delta_bound(0.9, 1.0) - 0.1 / 1.1).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn label_is_unique(x in proptest::collection::vec(0.0f64..=1.0, 1..8), delta in 0.001f64..0.4999) {
            if let Some(m) = corner_event(&x, delta).unwrap() {
                for (&v, &b) in x.iter().zip(&m.0) {
                    // the other corner is out of reach when δ < 1/2
                    if b == 0 { prop_assert!(v < delta && v <= 1.0 - delta); }
                    else { prop_assert!(v > 1.0 - delta && v >= delta); }
                }
            } else {
                prop_assert!(x.iter().any(|&v| v >= delta && v <= 1.0 - delta));
            }
        }
    }
}
