//! Perron left eigenvector of an irreducible stochastic matrix.
//!
//! For irreducible `W` there is a unique probability vector `π > 0` with
//! `πᵀW = πᵀ`. We find it by damped power iteration on the transpose,
//!
//! > v ← ½ v + ½ Wᵀ v,   v ← v / ‖v‖₁,
//!
//! starting from the uniform vector. Damping moves every eigenvalue `λ ≠ 1`
//! of `Wᵀ` to `(1 + λ)/2`, strictly inside the unit disc, so periodic chains
//! such as the two-agent swap converge too. The fixed point is unchanged.

use crate::error::{Error, Result};
use crate::graph::{is_irreducible, WeightMatrix};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

/// Iterations without residual improvement after which polishing stops.
const STALL_LIMIT: usize = 64;

/// Normalized Perron left vector: positive entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronVector {
    values: Vec<f64>,
    residual: f64,
    iterations: usize,
}

impl PerronVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `‖πᵀW − πᵀ‖∞` at the returned vector.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `πᵀx`.
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.values.iter().zip(x).map(|(p, v)| p * v).sum()
    }
}

impl std::ops::Index<usize> for PerronVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// `‖vᵀW − vᵀ‖∞`.
pub fn left_residual(w: &WeightMatrix, v: &[f64]) -> f64 {
    let mut y = vec![0.0; w.n()];
    w.left_mul_into(v, &mut y);
    y.iter()
        .zip(v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

pub fn perron_left_vector(w: &WeightMatrix, tol: f64, max_iters: usize) -> Result<PerronVector> {
    let n = w.n();
    perron_left_vector_from(w, &vec![1.0 / n as f64; n], tol, max_iters)
}

/// Like [`perron_left_vector`] with an explicit positive start vector. The
/// start is normalized first, so scaling it has no effect.
pub fn perron_left_vector_from(
    w: &WeightMatrix,
    start: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<PerronVector> {
    let n = w.n();
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: start.len(),
        });
    }
    if tol.is_nan() || tol <= 0.0 || max_iters == 0 {
        return Err(Error::invalid("tol and max_iters must be positive"));
    }
    if start.iter().any(|&v| !v.is_finite() || v <= 0.0) {
        return Err(Error::invalid("start vector must be strictly positive"));
    }
    if !is_irreducible(w) {
        return Err(Error::ReducibleMatrix);
    }

    let mut v = start.to_vec();
    normalize_l1(&mut v);
    let mut wv = vec![0.0; n];

    let mut best = v.clone();
    let mut best_residual = left_residual(w, &v);
    let mut stalled = 0;
    let mut converged_at = None;

    for iter in 1..=max_iters {
        if best_residual <= tol && converged_at.is_none() {
            converged_at = Some(iter - 1);
        }
        if converged_at.is_some() && (stalled >= STALL_LIMIT || best_residual == 0.0) {
            break;
        }

        w.left_mul_into(&v, &mut wv);
        for (a, b) in v.iter_mut().zip(&wv) {
            *a = 0.5 * *a + 0.5 * b;
        }
        normalize_l1(&mut v);

        let r = left_residual(w, &v);
        if r < best_residual {
            best_residual = r;
            best.copy_from_slice(&v);
            stalled = 0;
        } else {
            stalled += 1;
        }
    }

    let Some(iterations) = converged_at.or((best_residual <= tol).then_some(max_iters)) else {
        return Err(Error::NoConvergence { max_iters });
    };
    Ok(PerronVector {
        values: best,
        residual: best_residual,
        iterations,
    })
}

fn normalize_l1(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(beta: f64) -> WeightMatrix {
        WeightMatrix::new(vec![vec![1.0 - beta, beta], vec![beta, 1.0 - beta]]).unwrap()
    }

    #[test]
    fn symmetric_pair_is_uniform() {
        for beta in [0.1, 0.3, 0.5, 0.9] {
            let pi = perron_left_vector(&sym(beta), DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
            assert!((pi[0] - 0.5).abs() < 1e-15 && (pi[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn periodic_swap_converges_with_damping() {
        let swap = sym(1.0);
        let pi = perron_left_vector(&swap, DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(pi.values(), &[0.5, 0.5]);
        // a lopsided start would oscillate forever without damping
        let pi =
            perron_left_vector_from(&swap, &[0.9, 0.1], DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reducible_is_rejected() {
        let err = perron_left_vector(&WeightMatrix::four_component_example(), DEFAULT_TOL, 10);
        assert_eq!(err.unwrap_err(), Error::ReducibleMatrix);
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let w = WeightMatrix::new(vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.7, 0.0, 0.3],
        ])
        .unwrap();
        let err = perron_left_vector(&w, 1e-14, 2).unwrap_err();
        assert_eq!(err, Error::NoConvergence { max_iters: 2 });
    }

    #[test]
    fn unequal_chain() {
        // birth-death chain; detailed balance gives π ∝ (1, 2, 2)
        let w = WeightMatrix::new(vec![
            vec![0.5, 0.5, 0.0],
            vec![0.25, 0.5, 0.25],
            vec![0.0, 0.25, 0.75],
        ])
        .unwrap();
        let pi = perron_left_vector(&w, DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
        let expect = [0.2, 0.4, 0.4];
        for (a, b) in pi.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
        assert!(pi.residual() <= 1e-15);
    }
}
