//! The infinite product
//!
//! > g_{α,N}(γ) = Π_{s≥0} (1 − (1−α)^s γ)^N,   γ ∈ [0, 1].
//!
//! It is continuous and decreasing with `g(0) = 1` and `g(1) = 0`, and it is
//! the probability floor for a run that sits in a `γ`-corner to stay in the
//! geometrically shrinking corners forever.
//!
//! The product is truncated after `S` factors, where the log-tail bound
//! `Σ_{s>S} N (1−α)^s γ / α ≤ tol` fixes
//! `S = ⌈ln(tol·α/(N·γ)) / ln(1−α)⌉`, and evaluated as a sum of `ln_1p`
//! terms so large `N` or small `α` do not underflow mid-product.

use crate::error::{Error, Result};

pub const DEFAULT_G_TOL: f64 = 1e-15;

fn check(alpha: f64, n: u32, gamma: f64, tol: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha = {alpha} outside (0, 1)")));
    }
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma = {gamma} outside [0, 1]")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("tol must be positive"));
    }
    Ok(())
}

/// Index `S` of the last factor kept.
pub fn truncation_index(alpha: f64, n: u32, gamma: f64, tol: f64) -> Result<usize> {
    check(alpha, n, gamma, tol)?;
    if gamma == 0.0 {
        return Ok(0);
    }
    let s = ((tol * alpha / (f64::from(n) * gamma)).ln() / (1.0 - alpha).ln()).ceil();
    Ok(if s > 0.0 { s as usize } else { 0 })
}

/// `ln g_{α,N}(γ)`; `−∞` at `γ = 1`.
pub fn ln_g_function(alpha: f64, n: u32, gamma: f64, tol: f64) -> Result<f64> {
    let last = truncation_index(alpha, n, gamma, tol)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    if gamma == 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let q = 1.0 - alpha;
    let mut factor = 1.0;
    let mut sum = 0.0;
    for _ in 0..=last {
        sum += (-factor * gamma).ln_1p();
        factor *= q;
    }
    Ok(f64::from(n) * sum)
}

pub fn g_function(alpha: f64, n: u32, gamma: f64, tol: f64) -> Result<f64> {
    let ln = ln_g_function(alpha, n, gamma, tol)?;
    Ok(if gamma == 0.0 {
        1.0
    } else if gamma == 1.0 {
        0.0
    } else {
        ln.exp()
    })
}

/// `Π_{s=0}^{steps−1} (1 − (1−α)^s δ)^N`: a lower bound on the probability
/// that a run in the `δ`-corner at time `t` stays in the corners of radius
/// `(1−α)^s δ` for the next `steps` steps.
pub fn corner_stay_bound(alpha: f64, n: u32, delta: f64, steps: usize) -> Result<f64> {
    check(alpha, n, delta, 1.0)?;
    let q = 1.0 - alpha;
    let mut factor = 1.0;
    let mut sum = 0.0;
    for _ in 0..steps {
        sum += (-factor * delta).ln_1p();
        factor *= q;
    }
    Ok((f64::from(n) * sum).exp())
}

/// `g` on a `γ` grid for several `α`: `out[k][j] = g_{alphas[j],N}(gammas[k])`.
pub fn g_grid(alphas: &[f64], n: u32, gammas: &[f64], tol: f64) -> Result<Vec<Vec<f64>>> {
    gammas
        .iter()
        .map(|&g| alphas.iter().map(|&a| g_function(a, n, g, tol)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(alpha: f64, n: u32, gamma: f64, last: usize) -> f64 {
        (0..=last)
            .map(|s| (1.0 - (1.0 - alpha).powi(s as i32) * gamma).powi(n as i32))
            .product()
    }

    #[test]
    fn endpoints_are_exact() {
        for alpha in [0.001, 0.3, 0.999] {
            for n in [1, 6, 50] {
                assert_eq!(g_function(alpha, n, 0.0, 1e-12).unwrap(), 1.0);
                assert_eq!(g_function(alpha, n, 1.0, 1e-12).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn matches_truncated_product() {
        let g = g_function(0.5, 1, 0.5, 1e-15).unwrap();
        assert!((g - brute(0.5, 1, 0.5, 200)).abs() < 1e-12);
        // (1−1/2)(1−1/4)(1−1/8)… ≈ 0.288788095
        assert!((g - 0.288_788_095_086_602_4).abs() < 1e-12);
    }

    #[test]
    fn decreasing_on_grid() {
        let vals: Vec<f64> = (0..=10)
            .map(|k| g_function(0.3, 6, f64::from(k) / 10.0, 1e-14).unwrap())
            .collect();
        assert!(vals.windows(2).all(|p| p[1] < p[0]), "{vals:?}");
    }

    #[test]
    fn truncation_index_formula() {
        // ln(1e-10·0.5/1)/ln(0.5) = 34.2…
        assert_eq!(truncation_index(0.5, 1, 1.0, 1e-10).unwrap(), 35);
        assert_eq!(truncation_index(0.5, 1, 0.0, 1e-10).unwrap(), 0);
        assert!(truncation_index(1.0, 1, 0.5, 1e-10).is_err());
        assert!(truncation_index(0.5, 0, 0.5, 1e-10).is_err());
        assert!(truncation_index(0.5, 1, 1.5, 1e-10).is_err());
    }

    #[test]
    fn halving_tolerance_is_stable() {
        for &(alpha, n, gamma) in &[(0.2, 3, 0.4), (0.05, 6, 0.01), (0.9, 1, 0.99)] {
            let coarse = g_function(alpha, n, gamma, 1e-8).unwrap();
            let fine = g_function(alpha, n, gamma, 5e-9).unwrap();
            assert!((coarse - fine).abs() <= 1e-8);
        }
    }

    #[test]
    fn stay_bound_approaches_g() {
        let b = corner_stay_bound(0.4, 3, 0.1, 400).unwrap();
        let g = g_function(0.4, 3, 0.1, 1e-15).unwrap();
        assert!((b - g).abs() < 1e-14);
        assert_eq!(corner_stay_bound(0.4, 3, 0.1, 0).unwrap(), 1.0);
    }
}
