//! Independent reference implementations used to check the fast paths.
//!
//! Everything here is deliberately naive: cubic transitive closure instead of
//! Tarjan, matrix squaring instead of power iteration, plain products instead
//! of log-space sums. None of it shares code with the modules it checks.

use rand::Rng;

use crate::graph::WeightMatrix;

/// Boolean reachability `reach[i][j]` (path of length ≥ 0 from `i` to `j`),
/// by Floyd–Warshall on an adjacency matrix `adj[i][j]` = edge `i → j`.
pub fn transitive_closure(adj: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = adj.len();
    let mut reach: Vec<Vec<bool>> = adj.to_vec();
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let via = reach[k].clone();
                for (dst, &hop) in reach[i].iter_mut().zip(&via) {
                    *dst |= hop;
                }
            }
        }
    }
    reach
}

/// Mutual-reachability classes, each sorted, ordered by smallest member.
pub fn reachability_classes(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let reach = transitive_closure(adj);
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let class: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &class {
            seen[j] = true;
        }
        classes.push(class);
    }
    classes
}

/// Adjacency `adj[j][i]` = edge `j → i` of a weight matrix (`w_ij > 0`).
pub fn adjacency(w: &WeightMatrix) -> Vec<Vec<bool>> {
    let n = w.n();
    (0..n)
        .map(|j| (0..n).map(|i| w.get(i, j) > 0.0).collect())
        .collect()
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// Stationary row vector of an irreducible stochastic `W`, read off the rows
/// of `P^(2^k)` with `P = ½(I + W)`. The lazy chain is aperiodic, so every
/// row converges to `πᵀ`.
pub fn perron_by_squaring(w: &WeightMatrix) -> Vec<f64> {
    let n = w.n();
    let mut p: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| 0.5 * w.get(i, j) + if i == j { 0.5 } else { 0.0 })
                .collect()
        })
        .collect();
    for _ in 0..200 {
        let next = mat_mul(&p, &p);
        let spread = (0..n)
            .map(|j| {
                let col = next.iter().map(|r| r[j]);
                col.clone().fold(f64::NEG_INFINITY, f64::max) - col.fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        p = next;
        if spread < 1e-15 {
            break;
        }
    }
    let mut pi: Vec<f64> = (0..n)
        .map(|j| p.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= s);
    pi
}

/// `Π_{s=0}^{S} (1 − (1−α)^s γ)^N`, multiplied out directly.
pub fn truncated_product(alpha: f64, n: u32, gamma: f64, s_max: usize) -> f64 {
    let mut prod = 1.0;
    let mut decay = 1.0;
    for _ in 0..=s_max {
        prod *= (1.0 - decay * gamma).powi(n as i32);
        decay *= 1.0 - alpha;
    }
    prod
}

/// Gap `|x_{T,1} − x_{T,2}|` of the two-agent time-variant system, from the
/// diagonalized factors `D_t = diag(1, 1 − 2β_t)`: only the second
/// eigen-coordinate `(x_1 − x_2)/√2` is contracted.
pub fn diagonal_product_gap(betas: &[f64], x0: [f64; 2]) -> f64 {
    let lambda: f64 = betas.iter().map(|b| 1.0 - 2.0 * b).product();
    (lambda * (x0[0] - x0[1])).abs()
}

/// Random digraph adjacency with edge probability `p` (no self-loops).
pub fn random_digraph<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Vec<Vec<bool>> {
    (0..n)
        .map(|i| (0..n).map(|j| i != j && rng.random::<f64>() < p).collect())
        .collect()
}

/// Row-stochastic matrix whose support is `adj` transposed (edge `j → i` puts
/// weight on `w_ij`), plus a self-loop wherever a row would otherwise be
/// empty.
pub fn stochastic_from_digraph<R: Rng + ?Sized>(rng: &mut R, adj: &[Vec<bool>]) -> WeightMatrix {
    let n = adj.len();
    let rows = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n)
                .map(|j| {
                    if adj[j][i] {
                        0.05 + rng.random::<f64>()
                    } else {
                        0.0
                    }
                })
                .collect();
            if row.iter().all(|&v| v == 0.0) {
                row[i] = 1.0;
            }
            normalized(row)
        })
        .collect();
    WeightMatrix::new(rows).expect("normalized rows are stochastic")
}

/// Irreducible stochastic matrix: a random Hamiltonian cycle plus extra
/// random edges and self-loops.
pub fn random_irreducible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WeightMatrix {
    let mut order: Vec<usize> = (0..n).collect();
    for k in (1..n).rev() {
        order.swap(k, rng.random_range(0..=k));
    }
    let mut support = vec![vec![false; n]; n];
    for k in 0..n {
        support[order[k]][order[(k + 1) % n]] = true;
    }
    for row in support.iter_mut() {
        for v in row.iter_mut() {
            if rng.random::<f64>() < 0.3 {
                *v = true;
            }
        }
    }
    let rows = support
        .iter()
        .map(|s| {
            let row = s
                .iter()
                .map(|&e| if e { 0.05 + rng.random::<f64>() } else { 0.0 })
                .collect();
            normalized(row)
        })
        .collect();
    WeightMatrix::new(rows).expect("normalized rows are stochastic")
}

/// Divides by the sum, then nudges the largest entry so the row sums to one
/// within a couple of ulps.
fn normalized(mut row: Vec<f64>) -> Vec<f64> {
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= s);
    let err = 1.0 - row.iter().sum::<f64>();
    let k = (0..row.len())
        .max_by(|&a, &b| row[a].total_cmp(&row[b]))
        .expect("non-empty row");
    row[k] += err;
    row
}
