//! CSV renderings shared by the subcommands and the verification suite.
//!
//! Every file starts with `# key: value` metadata lines. Nothing that depends
//! on the machine (thread count, wall time) is written, so identical inputs
//! give identical bytes.

use std::fmt::Write;

use crate::analysis::{empirical_corner_probability, g_grid};
use crate::dynamics::{Ensemble, TimeVariantOutcome};
use crate::error::Result;
use crate::graph::SccPoset;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn metadata(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("# {k}: {v}\n")).collect()
}

fn ensemble_metadata(ens: &Ensemble, title: &str) -> Vec<(&'static str, String)> {
    vec![
        ("herdlab", title.to_string()),
        ("version", VERSION.to_string()),
        ("config_digest", ens.config_digest.clone()),
        ("seed", ens.master_seed.to_string()),
        ("runs", ens.run_count.to_string()),
        ("alpha", ens.alpha.to_string()),
        ("t_max", ens.t_max.to_string()),
        ("delta", ens.analysis.delta().to_string()),
        ("window", ens.analysis.window().to_string()),
    ]
}

/// One row per run: verdict, first hitting time, per-component fate and the
/// final state.
pub fn ensemble_summary_csv(ens: &Ensemble, poset: &SccPoset) -> String {
    let mut meta = ensemble_metadata(ens, "ensemble summary");
    let comps: Vec<String> = poset
        .components()
        .iter()
        .enumerate()
        .map(|(r, c)| {
            let members: Vec<String> = c.iter().map(|i| format!("v{}", i + 1)).collect();
            format!("C{}={{{}}}", r + 1, members.join(","))
        })
        .collect();
    meta.push(("components", comps.join(" ")));
    let mut out = metadata(&meta);

    out.push_str("run,verdict,first_hit");
    for r in 1..=poset.len() {
        let _ = write!(out, ",C{r}");
    }
    for i in 1..=ens.n {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for run in &ens.runs {
        let v = &run.verdict;
        let hit = v.first_hit.map(|t| t.to_string()).unwrap_or_default();
        let _ = write!(out, "{},{},{}", run.run_index, v.kind, hit);
        for f in &v.per_component {
            let _ = write!(out, ",{f}");
        }
        for &x in &run.final_state {
            let _ = write!(out, ",{}", num(x));
        }
        out.push('\n');
    }
    out
}

/// Corner-event counts and fractions at each sample time.
pub fn corner_table_csv(ens: &Ensemble) -> Result<String> {
    let delta = ens.analysis.delta();
    let mut out = metadata(&ensemble_metadata(ens, "corner probabilities"));
    out.push_str("t,runs,any,zero,one,mixed,p_any,p_zero,p_one,p_mixed\n");
    for &t in &ens.sample_times {
        let c = empirical_corner_probability(ens, t, delta)?;
        let _ = writeln!(
            out,
            "{t},{},{},{},{},{},{},{},{},{}",
            c.runs,
            c.any,
            c.zero,
            c.one,
            c.mixed,
            num(c.p_corner_any()),
            num(c.p_zero()),
            num(c.p_one()),
            num(c.p_mixed())
        );
    }
    Ok(out)
}

/// `k` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => vec![],
        1 => vec![lo],
        _ => (0..k)
            .map(|j| {
                if j == k - 1 {
                    hi
                } else {
                    lo + (hi - lo) * j as f64 / (k - 1) as f64
                }
            })
            .collect(),
    }
}

/// First column `γ`, then one column per `α`.
pub fn gfunc_csv(alphas: &[f64], n: u32, gammas: &[f64], tol: f64) -> Result<String> {
    let grid = g_grid(alphas, n, gammas, tol)?;
    let mut out = metadata(&[
        ("herdlab", "g function grid".into()),
        ("version", VERSION.into()),
        ("n", n.to_string()),
        ("tol", format!("{tol:e}")),
    ]);
    out.push_str("gamma");
    for a in alphas {
        let _ = write!(out, ",alpha={a}");
    }
    out.push('\n');
    for (g, row) in gammas.iter().zip(&grid) {
        out.push_str(&num(*g));
        for v in row {
            let _ = write!(out, ",{}", num(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn timevariant_csv(outcome: &TimeVariantOutcome, meta: &[(&str, String)]) -> String {
    let l = outcome.limit_matrix;
    let mut pairs = meta.to_vec();
    pairs.push((
        "limit_matrix",
        format!(
            "{} {}; {} {}",
            num(l[0][0]),
            num(l[0][1]),
            num(l[1][0]),
            num(l[1][1])
        ),
    ));
    pairs.push(("terminal_gap", num(outcome.terminal_gap())));
    let mut out = metadata(&pairs);
    out.push_str("t,x1,x2\n");
    for (t, x) in outcome.trajectory.iter().enumerate() {
        let _ = writeln!(out, "{t},{},{}", num(x[0]), num(x[1]));
    }
    out
}
