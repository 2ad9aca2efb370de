//! Trust networks and their strongly-connected-component poset.
//!
//! A [`WeightMatrix`] is a row-stochastic `n × n` matrix where `w[i][j] > 0`
//! means agent `i` listens to agent `j`, i.e. there is an edge `j → i`.
//! Edges are defined by strict positivity; there is no epsilon threshold.
//!
//! [`strongly_connected_components`] condenses the network into its
//! communication classes and orders them by reachability: `C_r ≼ C_s` when a
//! directed path runs from some agent of `C_s` to some agent of `C_r`. The
//! maximal elements of that poset are the components nobody outside can
//! influence; they evolve autonomously.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Absolute tolerance on every row sum.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Validated row-stochastic trust matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl WeightMatrix {
    /// Validates a square array of weights. Entries are stored bit-exactly;
    /// nothing is renormalized.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        validate_weight_matrix(&rows)
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity of size zero");
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        WeightMatrix { n, entries }
    }

    /// The seven-agent network with four strongly connected components used
    /// throughout the book: `v1` trusts only itself, `v2 ↔ v3`, `v4 ↔ v5`,
    /// `v6 ↔ v7`, plus the bridges `v1 → v2`, `v3 → v6` and `v4 → v7`. Every
    /// agent splits its trust equally over its incoming edges.
    pub fn four_component_example() -> Self {
        parse_weight_matrix(FOUR_COMPONENT_EXAMPLE).expect("packaged example is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// `true` when agent `i` listens to agent `j` (edge `j → i`).
    #[inline]
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.get(to, from) > 0.0
    }

    /// `y = W x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (row, out) in self.rows().zip(y.iter_mut()) {
            *out = row.iter().zip(x).map(|(w, v)| w * v).sum();
        }
    }

    /// `y = xᵀ W`, returned as a column.
    pub fn left_mul_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (row, &xi) in self.rows().zip(x) {
            for (out, &w) in y.iter_mut().zip(row) {
                *out += xi * w;
            }
        }
    }

    /// Renders the matrix in the plain-text file format accepted by
    /// [`parse_weight_matrix`]. Values use the shortest representation that
    /// parses back to the same bits.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for WeightMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Text of the packaged seven-agent example network.
pub const FOUR_COMPONENT_EXAMPLE: &str = include_str!("../assets/four_components.txt");

pub fn validate_weight_matrix(raw: &[Vec<f64>]) -> Result<WeightMatrix> {
    let n = raw.len();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (row, r) in raw.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NonSquare {
                row,
                len: r.len(),
                n,
            });
        }
    }
    let mut entries = Vec::with_capacity(n * n);
    for (i, r) in raw.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            // also rejects NaN
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::NegativeEntry { i, j, value: v });
            }
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::RowSumViolation { row: i, sum });
        }
        entries.extend_from_slice(r);
    }
    Ok(WeightMatrix { n, entries })
}

/// Parses the plain-text matrix format: first line `n`, then `n` lines with
/// `n` whitespace-separated numbers. `#` starts a comment; blank lines are
/// skipped. Errors carry 1-based line numbers.
pub fn parse_weight_matrix(text: &str) -> Result<WeightMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing matrix size"))?;
    let n: usize = header
        .parse()
        .map_err(|_| Error::parse(first, format!("expected matrix size, found `{header}`")))?;
    if n == 0 {
        return Err(Error::parse(first, "matrix size must be positive"));
    }

    let mut rows = Vec::with_capacity(n);
    let mut last_line = first;
    for (line_no, line) in lines.by_ref().take(n) {
        last_line = line_no;
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::parse(line_no, format!("invalid number `{tok}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(Error::parse(
                line_no,
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() < n {
        return Err(Error::parse(
            last_line,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::parse(line_no, "unexpected content after last row"));
    }
    validate_weight_matrix(&rows).map_err(|e| Error::parse(first, e.to_string()))
}

/// Parses an inline matrix: rows separated by `;`, entries by whitespace.
pub fn parse_inline_matrix(text: &str) -> Result<WeightMatrix> {
    let rows = text
        .split(';')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| {
            r.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| Error::invalid(format!("invalid number `{tok}`")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    validate_weight_matrix(&rows)
}

pub fn load_weight_matrix(path: impl AsRef<Path>) -> Result<WeightMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_weight_matrix(&text).map_err(|e| e.with_path(path))
}

/// Strongly connected components ordered by reachability.
///
/// Components are numbered by their smallest member agent, so output is
/// identical across runs and platforms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccPoset {
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    /// `order[r][s]` is `C_r ≼ C_s`.
    order: Vec<Vec<bool>>,
    covers: Vec<(usize, usize)>,
    maximal: Vec<usize>,
    minimal: Vec<usize>,
}

impl SccPoset {
    /// Number of components `M`.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Member agents of each component, ascending.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, r: usize) -> &[usize] {
        &self.components[r]
    }

    pub fn component_of(&self, agent: usize) -> usize {
        self.component_of[agent]
    }

    /// `C_r ≼ C_s`: some agent of `C_s` reaches some agent of `C_r`.
    pub fn precedes(&self, r: usize, s: usize) -> bool {
        self.order[r][s]
    }

    pub fn order(&self) -> &[Vec<bool>] {
        &self.order
    }

    /// Pairs `(r, s)` with `C_s` covering `C_r`, sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn maximal(&self) -> &[usize] {
        &self.maximal
    }

    pub fn minimal(&self) -> &[usize] {
        &self.minimal
    }

    pub fn is_maximal(&self, r: usize) -> bool {
        self.maximal.binary_search(&r).is_ok()
    }
}

impl fmt::Display for SccPoset {
    /// Human-readable listing with 1-based component and agent labels.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "components: {}", self.len())?;
        for (r, members) in self.components.iter().enumerate() {
            let names: Vec<String> = members.iter().map(|a| format!("v{}", a + 1)).collect();
            writeln!(f, "  C{} = {{{}}}", r + 1, names.join(", "))?;
        }
        let covers: Vec<String> = self
            .covers
            .iter()
            .map(|(r, s)| format!("(C{},C{})", r + 1, s + 1))
            .collect();
        writeln!(f, "covers: {}", covers.join(" "))?;
        let label = |v: &[usize]| {
            v.iter()
                .map(|r| format!("C{}", r + 1))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "maximal: {}", label(&self.maximal))?;
        write!(f, "minimal: {}", label(&self.minimal))
    }
}

/// Iterative Tarjan over the edge convention `j → i` iff `w_ij > 0`.
fn tarjan(w: &WeightMatrix) -> Vec<Vec<usize>> {
    let n = w.n();
    let successors: Vec<Vec<usize>> = (0..n)
        .map(|j| (0..n).filter(|&i| w.has_edge(j, i)).collect())
        .collect();

    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut out = Vec::new();
    // (node, position in successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(v, pos)) = call.last() {
            if let Some(&u) = successors[v].get(pos) {
                if let Some(top) = call.last_mut() {
                    top.1 += 1;
                }
                if index[u] == UNVISITED {
                    index[u] = next_index;
                    lowlink[u] = next_index;
                    next_index += 1;
                    stack.push(u);
                    on_stack[u] = true;
                    call.push((u, 0));
                } else if on_stack[u] {
                    lowlink[v] = lowlink[v].min(index[u]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let u = stack.pop().expect("tarjan stack underflow");
                    on_stack[u] = false;
                    comp.push(u);
                    if u == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

pub fn strongly_connected_components(w: &WeightMatrix) -> SccPoset {
    let n = w.n();
    let mut components = tarjan(w);
    components.sort_unstable_by_key(|c| c[0]);
    let m = components.len();

    let mut component_of = vec![0; n];
    for (r, c) in components.iter().enumerate() {
        for &a in c {
            component_of[a] = r;
        }
    }

    // reach[s][r]: an edge (or path) runs from C_s into C_r.
    let mut reach = vec![vec![false; m]; m];
    for (r, row) in reach.iter_mut().enumerate() {
        row[r] = true;
    }
    for i in 0..n {
        for j in 0..n {
            if w.get(i, j) > 0.0 {
                reach[component_of[j]][component_of[i]] = true;
            }
        }
    }
    // The condensation is a DAG, so closure over m components is cheap.
    for k in 0..m {
        for s in 0..m {
            if reach[s][k] {
                let via = reach[k].clone();
                for (dst, &hop) in reach[s].iter_mut().zip(&via) {
                    *dst |= hop;
                }
            }
        }
    }

    let order: Vec<Vec<bool>> = (0..m)
        .map(|r| (0..m).map(|s| reach[s][r]).collect())
        .collect();

    let mut covers = Vec::new();
    for r in 0..m {
        for s in 0..m {
            if r == s || !order[r][s] {
                continue;
            }
            let interposed = (0..m).any(|t| t != r && t != s && order[r][t] && order[t][s]);
            if !interposed {
                covers.push((r, s));
            }
        }
    }

    let maximal = (0..m)
        .filter(|&r| (0..m).all(|s| s == r || !order[r][s]))
        .collect();
    let minimal = (0..m)
        .filter(|&r| (0..m).all(|s| s == r || !order[s][r]))
        .collect();

    SccPoset {
        components,
        component_of,
        order,
        covers,
        maximal,
        minimal,
    }
}

pub fn is_irreducible(w: &WeightMatrix) -> bool {
    strongly_connected_components(w).len() == 1
}
