//! LDPC codes as Tanner graphs.
//!
//! A [`TannerGraph`] is immutable once built. Besides the two adjacency
//! views it carries a check-major edge numbering that the decoders use to
//! store one message per edge.

mod alist;
mod ensemble;
mod qc;

pub use alist::{load_alist, write_alist};
pub use ensemble::sample_irregular;
pub use qc::{expand_qc, load_qc, QcBaseMatrix};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid base matrix: {0}")]
    InvalidBaseMatrix(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("word length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Bipartite graph of `n` variable nodes and `m` check nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    var_adj: Vec<Vec<usize>>,
    chk_adj: Vec<Vec<usize>>,
    // check-major edge numbering: edges of check m are chk_start[m]..chk_start[m+1]
    chk_start: Vec<usize>,
    edge_var: Vec<usize>,
    // var_edges[n][k] is the edge id of (var_adj[n][k], n)
    var_edges: Vec<Vec<usize>>,
}

impl TannerGraph {
    /// Builds a graph from both adjacency views, checking that they agree.
    pub fn from_adjacency(
        var_adj: Vec<Vec<usize>>,
        chk_adj: Vec<Vec<usize>>,
    ) -> Result<Self, CodeError> {
        let n = var_adj.len();
        let m = chk_adj.len();
        for (v, checks) in var_adj.iter().enumerate() {
            if checks.is_empty() {
                return Err(CodeError::InvalidGraph(format!("variable {v} has degree 0")));
            }
            let mut seen = checks.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(CodeError::InvalidGraph(format!(
                    "parallel edge at variable {v}"
                )));
            }
            if let Some(&c) = checks.iter().find(|&&c| c >= m) {
                return Err(CodeError::InvalidGraph(format!(
                    "variable {v} references check {c} >= {m}"
                )));
            }
        }
        for (c, vars) in chk_adj.iter().enumerate() {
            if vars.is_empty() {
                return Err(CodeError::InvalidGraph(format!("check {c} has degree 0")));
            }
            let mut seen = vars.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(CodeError::InvalidGraph(format!("parallel edge at check {c}")));
            }
            if let Some(&v) = vars.iter().find(|&&v| v >= n) {
                return Err(CodeError::InvalidGraph(format!(
                    "check {c} references variable {v} >= {n}"
                )));
            }
        }

        let mut chk_start = Vec::with_capacity(m + 1);
        let mut edge_var = Vec::new();
        chk_start.push(0);
        for vars in &chk_adj {
            edge_var.extend_from_slice(vars);
            chk_start.push(edge_var.len());
        }
        let var_edge_total: usize = var_adj.iter().map(Vec::len).sum();
        if var_edge_total != edge_var.len() {
            return Err(CodeError::InvalidGraph(format!(
                "variable side lists {var_edge_total} edges, check side lists {}",
                edge_var.len()
            )));
        }

        let mut var_edges: Vec<Vec<usize>> = var_adj.iter().map(|a| vec![usize::MAX; a.len()]).collect();
        for (c, vars) in chk_adj.iter().enumerate() {
            for (k, &v) in vars.iter().enumerate() {
                let pos = var_adj[v].iter().position(|&x| x == c).ok_or_else(|| {
                    CodeError::InvalidGraph(format!(
                        "check {c} lists variable {v}, but variable {v} does not list check {c}"
                    ))
                })?;
                var_edges[v][pos] = chk_start[c] + k;
            }
        }

        Ok(Self {
            var_adj,
            chk_adj,
            chk_start,
            edge_var,
            var_edges,
        })
    }

    /// Builds a graph from `(variable, check)` pairs. Adjacency lists come out
    /// sorted ascending.
    pub fn from_edges(n: usize, m: usize, edges: &[(usize, usize)]) -> Result<Self, CodeError> {
        let mut var_adj = vec![Vec::new(); n];
        let mut chk_adj = vec![Vec::new(); m];
        for &(v, c) in edges {
            if v >= n || c >= m {
                return Err(CodeError::InvalidGraph(format!(
                    "edge ({v}, {c}) outside {n} x {m}"
                )));
            }
            var_adj[v].push(c);
            chk_adj[c].push(v);
        }
        var_adj.iter_mut().for_each(|a| a.sort_unstable());
        chk_adj.iter_mut().for_each(|a| a.sort_unstable());
        Self::from_adjacency(var_adj, chk_adj)
    }

    /// Builds a graph from a dense 0/1 parity-check matrix given row by row.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self, CodeError> {
        let n = rows.first().map_or(0, Vec::len);
        let mut edges = Vec::new();
        for (c, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(CodeError::InvalidGraph("ragged matrix".into()));
            }
            edges.extend(row.iter().enumerate().filter(|(_, &b)| b != 0).map(|(v, _)| (v, c)));
        }
        Self::from_edges(n, rows.len(), &edges)
    }

    pub fn n(&self) -> usize {
        self.var_adj.len()
    }

    pub fn m(&self) -> usize {
        self.chk_adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_var.len()
    }

    /// Checks adjacent to variable `v`, H(v).
    pub fn var_neighbors(&self, v: usize) -> &[usize] {
        &self.var_adj[v]
    }

    /// Variables adjacent to check `c`, H(c).
    pub fn chk_neighbors(&self, c: usize) -> &[usize] {
        &self.chk_adj[c]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_adj[v].len()
    }

    pub fn chk_degree(&self, c: usize) -> usize {
        self.chk_adj[c].len()
    }

    /// Edge ids of check `c`, in the order of [`chk_neighbors`](Self::chk_neighbors).
    pub fn chk_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.chk_start[c]..self.chk_start[c + 1]
    }

    /// Edge ids of variable `v`, in the order of [`var_neighbors`](Self::var_neighbors).
    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[v]
    }

    /// Variable endpoint of edge `e`.
    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    /// Design rate `1 - m/n`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.m() as f64 / self.n() as f64
    }

    /// True iff every parity check is satisfied by `bits`.
    pub fn syndrome_ok(&self, bits: &[u8]) -> Result<bool, CodeError> {
        if bits.len() != self.n() {
            return Err(CodeError::LengthMismatch {
                expected: self.n(),
                got: bits.len(),
            });
        }
        Ok(self.syndrome_ok_unchecked(bits))
    }

    pub(crate) fn syndrome_ok_unchecked(&self, bits: &[u8]) -> bool {
        self.chk_adj
            .iter()
            .all(|vars| vars.iter().fold(0u8, |acc, &v| acc ^ (bits[v] & 1)) == 0)
    }

    /// Number of pairs of variables sharing two or more checks.
    pub fn four_cycle_count(&self) -> usize {
        let mut count = 0;
        let mut mark = vec![usize::MAX; self.n()];
        for v in 0..self.n() {
            for &c in &self.var_adj[v] {
                for &u in &self.chk_adj[c] {
                    if u <= v {
                        continue;
                    }
                    if mark[u] == v {
                        count += 1;
                    } else {
                        mark[u] = v;
                    }
                }
            }
        }
        count
    }
}

/// Edge-perspective degree distribution pair (λ, ρ).
///
/// `lambda[i]` is the fraction of edges attached to variable nodes of
/// degree `i`; likewise `rho[j]` for check nodes. Index 0 is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    lambda: Vec<f64>,
    rho: Vec<f64>,
}

const DIST_SUM_TOL: f64 = 1e-9;

impl DegreeDistribution {
    /// From `(degree, fraction)` pairs. Repeated degrees accumulate.
    pub fn new(lambda: &[(usize, f64)], rho: &[(usize, f64)]) -> Result<Self, CodeError> {
        Ok(Self {
            lambda: Self::side(lambda, "lambda")?,
            rho: Self::side(rho, "rho")?,
        })
    }

    /// Regular ensemble with all variables of degree `dv` and checks of degree `dc`.
    pub fn regular(dv: usize, dc: usize) -> Result<Self, CodeError> {
        Self::new(&[(dv, 1.0)], &[(dc, 1.0)])
    }

    fn side(pairs: &[(usize, f64)], name: &str) -> Result<Vec<f64>, CodeError> {
        if pairs.is_empty() {
            return Err(CodeError::InvalidDistribution(format!("{name} is empty")));
        }
        let max = pairs.iter().map(|p| p.0).max().unwrap_or(0);
        let mut coeffs = vec![0.0; max + 1];
        for &(d, f) in pairs {
            if d == 0 {
                return Err(CodeError::InvalidDistribution(format!("{name} has degree 0")));
            }
            if !(0.0..=1.0).contains(&f) {
                return Err(CodeError::InvalidDistribution(format!(
                    "{name}_{d} = {f} outside [0, 1]"
                )));
            }
            coeffs[d] += f;
        }
        let sum: f64 = coeffs.iter().sum();
        if (sum - 1.0).abs() > DIST_SUM_TOL {
            return Err(CodeError::InvalidDistribution(format!(
                "{name} coefficients sum to {sum}"
            )));
        }
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        Ok(coeffs)
    }

    /// Coefficient λ_i (zero past the maximum degree).
    pub fn lambda(&self, i: usize) -> f64 {
        self.lambda.get(i).copied().unwrap_or(0.0)
    }

    pub fn rho(&self, j: usize) -> f64 {
        self.rho.get(j).copied().unwrap_or(0.0)
    }

    pub fn max_var_degree(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn max_chk_degree(&self) -> usize {
        self.rho.len() - 1
    }

    /// `(degree, λ_degree)` for every nonzero coefficient.
    pub fn lambda_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.lambda.iter().copied().enumerate().filter(|&(_, f)| f > 0.0)
    }

    pub fn rho_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rho.iter().copied().enumerate().filter(|&(_, f)| f > 0.0)
    }

    /// λ(x) = Σ λ_i x^(i-1).
    pub fn eval_lambda(&self, x: f64) -> f64 {
        horner_shifted(&self.lambda, x)
    }

    /// ρ(x) = Σ ρ_j x^(j-1).
    pub fn eval_rho(&self, x: f64) -> f64 {
        horner_shifted(&self.rho, x)
    }

    /// Design rate `1 - ∫ρ / ∫λ`.
    pub fn design_rate(&self) -> f64 {
        let int = |c: &[f64]| c.iter().enumerate().skip(1).map(|(d, f)| f / d as f64).sum::<f64>();
        1.0 - int(&self.rho) / int(&self.lambda)
    }

    /// Rejects distributions with edges on degree-1 nodes.
    pub fn ensure_min_degree_two(&self) -> Result<(), CodeError> {
        if self.lambda(1) > 0.0 {
            return Err(CodeError::InvalidDistribution(
                "degree-1 variable nodes are not supported".into(),
            ));
        }
        if self.rho(1) > 0.0 {
            return Err(CodeError::InvalidDistribution(
                "degree-1 check nodes are not supported".into(),
            ));
        }
        Ok(())
    }

    /// Largest absolute coefficient difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let diff = |a: &[f64], b: &[f64]| {
            (0..a.len().max(b.len()))
                .map(|i| (a.get(i).unwrap_or(&0.0) - b.get(i).unwrap_or(&0.0)).abs())
                .fold(0.0, f64::max)
        };
        diff(&self.lambda, &other.lambda).max(diff(&self.rho, &other.rho))
    }
}

// Σ c[i] x^(i-1) for i >= 1
fn horner_shifted(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().skip(1).rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Measured edge-perspective degree distribution of `graph`.
pub fn degree_distributions(graph: &TannerGraph) -> DegreeDistribution {
    let e = graph.edge_count() as f64;
    let side = |degrees: &mut dyn Iterator<Item = usize>| {
        let mut counts: Vec<usize> = Vec::new();
        for d in degrees {
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += d;
        }
        let mut fracs: Vec<f64> = counts.iter().map(|&c| c as f64 / e).collect();
        let sum: f64 = fracs.iter().sum();
        fracs.iter_mut().for_each(|f| *f /= sum);
        fracs
    };
    DegreeDistribution {
        lambda: side(&mut (0..graph.n()).map(|v| graph.var_degree(v))),
        rho: side(&mut (0..graph.m()).map(|c| graph.chk_degree(c))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> TannerGraph {
        // 4 checks x 8 variables, mixed degrees
        TannerGraph::from_dense(&[
            vec![1, 1, 0, 1, 0, 0, 1, 0],
            vec![0, 1, 1, 0, 1, 0, 0, 1],
            vec![1, 0, 1, 0, 0, 1, 1, 0],
            vec![0, 0, 0, 1, 1, 1, 0, 1],
        ])
        .unwrap()
    }

    #[test]
    fn edge_numbering_is_consistent() {
        let g = fixture();
        assert_eq!(g.edge_count(), 16);
        for c in 0..g.m() {
            for (k, e) in g.chk_edges(c).enumerate() {
                assert_eq!(g.edge_var(e), g.chk_neighbors(c)[k]);
            }
        }
        for v in 0..g.n() {
            for (k, &e) in g.var_edges(v).iter().enumerate() {
                let c = g.var_neighbors(v)[k];
                assert!(g.chk_edges(c).contains(&e));
                assert_eq!(g.edge_var(e), v);
            }
        }
    }

    #[test]
    fn adjacency_mismatch_rejected() {
        let err = TannerGraph::from_adjacency(vec![vec![0], vec![0]], vec![vec![0, 1, 1]]);
        assert!(err.is_err());
        let err = TannerGraph::from_adjacency(vec![vec![0], vec![0]], vec![vec![0]]);
        assert!(err.is_err());
    }

    #[test]
    fn degree_distribution_hand_count() {
        // variable degrees: 2,2,2,2,2,2,2,2 ; check degrees 4,4,4,4
        let g = fixture();
        let d = degree_distributions(&g);
        assert_eq!(d.lambda(2), 1.0);
        assert_eq!(d.rho(4), 1.0);

        // mixed: rows {1101, 0111, 1010}
        let g = TannerGraph::from_dense(&[vec![1, 1, 0, 1], vec![0, 1, 1, 1], vec![1, 0, 1, 0]]).unwrap();
        // var degrees (2,2,2,2) -> 8 edges; check degrees (3,3,2)
        let d = degree_distributions(&g);
        assert_eq!(d.lambda(2), 1.0);
        assert!((d.rho(3) - 6.0 / 8.0).abs() < 1e-15);
        assert!((d.rho(2) - 2.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn identity_graph_reports_degree_one() {
        let g = expand_qc(&QcBaseMatrix::new(1, 1, 3, vec![0]).unwrap()).unwrap();
        let d = degree_distributions(&g);
        assert_eq!(d.lambda(1), 1.0);
        assert_eq!(d.rho(1), 1.0);
        assert_eq!(d.max_var_degree(), 1);
    }

    #[test]
    fn polynomial_evaluation() {
        let d = DegreeDistribution::new(&[(2, 0.5), (3, 0.5)], &[(6, 1.0)]).unwrap();
        assert_eq!(d.eval_lambda(1.0), 1.0);
        assert_eq!(d.eval_rho(1.0), 1.0);
        assert!((d.eval_lambda(0.5) - (0.25 + 0.125)).abs() < 1e-15);
        assert!((d.eval_rho(0.9) - 0.9f64.powi(5)).abs() < 1e-15);
        assert!((DegreeDistribution::regular(3, 6).unwrap().design_rate() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn distribution_validation() {
        assert!(DegreeDistribution::new(&[(2, 0.5)], &[(6, 1.0)]).is_err());
        assert!(DegreeDistribution::new(&[(2, 1.5), (3, -0.5)], &[(6, 1.0)]).is_err());
        assert!(DegreeDistribution::new(&[], &[(6, 1.0)]).is_err());
        let d = DegreeDistribution::new(&[(1, 1.0)], &[(6, 1.0)]).unwrap();
        assert!(d.ensure_min_degree_two().is_err());
    }

    #[test]
    fn syndrome() {
        let g = fixture();
        assert!(g.syndrome_ok(&[0; 8]).unwrap());
        let mut word = [0u8; 8];
        word[3] = 1;
        assert!(!g.syndrome_ok(&word).unwrap());
        assert!(g.syndrome_ok(&[0; 7]).is_err());
    }

    #[test]
    fn four_cycles_counted() {
        let g = TannerGraph::from_dense(&[vec![1, 1, 0], vec![1, 1, 1]]).unwrap();
        assert_eq!(g.four_cycle_count(), 1);
        assert_eq!(fixture().four_cycle_count(), 2);
    }
}
