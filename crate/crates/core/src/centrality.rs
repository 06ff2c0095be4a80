//! Subgraph centrality `[exp(A)]_ii / trace(exp(A))` maintained under edge
//! insertions and deletions.
//!
//! Each edit `A +/- (e_i e_j^* + e_j e_i^*)` is split into two Hermitian
//! rank-one terms that are applied one after the other with Lanczos.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dense::DenseMatrix;
use crate::error::{invalid, Error, Result};
use crate::funcs::{eval_matrix_function, FunctionSpec};
use crate::graph::Graph;
use crate::oracle::DENSE_REFERENCE_LIMIT;
use crate::update::{extract_diagonal, rank_k_update, LowRankModification, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOp {
    Add(usize, usize),
    Remove(usize, usize),
}

impl EdgeOp {
    pub fn endpoints(&self) -> (usize, usize) {
        match *self {
            EdgeOp::Add(i, j) | EdgeOp::Remove(i, j) => (i, j),
        }
    }

    fn sign(&self) -> f64 {
        match self {
            EdgeOp::Add(..) => 1.0,
            EdgeOp::Remove(..) => -1.0,
        }
    }
}

impl fmt::Display for EdgeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeOp::Add(i, j) => write!(f, "+{i}-{j}"),
            EdgeOp::Remove(i, j) => write!(f, "-{i}-{j}"),
        }
    }
}

/// Parses `+i-j` (insert) or `-i-j` (delete).
impl FromStr for EdgeOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (add, rest) = match s.as_bytes().first() {
            Some(b'+') => (true, &s[1..]),
            Some(b'-') => (false, &s[1..]),
            _ => return Err(invalid("edge edit must start with '+' or '-'")),
        };
        let (i, j) = rest.split_once('-').ok_or_else(|| invalid("edge edit must look like +i-j or -i-j"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| invalid("edge endpoint is not an index"));
        let (i, j) = (parse(i)?, parse(j)?);
        Ok(if add { EdgeOp::Add(i, j) } else { EdgeOp::Remove(i, j) })
    }
}

/// Outcome of one edit.
#[derive(Debug, Clone, PartialEq)]
pub struct EditReport {
    pub op: EdgeOp,
    /// Lanczos steps of each rank-one update.
    pub steps: Vec<usize>,
    pub converged: bool,
    /// `trace(exp(A))` after the edit.
    pub trace: f64,
}

/// Keeps `diag(exp(A))` of a graph up to date.
#[derive(Debug, Clone)]
pub struct CentralityUpdater {
    graph: Graph,
    diag: Vec<f64>,
    opts: SolveOptions,
}

impl CentralityUpdater {
    /// Computes the baseline `diag(exp(A))` densely.
    pub fn new(graph: Graph, opts: SolveOptions) -> Result<Self> {
        opts.validate()?;
        let n = graph.n();
        if n > DENSE_REFERENCE_LIMIT {
            return Err(Error::SizeGuard {
                n,
                limit: DENSE_REFERENCE_LIMIT,
            });
        }
        let diag = dense_exp_diagonal(&graph)?;
        Ok(CentralityUpdater { graph, diag, opts })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Current `diag(exp(A))`.
    pub fn exp_diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Subgraph centralities, summing to one.
    pub fn centralities(&self) -> Vec<f64> {
        let t = self.trace();
        self.diag.iter().map(|d| d / t).collect()
    }

    /// Applies one edit. The graph is left unchanged on error.
    pub fn apply(&mut self, op: EdgeOp) -> Result<EditReport> {
        let (i, j) = op.endpoints();
        let n = self.graph.n();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, bound: n });
            }
        }
        if i == j {
            return Err(invalid("self loops are not allowed"));
        }
        match op {
            EdgeOp::Add(..) if self.graph.has_edge(i, j) => return Err(invalid("edge already present")),
            EdgeOp::Remove(..) if !self.graph.has_edge(i, j) => return Err(invalid("edge not present")),
            _ => {}
        }
        let s = op.sign();
        let b = DenseMatrix::from_fn(n, 2, |r, c| if (c == 0 && r == i) || (c == 1 && r == j) { 1.0 } else { 0.0 });
        let c = DenseMatrix::from_fn(n, 2, |r, c| if (c == 0 && r == j) || (c == 1 && r == i) { s } else { 0.0 });
        let modification = LowRankModification::new(b, c, true)?;
        let a = self.graph.adjacency();
        let factors = rank_k_update(a, a, &modification, &FunctionSpec::Exp, &self.opts)?;

        let mut diag = self.diag.clone();
        for fac in &factors {
            for (d, delta) in diag.iter_mut().zip(extract_diagonal(fac)) {
                *d += delta;
            }
        }
        match op {
            EdgeOp::Add(..) => self.graph.add_edge(i, j)?,
            EdgeOp::Remove(..) => self.graph.remove_edge(i, j)?,
        }
        self.diag = diag;
        Ok(EditReport {
            op,
            steps: factors.iter().map(|f| f.m).collect(),
            converged: factors.iter().all(|f| f.converged),
            trace: self.trace(),
        })
    }
}

/// `diag(exp(A))` from a dense eigendecomposition.
pub fn dense_exp_diagonal(graph: &Graph) -> Result<Vec<f64>> {
    let n = graph.n();
    if n > DENSE_REFERENCE_LIMIT {
        return Err(Error::SizeGuard {
            n,
            limit: DENSE_REFERENCE_LIMIT,
        });
    }
    let e = eval_matrix_function(&graph.adjacency().to_dense(), &FunctionSpec::Exp)?;
    Ok(e.diag())
}
