//! Simple undirected graphs and shortest-path distances in matrix graphs.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

/// Undirected simple graph held as a 0/1 adjacency matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: SparseMatrix<f64>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut t = Vec::with_capacity(2 * edges.len());
        for &(i, j) in edges {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, bound: n });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, bound: n });
            }
            if i == j {
                return Err(invalid("self-loops are not allowed"));
            }
            t.push((i, j, 1.0));
            t.push((j, i, 1.0));
        }
        let a = SparseMatrix::from_triplets(n, &t)?;
        // Repeated edges were summed; clamp back to 0/1.
        let values = a.values().iter().map(|_| 1.0).collect();
        let a = SparseMatrix::from_csr(n, a.row_ptr().to_vec(), a.col_idx().to_vec(), values)?
            .with_symmetry_flag(true)?;
        Ok(Self { adjacency: a })
    }

    /// Validates an adjacency matrix: symmetric 0/1 pattern, zero diagonal.
    pub fn from_adjacency(a: SparseMatrix<f64>) -> Result<Self> {
        for i in 0..a.n() {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if i == j && v != 0.0 {
                    return Err(invalid("adjacency matrix has a nonzero diagonal"));
                }
                if v != 0.0 && v != 1.0 {
                    return Err(invalid("adjacency entries must be 0 or 1"));
                }
            }
        }
        let edges: Vec<_> = (0..a.n())
            .flat_map(|i| {
                let (cols, vals) = a.row(i);
                cols.iter()
                    .zip(vals)
                    .filter(|(_, &v)| v == 1.0)
                    .map(move |(&j, _)| (i, j))
                    .collect::<Vec<_>>()
            })
            .collect();
        if !a.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        let g = Self::from_edges(a.n(), &edges)?;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    pub fn adjacency(&self) -> &SparseMatrix<f64> {
        &self.adjacency
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency.get(i, j) != 0.0
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency.row(i).0.len()
    }

    /// Edge list with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|i| {
                self.adjacency
                    .row(i)
                    .0
                    .iter()
                    .filter(move |&&j| j > i)
                    .map(move |&j| (i, j))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let n = self.n();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, bound: n });
        }
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, bound: n });
        }
        if i == j {
            return Err(invalid("edge endpoints must differ"));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        if self.has_edge(i, j) {
            return Err(invalid("edge already present"));
        }
        let mut e = self.edges();
        e.push((i, j));
        *self = Self::from_edges(self.n(), &e)?;
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        if !self.has_edge(i, j) {
            return Err(invalid("edge not present"));
        }
        let (a, b) = (i.min(j), i.max(j));
        let e: Vec<_> = self.edges().into_iter().filter(|&p| p != (a, b)).collect();
        *self = Self::from_edges(self.n(), &e)?;
        Ok(())
    }
}

/// BFS distances from `source` in the graph of `a` (edge where `a_ij != 0`,
/// diagonal ignored). `None` marks unreachable nodes.
pub fn bfs_distances<T: Scalar>(a: &SparseMatrix<T>, source: usize) -> Result<Vec<Option<usize>>> {
    let n = a.n();
    if source >= n {
        return Err(Error::IndexOutOfRange {
            index: source,
            bound: n,
        });
    }
    let mut dist = vec![None; n];
    dist[source] = Some(0);
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        let (cols, vals) = a.row(u);
        for (&v, &w) in cols.iter().zip(vals) {
            if v != u && w != T::zero() && dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    Ok(dist)
}

/// Shortest-path length between `i` and `j`; `None` when disconnected.
///
/// Edges are taken from the stored pattern of `a` in both directions, so
/// nonsymmetric patterns are treated as undirected only if stored that way.
pub fn graph_distance<T: Scalar>(a: &SparseMatrix<T>, i: usize, j: usize) -> Result<Option<usize>> {
    let n = a.n();
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, bound: n });
    }
    if i == j && i < n {
        return Ok(Some(0));
    }
    Ok(bfs_distances(a, i)?[j])
}
