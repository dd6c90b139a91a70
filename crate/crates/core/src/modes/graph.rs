use nalgebra::DMatrix;

use crate::{Error, Result};

/// Unit-weight undirected graph without self loops.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterGraph {
    adjacency: DMatrix<f64>,
}

impl ClusterGraph {
    pub fn from_adjacency(rows: &[Vec<u8>]) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("adjacency matrix must be square".into()));
        }
        for (j, row) in rows.iter().enumerate() {
            for (k, &e) in row.iter().enumerate() {
                if e > 1 {
                    return Err(Error::InvalidParameter("adjacency entries must be 0 or 1".into()));
                }
                if e != rows[k][j] {
                    return Err(Error::InvalidParameter("adjacency must be symmetric".into()));
                }
                if j == k && e != 0 {
                    return Err(Error::InvalidParameter("graph must not contain self loops".into()));
                }
            }
        }
        Ok(Self {
            adjacency: DMatrix::from_fn(m, m, |j, k| f64::from(rows[j][k])),
        })
    }

    /// Zero-based undirected edge list; duplicates are merged.
    pub fn from_edges(nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut rows = vec![vec![0u8; nodes]; nodes];
        for &(a, b) in edges {
            if a >= nodes || b >= nodes {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) outside {nodes} nodes"
                )));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self loop on node {a}")));
            }
            rows[a][b] = 1;
            rows[b][a] = 1;
        }
        Self::from_adjacency(&rows)
    }

    /// Path graph `0 - 1 - ... - (m-1)`.
    pub fn linear(nodes: usize) -> Self {
        let edges: Vec<_> = (1..nodes).map(|j| (j - 1, j)).collect();
        Self::from_edges(nodes, &edges).expect("path graph is valid")
    }

    pub fn empty(nodes: usize) -> Self {
        Self {
            adjacency: DMatrix::zeros(nodes, nodes),
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.nrows() == 0
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        self.adjacency[(j, k)] != 0.0
    }

    pub fn degree(&self, j: usize) -> usize {
        self.adjacency.row(j).iter().filter(|&&e| e != 0.0).count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let m = self.len();
        (0..m)
            .flat_map(|j| (j + 1..m).map(move |k| (j, k)))
            .filter(|&(j, k)| self.has_edge(j, k))
            .collect()
    }

    /// `r_j = 1 / sqrt(1 + degree(j))`.
    pub fn normalizations(&self) -> Vec<f64> {
        (0..self.len())
            .map(|j| 1.0 / (1.0 + self.degree(j) as f64).sqrt())
            .collect()
    }
}
