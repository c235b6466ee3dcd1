//! Lifts a heterogeneous graph into per-hop-scale simplicial complexes over
//! the target nodes, places features on every simplex, and builds the upper
//! adjacency structure consumed by the attention layers.

mod adjacency;
mod bundle;
mod enumerate;
mod features;
mod neighbors;

pub use adjacency::{build_upper_adjacency, UpperAdjacency};
pub use bundle::{EtaComplex, GlobalIndex, SimplicialComplexBundle};
pub use enumerate::{enumerate_complex, gamma_ratio};
pub use features::{assign_simplex_features, augment_edge_features};
pub use neighbors::{eta_hop_neighbor_map, NeighborMap};

use crate::error::CoreError;

/// A k-simplex: k+1 distinct target-node ids in strictly increasing order.
/// The vertex tuple alone is the simplex's identity; the same tuple found at
/// two hop scales is the same simplex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    vertices: Vec<u32>,
}

impl Simplex {
    /// Builds a simplex from vertices in any order. Panics on duplicates.
    pub fn new(mut vertices: Vec<u32>) -> Self {
        vertices.sort_unstable();
        for w in vertices.windows(2) {
            assert!(w[0] != w[1], "duplicate vertex {} in simplex", w[0]);
        }
        Self { vertices }
    }

    pub fn vertex(v: u32) -> Self {
        Self { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    /// Dimension k (vertex count minus one).
    pub fn level(&self) -> usize {
        self.vertices.len() - 1
    }

    /// The k faces obtained by dropping one vertex, for level ≥ 1.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.vertices.len()).map(move |skip| {
            let vertices = self
                .vertices
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &v)| v)
                .collect();
            Simplex { vertices }
        })
    }
}

/// Configuration of the lift.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftConfig {
    /// Max simplex dimension K; levels 0..=K are built.
    pub k_max: usize,
    /// Number of hop scales; complexes are built for η in 1..=eta_max.
    pub eta_max: usize,
    /// `epsilon[η-1][k-1]` is the min shared-neighbor count for level-k
    /// admission at hop scale η. Missing higher levels fall back to the
    /// level-1 value of the same η.
    pub epsilon: Vec<Vec<u32>>,
    /// Group-size cap λ: a candidate whose extension closure reaches λ
    /// targets is dropped.
    pub lambda: usize,
    /// Append summarized edge features to 1-simplex features.
    pub ef_enabled: bool,
}

impl LiftConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.k_max < 1 {
            return Err(CoreError::InvalidLiftConfig("k_max must be >= 1".into()));
        }
        if self.eta_max < 1 {
            return Err(CoreError::InvalidLiftConfig("eta_max must be >= 1".into()));
        }
        if self.lambda <= self.k_max {
            return Err(CoreError::InvalidLiftConfig(format!(
                "lambda ({}) must exceed k_max ({})",
                self.lambda, self.k_max
            )));
        }
        if self.epsilon.len() != self.eta_max {
            return Err(CoreError::InvalidLiftConfig(format!(
                "epsilon has {} rows but eta_max is {}",
                self.epsilon.len(),
                self.eta_max
            )));
        }
        for (i, row) in self.epsilon.iter().enumerate() {
            if row.is_empty() {
                return Err(CoreError::InvalidLiftConfig(format!(
                    "epsilon row for eta={} is empty",
                    i + 1
                )));
            }
            if row.contains(&0) {
                return Err(CoreError::InvalidLiftConfig(
                    "epsilon thresholds must be >= 1".into(),
                ));
            }
        }
        Ok(())
    }

    /// ε^k_η with the level-1 fallback for unspecified higher levels.
    pub fn epsilon_for(&self, k: usize, eta: usize) -> u32 {
        let row = &self.epsilon[eta - 1];
        *row.get(k - 1).unwrap_or(&row[0])
    }
}

/// Row-major dense matrix used for simplex feature tables.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged feature row");
            data.extend_from_slice(&r);
        }
        Self { rows: n, cols, data }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_sorts_and_reports_level() {
        let s = Simplex::new(vec![5, 1, 3]);
        assert_eq!(s.vertices(), &[1, 3, 5]);
        assert_eq!(s.level(), 2);
    }

    #[test]
    #[should_panic(expected = "duplicate vertex")]
    fn simplex_rejects_duplicates() {
        Simplex::new(vec![1, 1, 2]);
    }

    #[test]
    fn faces_drop_one_vertex_each() {
        let s = Simplex::new(vec![1, 3, 5]);
        let faces: Vec<_> = s.faces().collect();
        assert_eq!(faces.len(), 3);
        assert!(faces.contains(&Simplex::new(vec![3, 5])));
        assert!(faces.contains(&Simplex::new(vec![1, 5])));
        assert!(faces.contains(&Simplex::new(vec![1, 3])));
    }

    #[test]
    fn config_validation() {
        let ok = LiftConfig {
            k_max: 2,
            eta_max: 2,
            epsilon: vec![vec![1], vec![2, 3]],
            lambda: 10,
            ef_enabled: false,
        };
        assert!(ok.validate().is_ok());
        assert_eq!(ok.epsilon_for(1, 1), 1);
        assert_eq!(ok.epsilon_for(2, 1), 1); // falls back to level 1
        assert_eq!(ok.epsilon_for(2, 2), 3);

        let bad_lambda = LiftConfig {
            lambda: 2,
            ..ok.clone()
        };
        assert!(bad_lambda.validate().is_err());

        let bad_eps = LiftConfig {
            epsilon: vec![vec![1], vec![0]],
            ..ok.clone()
        };
        assert!(bad_eps.validate().is_err());

        let wrong_rows = LiftConfig {
            epsilon: vec![vec![1]],
            ..ok
        };
        assert!(wrong_rows.validate().is_err());
    }
}
