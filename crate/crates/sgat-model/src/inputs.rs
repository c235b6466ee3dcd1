use std::rc::Rc;

use sgat_autodiff::Matrix;
use sgat_core::SimplicialComplexBundle;

/// One level's sparse attention pattern in entry-list form, row-major like
/// the adjacency it came from. `connectors[m]` indexes the vertical stack of
/// the level's own projected rows followed by the level above: a self-loop
/// points at the row itself, any other entry at `rows + connecting id`.
#[derive(Debug, Clone)]
pub struct AdjacencyIndex {
    pub segments: Rc<Vec<usize>>,
    pub sources: Rc<Vec<usize>>,
    pub connectors: Rc<Vec<usize>>,
    pub rows: usize,
}

/// Bundle rearranged for the tape: plain feature matrices, entry lists per
/// (scale, level), and the local-to-global row maps used for fusion.
#[derive(Debug, Clone)]
pub struct ModelInputs {
    pub k_max: usize,
    pub eta_count: usize,
    pub features: Vec<Vec<Matrix>>,
    pub adjacency: Vec<Vec<AdjacencyIndex>>,
    pub membership: Vec<Vec<Rc<Vec<usize>>>>,
    pub tau: Vec<usize>,
    pub level_dims: Vec<usize>,
    /// Target node behind each vertex-level global row, ascending.
    pub vertex_order: Vec<u32>,
}

impl ModelInputs {
    pub fn from_bundle(bundle: &SimplicialComplexBundle) -> Self {
        let k_max = bundle.k_max;
        let features: Vec<Vec<Matrix>> = bundle
            .per_eta
            .iter()
            .map(|ec| {
                ec.features
                    .iter()
                    .map(|m| Matrix::from_flat(m.rows, m.cols, m.data.clone()))
                    .collect()
            })
            .collect();
        let adjacency = bundle
            .per_eta
            .iter()
            .map(|ec| {
                ec.adjacency
                    .iter()
                    .enumerate()
                    .map(|(k, adj)| {
                        let n = ec.levels[k].len();
                        let mut segments = Vec::with_capacity(adj.nnz());
                        let mut sources = Vec::with_capacity(adj.nnz());
                        let mut connectors = Vec::with_capacity(adj.nnz());
                        for (i, j, conn) in adj.entries() {
                            segments.push(i as usize);
                            sources.push(j as usize);
                            connectors.push(if i == j {
                                i as usize
                            } else {
                                n + conn as usize
                            });
                        }
                        AdjacencyIndex {
                            segments: Rc::new(segments),
                            sources: Rc::new(sources),
                            connectors: Rc::new(connectors),
                            rows: n,
                        }
                    })
                    .collect()
            })
            .collect();
        let membership: Vec<Vec<Rc<Vec<usize>>>> = bundle
            .global
            .iter()
            .map(|gi| {
                gi.membership
                    .iter()
                    .map(|rows| Rc::new(rows.iter().map(|&r| r as usize).collect()))
                    .collect()
            })
            .collect();
        let tau = (0..=k_max).map(|k| bundle.tau(k)).collect();
        let vertex_order = bundle.global[0]
            .simplices
            .iter()
            .map(|s| s.vertices()[0])
            .collect();
        Self {
            k_max,
            eta_count: bundle.eta_max,
            level_dims: features[0].iter().map(|m| m.cols).collect(),
            features,
            adjacency,
            membership,
            tau,
            vertex_order,
        }
    }
}
