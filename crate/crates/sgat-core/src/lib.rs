//! Heterogeneous graph datasets and their lift into feature-bearing
//! simplicial complexes over the target nodes.

pub mod error;
pub mod graph;
pub mod lift;
pub mod synthetic;

pub use error::CoreError;
pub use graph::{
    build_edge_features, load_dataset, pad_features, randomize_node_features, save_dataset,
    Edge, EdgeFeatureTable, HeteroGraph, Splits,
};
pub use lift::{
    assign_simplex_features, augment_edge_features, build_upper_adjacency, enumerate_complex,
    eta_hop_neighbor_map, gamma_ratio, DenseMatrix, EtaComplex, GlobalIndex, LiftConfig,
    NeighborMap, Simplex, SimplicialComplexBundle, UpperAdjacency,
};
