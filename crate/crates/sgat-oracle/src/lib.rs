//! Independent reference implementations for testing the fast paths.
//!
//! Everything here trades speed for obviousness: literal subset
//! enumeration, dense loops over full adjacency matrices, no shared
//! arithmetic with the production crates. Inputs are kept tiny by
//! construction and the entry points refuse anything larger.

mod brute;
mod dense;
mod gat;

pub use brute::brute_force_simplices;
pub use dense::{
    dense_forward_reference, DenseComplex, DenseEta, FusionParams, HeadParams, RawActivation,
    RawParams,
};
pub use gat::gat_reference_scores;
