//! Feature placement on simplices.
//!
//! Level 0 carries the target node's own feature. Levels >= 2 carry the mean
//! feature of the simplex's shared η-scale neighbors. Level 1 carries path
//! features: over the paths of length 2η between the endpoints that run
//! through non-target intermediates and cross a shared neighbor at the
//! midpoint, each path contributes the sum of its intermediate node features,
//! and the simplex feature is the mean over paths.
//!
//! Path tiers. The strict tier uses simple paths. Some admitted pairs have no
//! simple path of the required shape (the neighbor map measures plain
//! shortest-path distance, so a shared neighbor can be reachable only through
//! a vertex both sides must reuse, or only through other targets). The
//! relaxed tier then allows the two halves to reuse vertices across sides,
//! summing each distinct intermediate once. If even that yields nothing, the
//! feature falls back to the mean of the shared neighbors, mirroring the
//! higher-level rule. A pair with no shared neighbors at all is an error:
//! enumeration can never admit one.
//!
//! Path orientation runs from the smaller endpoint to the larger one; node
//! sums do not care, edge summaries do.

use std::collections::HashSet;

use crate::error::CoreError;
use crate::graph::{EdgeFeatureTable, HeteroGraph};

use super::neighbors::NeighborMap;
use super::{DenseMatrix, Simplex};

/// One enumerated path half: `start -> ... -> midpoint` with non-target,
/// on-path-unique intermediates.
struct Half {
    /// Intermediates in traversal order, excluding start and midpoint.
    nodes: Vec<u32>,
    /// Sum of the intermediate node features.
    feat_sum: Vec<f64>,
    /// Sum of the η traversal-oriented edge features, when requested.
    edge_sum: Option<Vec<f64>>,
}

/// Depth-first enumeration of simple half-paths of length η from `start` to
/// any node of `midpoints`, grouped by midpoint. `reversed` flips the edge
/// traversal orientation (used for the half walked backwards from the larger
/// endpoint).
fn enumerate_halves(
    g: &HeteroGraph,
    table: Option<&EdgeFeatureTable>,
    start: u32,
    midpoints: &HashSet<u32>,
    eta: usize,
    reversed: bool,
) -> Vec<(u32, Vec<Half>)> {
    let d = g.feature_dim();
    let mut out: Vec<(u32, Vec<Half>)> = Vec::new();
    let mut path: Vec<u32> = vec![start];
    let mut found: Vec<Half> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn step(
        g: &HeteroGraph,
        table: Option<&EdgeFeatureTable>,
        eta: usize,
        reversed: bool,
        d: usize,
        path: &mut Vec<u32>,
        target_mid: u32,
        found: &mut Vec<Half>,
    ) {
        let cur = *path.last().unwrap();
        let depth = path.len() - 1;
        if depth == eta {
            if cur != target_mid {
                return;
            }
            let nodes: Vec<u32> = path[1..eta].to_vec();
            let mut feat_sum = vec![0.0; d];
            for &x in &nodes {
                for (a, b) in feat_sum.iter_mut().zip(g.feature(x)) {
                    *a += b;
                }
            }
            let edge_sum = table.map(|t| {
                let mut acc = vec![0.0; t.dim];
                for w in path.windows(2) {
                    let (src, dst) = if reversed { (w[1], w[0]) } else { (w[0], w[1]) };
                    let f = t
                        .traversal_feature(src, dst)
                        .expect("adjacent nodes have a stored edge");
                    for (a, b) in acc.iter_mut().zip(&f) {
                        *a += b;
                    }
                }
                acc
            });
            found.push(Half {
                nodes,
                feat_sum,
                edge_sum,
            });
            return;
        }
        for &y in g.neighbors(cur) {
            if path.contains(&y) {
                continue;
            }
            let last_step = depth + 1 == eta;
            if last_step {
                if y != target_mid {
                    continue;
                }
            } else if g.is_target(y) {
                continue;
            }
            path.push(y);
            step(g, table, eta, reversed, d, path, target_mid, found);
            path.pop();
        }
    }

    let mut mids: Vec<u32> = midpoints.iter().copied().collect();
    mids.sort_unstable();
    for mid in mids {
        found.clear();
        step(g, table, eta, reversed, d, &mut path, mid, &mut found);
        if !found.is_empty() {
            out.push((mid, std::mem::take(&mut found)));
        }
    }
    out
}

/// Node-block and optional edge-block feature for the 1-simplex {lo, hi}.
fn pair_feature(
    g: &HeteroGraph,
    nbrs: &NeighborMap,
    table: Option<&EdgeFeatureTable>,
    lo: u32,
    hi: u32,
) -> Result<(Vec<f64>, Option<Vec<f64>>), CoreError> {
    let eta = nbrs.eta();
    let d = g.feature_dim();
    let shared = nbrs.shared(&[lo, hi]);
    if shared.is_empty() {
        return Err(CoreError::NoSharedNeighbors {
            simplex: vec![lo, hi],
            eta,
        });
    }
    let mid_set: HashSet<u32> = shared.iter().copied().collect();
    let lo_halves = enumerate_halves(g, table, lo, &mid_set, eta, false);
    let hi_halves = enumerate_halves(g, table, hi, &mid_set, eta, true);

    let edge_dim = table.map(|t| t.dim).unwrap_or(0);
    let mut node_acc = vec![0.0; d];
    let mut edge_acc = vec![0.0; edge_dim];
    let mut count = 0usize;

    // Tier 1: the combined path is simple (halves share no intermediate).
    // Tier 2: halves may overlap; distinct intermediates counted once.
    for strict in [true, false] {
        for (mid, lhs) in &lo_halves {
            let Some((_, rhs)) = hi_halves.iter().find(|(m, _)| m == mid) else {
                continue;
            };
            for p in lhs {
                for q in rhs {
                    let overlap = p.nodes.iter().any(|x| q.nodes.contains(x));
                    if strict && overlap {
                        continue;
                    }
                    if overlap {
                        let mut distinct: Vec<u32> = p.nodes.clone();
                        for &x in &q.nodes {
                            if !distinct.contains(&x) {
                                distinct.push(x);
                            }
                        }
                        for &x in &distinct {
                            for (a, b) in node_acc.iter_mut().zip(g.feature(x)) {
                                *a += b;
                            }
                        }
                    } else {
                        for (a, b) in node_acc.iter_mut().zip(&p.feat_sum) {
                            *a += b;
                        }
                        for (a, b) in node_acc.iter_mut().zip(&q.feat_sum) {
                            *a += b;
                        }
                    }
                    for (a, b) in node_acc.iter_mut().zip(g.feature(*mid)) {
                        *a += b;
                    }
                    if let (Some(ps), Some(qs)) = (&p.edge_sum, &q.edge_sum) {
                        let inv = 1.0 / (2 * eta) as f64;
                        for (a, (x, y)) in edge_acc.iter_mut().zip(ps.iter().zip(qs)) {
                            *a += (x + y) * inv;
                        }
                    }
                    count += 1;
                }
            }
        }
        if count > 0 {
            break;
        }
    }

    if count == 0 {
        // Tier 3: no usable path at all; treat the pair like a higher-level
        // simplex and average the shared neighbors. Edge summary stays zero.
        let inv = 1.0 / shared.len() as f64;
        for &u in &shared {
            for (a, b) in node_acc.iter_mut().zip(g.feature(u)) {
                *a += b * inv;
            }
        }
    } else {
        let inv = 1.0 / count as f64;
        for a in &mut node_acc {
            *a *= inv;
        }
        for a in &mut edge_acc {
            *a *= inv;
        }
    }
    Ok((node_acc, table.map(|_| edge_acc)))
}

/// Mean shared-neighbor feature for a simplex of level >= 2.
fn shared_mean(
    g: &HeteroGraph,
    nbrs: &NeighborMap,
    s: &Simplex,
) -> Result<Vec<f64>, CoreError> {
    let shared = nbrs.shared(s.vertices());
    if shared.is_empty() {
        return Err(CoreError::NoSharedNeighbors {
            simplex: s.vertices().to_vec(),
            eta: nbrs.eta(),
        });
    }
    let d = g.feature_dim();
    let mut acc = vec![0.0; d];
    let inv = 1.0 / shared.len() as f64;
    for &u in &shared {
        for (a, b) in acc.iter_mut().zip(g.feature(u)) {
            *a += b * inv;
        }
    }
    Ok(acc)
}

/// Feature matrix (one row per simplex, width = node feature dim) for every
/// level of an enumerated complex.
pub fn assign_simplex_features(
    g: &HeteroGraph,
    levels: &[Vec<Simplex>],
    nbrs: &NeighborMap,
) -> Result<Vec<DenseMatrix>, CoreError> {
    let d = g.feature_dim();
    let mut out = Vec::with_capacity(levels.len());
    for (k, level) in levels.iter().enumerate() {
        let mut rows = Vec::with_capacity(level.len());
        for s in level {
            let row = match k {
                0 => g.feature(s.vertices()[0]).to_vec(),
                1 => pair_feature(g, nbrs, None, s.vertices()[0], s.vertices()[1])?.0,
                _ => shared_mean(g, nbrs, s)?,
            };
            rows.push(row);
        }
        out.push(DenseMatrix::from_rows(rows, d));
    }
    Ok(out)
}

/// Level-1 feature matrix with the summarized edge block appended: each row is
/// `mean path node sum || mean path edge summary`, width `d + (2d + a)`, both
/// blocks averaged over the same path set.
pub fn augment_edge_features(
    g: &HeteroGraph,
    table: &EdgeFeatureTable,
    levels: &[Vec<Simplex>],
    nbrs: &NeighborMap,
) -> Result<DenseMatrix, CoreError> {
    let d = g.feature_dim();
    let width = d + table.dim;
    let level1: &[Simplex] = levels.get(1).map(|l| l.as_slice()).unwrap_or(&[]);
    let mut rows = Vec::with_capacity(level1.len());
    for s in level1 {
        let (node, edge) =
            pair_feature(g, nbrs, Some(table), s.vertices()[0], s.vertices()[1])?;
        let mut row = node;
        row.extend_from_slice(&edge.expect("edge block requested"));
        rows.push(row);
    }
    Ok(DenseMatrix::from_rows(rows, width))
}

#[cfg(test)]
mod tests {
    use super::super::neighbors::eta_hop_neighbor_map;
    use super::*;
    use crate::graph::{build_edge_features, Edge, Splits};

    fn graph(
        types: Vec<u32>,
        type_names: &[&str],
        edges: Vec<(u32, u32, u32)>,
        etype_names: &[&str],
        feats: Vec<Vec<f64>>,
    ) -> HeteroGraph {
        let labels = types
            .iter()
            .map(|&t| if t == 0 { Some(0) } else { None })
            .collect();
        HeteroGraph::new(
            types,
            type_names.iter().map(|s| s.to_string()).collect(),
            etype_names.iter().map(|s| s.to_string()).collect(),
            vec!["c".into()],
            edges
                .into_iter()
                .map(|(src, dst, etype)| Edge { src, dst, etype })
                .collect(),
            feats.into_iter().map(Some).collect(),
            0,
            labels,
            Splits::default(),
        )
        .unwrap()
    }

    #[test]
    fn one_hop_pair_feature_is_mean_of_shared_hubs() {
        // Targets 0,1 share hubs 2 and 3.
        let g = graph(
            vec![0, 0, 1, 1],
            &["t", "h"],
            vec![(0, 2, 0), (1, 2, 0), (0, 3, 0), (1, 3, 0)],
            &["e"],
            vec![
                vec![9.0, 9.0],
                vec![8.0, 8.0],
                vec![1.0, 3.0],
                vec![5.0, 7.0],
            ],
        );
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = vec![
            vec![Simplex::vertex(0), Simplex::vertex(1)],
            vec![Simplex::new(vec![0, 1])],
        ];
        let feats = assign_simplex_features(&g, &levels, &nbrs).unwrap();
        assert_eq!(feats[0].row(0), &[9.0, 9.0]);
        assert_eq!(feats[1].row(0), &[3.0, 5.0]); // (h2 + h3) / 2
    }

    #[test]
    fn triangle_feature_is_mean_of_shared_hubs() {
        let g = graph(
            vec![0, 0, 0, 1],
            &["t", "h"],
            vec![(0, 3, 0), (1, 3, 0), (2, 3, 0)],
            &["e"],
            vec![vec![0.0], vec![0.0], vec![0.0], vec![4.5]],
        );
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = vec![
            vec![Simplex::vertex(0), Simplex::vertex(1), Simplex::vertex(2)],
            vec![
                Simplex::new(vec![0, 1]),
                Simplex::new(vec![0, 2]),
                Simplex::new(vec![1, 2]),
            ],
            vec![Simplex::new(vec![0, 1, 2])],
        ];
        let feats = assign_simplex_features(&g, &levels, &nbrs).unwrap();
        assert_eq!(feats[1].row(0), &[4.5]); // single shared hub
        assert_eq!(feats[2].row(0), &[4.5]);
    }

    #[test]
    fn two_hop_path_sums_all_intermediates() {
        // 0 - 2 - 4 - 3 - 1 with papers 2,3 and venue 4; one path of length 4.
        let g = graph(
            vec![0, 0, 1, 1, 2],
            &["t", "p", "v"],
            vec![(0, 2, 0), (2, 4, 1), (4, 3, 1), (3, 1, 0)],
            &["tp", "pv"],
            vec![
                vec![0.0],
                vec![0.0],
                vec![10.0],
                vec![20.0],
                vec![300.0],
            ],
        );
        let nbrs = eta_hop_neighbor_map(&g, 2);
        assert_eq!(nbrs.shared(&[0, 1]), vec![4]);
        let levels = vec![
            vec![Simplex::vertex(0), Simplex::vertex(1)],
            vec![Simplex::new(vec![0, 1])],
        ];
        let feats = assign_simplex_features(&g, &levels, &nbrs).unwrap();
        // Theta = h2 + h4 + h3 over the single path.
        assert_eq!(feats[1].row(0), &[330.0]);
    }

    #[test]
    fn overlapping_halves_count_each_intermediate_once() {
        // Both targets reach venue 3 only through the single paper 2, so the
        // walk 0-2-3-2-1 reuses node 2; its feature appears once.
        let g = graph(
            vec![0, 0, 1, 2],
            &["t", "p", "v"],
            vec![(0, 2, 0), (1, 2, 0), (2, 3, 1)],
            &["tp", "pv"],
            vec![vec![0.0], vec![0.0], vec![10.0], vec![200.0]],
        );
        let nbrs = eta_hop_neighbor_map(&g, 2);
        assert_eq!(nbrs.shared(&[0, 1]), vec![3]);
        let levels = vec![
            vec![Simplex::vertex(0), Simplex::vertex(1)],
            vec![Simplex::new(vec![0, 1])],
        ];
        let feats = assign_simplex_features(&g, &levels, &nbrs).unwrap();
        assert_eq!(feats[1].row(0), &[210.0]);
    }

    #[test]
    fn target_blocked_routes_fall_back_to_shared_mean() {
        // Shared 2-hop neighbor 4 is reachable from each endpoint only
        // through another target (2 resp. 3), so no path qualifies.
        let g = graph(
            vec![0, 0, 0, 0, 1],
            &["t", "h"],
            vec![(0, 2, 0), (2, 4, 0), (1, 3, 0), (3, 4, 0)],
            &["e"],
            vec![vec![0.0], vec![0.0], vec![0.0], vec![0.0], vec![7.0]],
        );
        let nbrs = eta_hop_neighbor_map(&g, 2);
        assert_eq!(nbrs.shared(&[0, 1]), vec![4]);
        let levels = vec![
            vec![
                Simplex::vertex(0),
                Simplex::vertex(1),
                Simplex::vertex(2),
                Simplex::vertex(3),
            ],
            vec![Simplex::new(vec![0, 1])],
        ];
        let feats = assign_simplex_features(&g, &levels, &nbrs).unwrap();
        assert_eq!(feats[1].row(0), &[7.0]);
        // The edge summary over an empty path set is zero.
        let table = build_edge_features(&g);
        let ef = augment_edge_features(&g, &table, &levels, &nbrs).unwrap();
        assert_eq!(&ef.row(0)[..1], &[7.0]);
        assert!(ef.row(0)[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn missing_shared_neighbors_is_an_error() {
        let g = graph(
            vec![0, 0, 1],
            &["t", "h"],
            vec![(0, 2, 0)],
            &["e"],
            vec![vec![0.0], vec![0.0], vec![1.0]],
        );
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = vec![
            vec![Simplex::vertex(0), Simplex::vertex(1)],
            vec![Simplex::new(vec![0, 1])],
        ];
        match assign_simplex_features(&g, &levels, &nbrs).unwrap_err() {
            CoreError::NoSharedNeighbors { simplex, eta } => {
                assert_eq!(simplex, vec![0, 1]);
                assert_eq!(eta, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn edge_block_averages_oriented_edge_features() {
        // Single path 0 - 2 - 1. Stored edges are (0,2) and (1,2); the
        // traversal 2 -> 1 runs against the second edge's orientation.
        let g = graph(
            vec![0, 0, 1],
            &["t", "h"],
            vec![(0, 2, 0), (1, 2, 0)],
            &["e"],
            vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 5.0]],
        );
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = vec![
            vec![Simplex::vertex(0), Simplex::vertex(1)],
            vec![Simplex::new(vec![0, 1])],
        ];
        let table = build_edge_features(&g);
        let ef = augment_edge_features(&g, &table, &levels, &nbrs).unwrap();
        // Node block: the single hub's feature.
        assert_eq!(&ef.row(0)[..2], &[0.0, 5.0]);
        // Edge block: mean of e(0->2) = h0||h2||1 and e(2->1) = h2||h1||1.
        let e02 = [1.0, 0.0, 0.0, 5.0, 1.0];
        let e21 = [0.0, 5.0, 2.0, 0.0, 1.0];
        let want: Vec<f64> = e02.iter().zip(&e21).map(|(a, b)| (a + b) / 2.0).collect();
        assert_eq!(&ef.row(0)[2..], want.as_slice());
    }

    #[test]
    fn two_paths_average_their_edge_summaries() {
        // Hubs 2 and 3 both connect targets 0 and 1.
        let g = graph(
            vec![0, 0, 1, 1],
            &["t", "h"],
            vec![(0, 2, 0), (1, 2, 0), (0, 3, 0), (1, 3, 0)],
            &["e"],
            vec![
                vec![1.0],
                vec![2.0],
                vec![10.0],
                vec![30.0],
            ],
        );
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = vec![
            vec![Simplex::vertex(0), Simplex::vertex(1)],
            vec![Simplex::new(vec![0, 1])],
        ];
        let table = build_edge_features(&g);
        let ef = augment_edge_features(&g, &table, &levels, &nbrs).unwrap();
        // Per-hub path summary: (e(0->u) + e(u->1)) / 2.
        let phi2 = [(1.0 + 10.0) / 2.0, (10.0 + 2.0) / 2.0, 1.0];
        let phi3 = [(1.0 + 30.0) / 2.0, (30.0 + 2.0) / 2.0, 1.0];
        let want: Vec<f64> = phi2.iter().zip(&phi3).map(|(a, b)| (a + b) / 2.0).collect();
        assert_eq!(&ef.row(0)[..1], &[20.0]); // node block: (10 + 30) / 2
        assert_eq!(&ef.row(0)[1..], want.as_slice());
    }
}
