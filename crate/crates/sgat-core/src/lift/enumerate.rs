//! Bottom-up simplex enumeration with shared-neighbor admission and the
//! group-size cap.
//!
//! A (k+1)-vertex target set S is a candidate at hop scale η when its vertices
//! share at least ε^k_η common η-scale neighbors. The cap then drops S when
//! its extension closure E(S) = S ∪ {t ∉ S : S ∪ {t} still shares ≥ ε^k_η
//! neighbors} reaches λ targets. A final pass keeps the maximal
//! downward-closed family: a simplex survives only if every face survived.

use std::collections::{HashMap, HashSet};

use crate::graph::HeteroGraph;

use super::neighbors::NeighborMap;
use super::{LiftConfig, Simplex};

/// Inverted neighbor index: non-target node -> sorted targets that have it in
/// their η-scale set.
fn invert(g: &HeteroGraph, nbrs: &NeighborMap) -> HashMap<u32, Vec<u32>> {
    let mut inv: HashMap<u32, Vec<u32>> = HashMap::new();
    for v in g.target_nodes() {
        for &u in nbrs.get(v) {
            inv.entry(u).or_default().push(v);
        }
    }
    // Targets iterate in ascending order, so each list is already sorted.
    inv
}

/// True when |E(S)| >= lambda, counting extension targets via the inverted
/// index with an early exit once the cap is reached.
fn closure_reaches_lambda(
    shared: &[u32],
    members: &[u32],
    inv: &HashMap<u32, Vec<u32>>,
    eps: u32,
    lambda: usize,
) -> bool {
    if members.len() >= lambda {
        return true;
    }
    let mut counts: HashMap<u32, u32> = HashMap::new();
    let mut qualifying = 0usize;
    for u in shared {
        let Some(ts) = inv.get(u) else { continue };
        for &t in ts {
            if members.contains(&t) {
                continue;
            }
            let c = counts.entry(t).or_insert(0);
            *c += 1;
            if *c == eps {
                qualifying += 1;
                if members.len() + qualifying >= lambda {
                    return true;
                }
            }
        }
    }
    false
}

/// Enumerates the complex for the hop scale of `nbrs`: level 0 is every
/// target node; levels 1..=K apply the shared-neighbor threshold, the cap,
/// and the downward-closure repair. Output levels are sorted by vertex tuple.
pub fn enumerate_complex(
    g: &HeteroGraph,
    cfg: &LiftConfig,
    nbrs: &NeighborMap,
) -> Vec<Vec<Simplex>> {
    let eta = nbrs.eta();
    let targets = g.target_nodes();
    let inv = invert(g, nbrs);
    let mut levels: Vec<Vec<Simplex>> = Vec::with_capacity(cfg.k_max + 1);
    levels.push(targets.iter().map(|&v| Simplex::vertex(v)).collect());

    // Level 1: pairs from hub co-occurrence. With ε = 1 a hub shared by
    // >= λ targets forces |E(pair)| >= λ for every pair through it, so
    // generating those pairs is pointless; the skip keeps C(|hub|, 2) in
    // check. For ε >= 2 a large hub does not by itself doom a pair, so all
    // hubs generate.
    let eps1 = cfg.epsilon_for(1, eta);
    let mut pair_counts: HashMap<(u32, u32), u32> = HashMap::new();
    for ts in inv.values() {
        if eps1 == 1 && ts.len() >= cfg.lambda {
            continue;
        }
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                *pair_counts.entry((ts[i], ts[j])).or_insert(0) += 1;
            }
        }
    }
    let mut level1: Vec<Simplex> = Vec::new();
    for (&(v, w), &count) in &pair_counts {
        if count < eps1 {
            continue;
        }
        let members = [v, w];
        let shared = nbrs.shared(&members);
        if !closure_reaches_lambda(&shared, &members, &inv, eps1, cfg.lambda) {
            level1.push(Simplex::new(vec![v, w]));
        }
    }
    level1.sort_unstable();
    levels.push(level1);

    for k in 2..=cfg.k_max {
        let eps_k = cfg.epsilon_for(k, eta);
        let prev = &levels[k - 1];
        let prev_set: HashSet<&[u32]> = prev.iter().map(|s| s.vertices()).collect();
        let mut next: Vec<Simplex> = Vec::new();
        for s in prev {
            let members = s.vertices();
            let top = *members.last().expect("non-empty simplex");
            let shared = nbrs.shared(members);
            // Extension counts: |shared(S ∪ {t})| = #{u in shared(S) : t in T(u)}.
            let mut ext: HashMap<u32, u32> = HashMap::new();
            for u in &shared {
                let Some(ts) = inv.get(u) else { continue };
                for &t in ts {
                    if t > top {
                        *ext.entry(t).or_insert(0) += 1;
                    }
                }
            }
            let mut candidates: Vec<u32> = ext
                .into_iter()
                .filter(|&(_, c)| c >= eps_k)
                .map(|(t, _)| t)
                .collect();
            candidates.sort_unstable();
            'cand: for t in candidates {
                let mut verts = members.to_vec();
                verts.push(t);
                let cand = Simplex::new(verts);
                let shared_cand = nbrs.shared(cand.vertices());
                if closure_reaches_lambda(
                    &shared_cand,
                    cand.vertices(),
                    &inv,
                    eps_k,
                    cfg.lambda,
                ) {
                    continue;
                }
                // Downward-closure repair: the drop-max face is `s` itself;
                // every other face must also have survived level k-1.
                for face in cand.faces() {
                    if !prev_set.contains(face.vertices()) {
                        continue 'cand;
                    }
                }
                next.push(cand);
            }
        }
        // Extending from the drop-max face with t > max(S) yields each
        // candidate exactly once, so no dedup is needed.
        next.sort_unstable();
        levels.push(next);
    }
    levels
}

/// Ratio of 2-simplices to 1-simplices; 0 when there are no 1-simplices.
pub fn gamma_ratio(levels: &[Vec<Simplex>]) -> f64 {
    let edges = levels.get(1).map_or(0, |l| l.len());
    let tris = levels.get(2).map_or(0, |l| l.len());
    if edges == 0 {
        0.0
    } else {
        tris as f64 / edges as f64
    }
}

#[cfg(test)]
mod tests {
    use super::super::neighbors::eta_hop_neighbor_map;
    use super::*;
    use crate::graph::{Edge, Splits};

    /// Targets 0..n-1 (type "t"), one hub per group (type "h") adjacent to the
    /// listed targets.
    fn hub_graph(n_targets: u32, groups: &[&[u32]]) -> HeteroGraph {
        let n = n_targets + groups.len() as u32;
        let mut types = vec![0u32; n_targets as usize];
        types.extend(std::iter::repeat_n(1, groups.len()));
        let mut edges = Vec::new();
        for (gi, members) in groups.iter().enumerate() {
            let hub = n_targets + gi as u32;
            for &t in *members {
                edges.push(Edge { src: t, dst: hub, etype: 0 });
            }
        }
        HeteroGraph::new(
            types,
            vec!["t".into(), "h".into()],
            vec!["e".into()],
            vec!["c".into()],
            edges,
            vec![None; n as usize],
            0,
            (0..n)
                .map(|v| if v < n_targets { Some(0) } else { None })
                .collect(),
            Splits::default(),
        )
        .unwrap()
    }

    fn cfg(eps: u32, lambda: usize, k_max: usize) -> LiftConfig {
        LiftConfig {
            k_max,
            eta_max: 1,
            epsilon: vec![vec![eps]],
            lambda,
            ef_enabled: false,
        }
    }

    fn verts(levels: &[Vec<Simplex>], k: usize) -> Vec<Vec<u32>> {
        levels[k].iter().map(|s| s.vertices().to_vec()).collect()
    }

    #[test]
    fn three_targets_one_hub_builds_triangle() {
        let g = hub_graph(3, &[&[0, 1, 2]]);
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = enumerate_complex(&g, &cfg(1, 10, 2), &nbrs);
        assert_eq!(verts(&levels, 0), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(verts(&levels, 1), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(verts(&levels, 2), vec![vec![0, 1, 2]]);
        assert!((gamma_ratio(&levels) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cap_drops_group_and_its_faces() {
        // E({i,j}) = {0,1,2} for every pair, so λ=3 kills levels 1 and 2.
        let g = hub_graph(3, &[&[0, 1, 2]]);
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = enumerate_complex(&g, &cfg(1, 3, 2), &nbrs);
        assert_eq!(levels[0].len(), 3);
        assert!(levels[1].is_empty());
        assert!(levels[2].is_empty());
        assert_eq!(gamma_ratio(&levels), 0.0);
    }

    #[test]
    fn no_sharing_yields_only_vertices() {
        let g = hub_graph(4, &[&[0], &[1], &[2], &[3]]);
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = enumerate_complex(&g, &cfg(1, 10, 2), &nbrs);
        assert_eq!(levels[0].len(), 4);
        assert!(levels[1].is_empty());
        assert!(levels[2].is_empty());
    }

    #[test]
    fn epsilon_two_requires_two_shared_hubs() {
        // {0,1} share hubs A and B; {1,2} share only C.
        let g = hub_graph(3, &[&[0, 1], &[0, 1], &[1, 2]]);
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = enumerate_complex(&g, &cfg(2, 10, 2), &nbrs);
        assert_eq!(verts(&levels, 1), vec![vec![0, 1]]);
        assert!(levels[2].is_empty());
    }

    #[test]
    fn large_hub_skip_matches_explicit_rejection() {
        // Hub A spans 5 targets; {0,1} additionally share small hub B. With
        // ε=1, λ=5 the closure of every pair through A has 5 members, so
        // nothing survives, whether generated from B or skipped at A.
        let g = hub_graph(6, &[&[0, 1, 2, 3, 4], &[0, 1]]);
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = enumerate_complex(&g, &cfg(1, 5, 2), &nbrs);
        assert!(levels[1].is_empty());
        // Raising λ above the group size admits everything in the group.
        let levels = enumerate_complex(&g, &cfg(1, 6, 2), &nbrs);
        assert_eq!(levels[1].len(), 10);
        assert_eq!(levels[2].len(), 10);
    }

    #[test]
    fn downward_closure_holds_after_cap() {
        // Pairs {0,1},{0,2},{1,2} via one shared hub each; triangle candidate
        // {0,1,2} would need a shared hub of all three, absent here, so the
        // complex is three edges and no triangle; all faces present.
        let g = hub_graph(3, &[&[0, 1], &[0, 2], &[1, 2]]);
        let nbrs = eta_hop_neighbor_map(&g, 1);
        let levels = enumerate_complex(&g, &cfg(1, 10, 2), &nbrs);
        assert_eq!(levels[1].len(), 3);
        assert!(levels[2].is_empty());
        for level in 1..levels.len() {
            let below: HashSet<&[u32]> =
                levels[level - 1].iter().map(|s| s.vertices()).collect();
            for s in &levels[level] {
                for face in s.faces() {
                    assert!(below.contains(face.vertices()));
                }
            }
        }
    }

    #[test]
    fn eta_two_uses_second_hop_sharing() {
        // Targets 0,1; hubs 2,3; second-tier node 4 adjacent to both hubs.
        // At η=2 both targets reach node 4, so {0,1} forms a 1-simplex even
        // though they share no 1-hop neighbor.
        let g = HeteroGraph::new(
            vec![0, 0, 1, 1, 2],
            vec!["t".into(), "h".into(), "s".into()],
            vec!["e".into()],
            vec!["c".into()],
            vec![
                Edge { src: 0, dst: 2, etype: 0 },
                Edge { src: 1, dst: 3, etype: 0 },
                Edge { src: 2, dst: 4, etype: 0 },
                Edge { src: 3, dst: 4, etype: 0 },
            ],
            vec![None; 5],
            0,
            vec![Some(0), Some(0), None, None, None],
            Splits::default(),
        )
        .unwrap();
        let n1 = eta_hop_neighbor_map(&g, 1);
        let lv1 = enumerate_complex(&g, &cfg(1, 10, 1), &n1);
        assert!(lv1[1].is_empty());
        let n2 = eta_hop_neighbor_map(&g, 2);
        let mut c2 = cfg(1, 10, 1);
        c2.eta_max = 2;
        c2.epsilon = vec![vec![1], vec![1]];
        let lv2 = enumerate_complex(&g, &c2, &n2);
        assert_eq!(verts(&lv2, 1), vec![vec![0, 1]]);
    }
}
