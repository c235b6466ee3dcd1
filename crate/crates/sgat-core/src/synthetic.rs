//! Deterministic synthetic heterogeneous graphs for tests, sweeps and
//! timing runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::graph::{Edge, HeteroGraph, Splits};

/// Shape of a random three-tier graph: targets, hubs, and a second tier
/// behind the hubs (giving η=2 structure).
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub target_count: usize,
    pub hub_count: usize,
    pub second_tier_count: usize,
    /// Probability of a target-hub edge.
    pub edge_prob: f64,
    /// Probability of a hub-second-tier edge.
    pub second_prob: f64,
    pub feature_dim: usize,
    pub class_count: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            target_count: 12,
            hub_count: 8,
            second_tier_count: 4,
            edge_prob: 0.3,
            second_prob: 0.4,
            feature_dim: 5,
            class_count: 3,
        }
    }
}

/// Random graph over three node types with standard-normal features, random
/// labels, and a round-robin train/val/test split. Pure function of
/// `(spec, seed)`.
pub fn random_hetero(spec: &SyntheticSpec, seed: u64) -> HeteroGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nt = spec.target_count;
    let nh = spec.hub_count;
    let ns = spec.second_tier_count;
    let n = nt + nh + ns;

    let mut types = vec![0u32; nt];
    types.extend(std::iter::repeat_n(1, nh));
    types.extend(std::iter::repeat_n(2, ns));

    let mut edges = Vec::new();
    for t in 0..nt as u32 {
        for h in 0..nh as u32 {
            if rng.random::<f64>() < spec.edge_prob {
                edges.push(Edge {
                    src: t,
                    dst: nt as u32 + h,
                    etype: 0,
                });
            }
        }
    }
    for h in 0..nh as u32 {
        for s in 0..ns as u32 {
            if rng.random::<f64>() < spec.second_prob {
                edges.push(Edge {
                    src: nt as u32 + h,
                    dst: (nt + nh) as u32 + s,
                    etype: 1,
                });
            }
        }
    }

    let features: Vec<Option<Vec<f64>>> = (0..n)
        .map(|_| {
            Some(
                (0..spec.feature_dim)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect(),
            )
        })
        .collect();

    let labels: Vec<Option<u32>> = (0..n)
        .map(|i| {
            if i < nt {
                Some(rng.random_range(0..spec.class_count as u32))
            } else {
                None
            }
        })
        .collect();

    let mut splits = Splits::default();
    for t in 0..nt as u32 {
        match t % 3 {
            0 => splits.train.push(t),
            1 => splits.val.push(t),
            _ => splits.test.push(t),
        }
    }

    HeteroGraph::new(
        types,
        vec!["target".into(), "hub".into(), "second".into()],
        vec!["th".into(), "hs".into()],
        (0..spec.class_count).map(|c| format!("c{c}")).collect(),
        edges,
        features,
        0,
        labels,
        splits,
    )
    .expect("synthetic graph is well formed")
}

/// Two separable clusters: class-c targets attach to class-c hubs only, and
/// target features are the class indicator plus noise, so a trained model
/// should classify the validation set perfectly once the lift connects
/// same-class targets.
pub fn two_class_toy(
    per_class: usize,
    hubs_per_class: usize,
    noise: f64,
    seed: u64,
) -> HeteroGraph {
    assert!(per_class >= 2 && hubs_per_class >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nt = 2 * per_class;
    let nh = 2 * hubs_per_class;
    let d = 4;

    let mut types = vec![0u32; nt];
    types.extend(std::iter::repeat_n(1, nh));

    // Target i of class c connects to two consecutive hubs of its class, so
    // consecutive targets share a hub and the cluster is connected.
    let mut edges = Vec::new();
    for i in 0..nt as u32 {
        let class = (i as usize / per_class) as u32;
        let base = nt as u32 + class * hubs_per_class as u32;
        let local = i as usize % per_class;
        for off in [local % hubs_per_class, (local + 1) % hubs_per_class] {
            let hub = base + off as u32;
            let e = Edge { src: i, dst: hub, etype: 0 };
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
    }

    let features: Vec<Option<Vec<f64>>> = (0..nt + nh)
        .map(|i| {
            let class = if i < nt {
                i / per_class
            } else {
                (i - nt) / hubs_per_class
            };
            let mut f = vec![0.0; d];
            f[class] = 1.0;
            for x in f.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *x += noise * z;
            }
            Some(f)
        })
        .collect();

    let labels: Vec<Option<u32>> = (0..nt + nh)
        .map(|i| {
            if i < nt {
                Some((i / per_class) as u32)
            } else {
                None
            }
        })
        .collect();

    // Interleave so both classes appear in every split.
    let mut splits = Splits::default();
    for i in 0..nt as u32 {
        match i % 4 {
            0 | 1 => splits.train.push(i),
            2 => splits.val.push(i),
            _ => splits.test.push(i),
        }
    }

    HeteroGraph::new(
        types,
        vec!["item".into(), "group".into()],
        vec!["member".into()],
        vec!["red".into(), "blue".into()],
        edges,
        features,
        0,
        labels,
        splits,
    )
    .expect("toy graph is well formed")
}

/// `copies` disjoint copies of `g` in one graph: node ids of copy c are
/// offset by `c * g.node_count()`. Features, labels and splits replicate
/// with the same offsets. Lift output therefore scales exactly linearly.
pub fn disjoint_copies(g: &HeteroGraph, copies: usize) -> HeteroGraph {
    assert!(copies >= 1);
    let n = g.node_count() as u32;
    let mut types = Vec::with_capacity(copies * n as usize);
    let mut edges = Vec::new();
    let mut features = Vec::with_capacity(copies * n as usize);
    let mut labels = Vec::with_capacity(copies * n as usize);
    let mut splits = Splits::default();
    for c in 0..copies as u32 {
        let off = c * n;
        for v in 0..n {
            types.push(g.node_type(v));
            features.push(Some(g.feature(v).to_vec()));
            labels.push(g.label(v));
        }
        for e in g.edges() {
            edges.push(Edge {
                src: e.src + off,
                dst: e.dst + off,
                etype: e.etype,
            });
        }
        let s = g.splits();
        splits.train.extend(s.train.iter().map(|&v| v + off));
        splits.val.extend(s.val.iter().map(|&v| v + off));
        splits.test.extend(s.test.iter().map(|&v| v + off));
    }
    HeteroGraph::new(
        types,
        g.node_type_names().to_vec(),
        g.edge_type_names().to_vec(),
        g.class_names().to_vec(),
        edges,
        features,
        g.target_type(),
        labels,
        splits,
    )
    .expect("copies preserve validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::{eta_hop_neighbor_map, LiftConfig, SimplicialComplexBundle};

    #[test]
    fn random_hetero_is_deterministic() {
        let spec = SyntheticSpec::default();
        let a = random_hetero(&spec, 3);
        let b = random_hetero(&spec, 3);
        assert_eq!(a, b);
        let c = random_hetero(&spec, 4);
        assert_ne!(a, c);
        assert_eq!(a.node_count(), 24);
        assert_eq!(a.target_nodes().len(), 12);
    }

    #[test]
    fn two_class_toy_is_separable_by_construction() {
        let g = two_class_toy(6, 3, 0.05, 1);
        assert_eq!(g.target_nodes().len(), 12);
        // Same-class targets share hubs; cross-class targets never do.
        let nbrs = eta_hop_neighbor_map(&g, 1);
        for &v in &g.target_nodes() {
            for &w in &g.target_nodes() {
                if v >= w {
                    continue;
                }
                let shared = nbrs.shared(&[v, w]);
                let same_class = g.label(v) == g.label(w);
                if !same_class {
                    assert!(shared.is_empty(), "{v} and {w} share {shared:?}");
                }
            }
        }
        // Both classes appear in every split.
        let s = g.splits();
        for ids in [&s.train, &s.val, &s.test] {
            let classes: std::collections::HashSet<_> =
                ids.iter().map(|&v| g.label(v).unwrap()).collect();
            assert_eq!(classes.len(), 2, "split {ids:?}");
        }
    }

    #[test]
    fn disjoint_copies_scale_lift_output_linearly() {
        let g = two_class_toy(4, 2, 0.0, 5);
        let cfg = LiftConfig {
            k_max: 2,
            eta_max: 1,
            epsilon: vec![vec![1]],
            lambda: 20,
            ef_enabled: false,
        };
        let b1 = SimplicialComplexBundle::build(&g, &cfg).unwrap();
        let g4 = disjoint_copies(&g, 4);
        assert_eq!(g4.node_count(), 4 * g.node_count());
        let b4 = SimplicialComplexBundle::build(&g4, &cfg).unwrap();
        for k in 0..=2 {
            assert_eq!(
                b4.per_eta[0].levels[k].len(),
                4 * b1.per_eta[0].levels[k].len(),
                "level {k}"
            );
        }
        for k in 0..2 {
            assert_eq!(
                b4.per_eta[0].adjacency[k].nnz(),
                4 * b1.per_eta[0].adjacency[k].nnz()
            );
        }
    }
}
