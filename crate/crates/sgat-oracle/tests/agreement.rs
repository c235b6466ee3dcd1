//! The fast lift and the subset-enumeration reference must produce the same
//! complex on random heterogeneous graphs.

use proptest::collection::vec;
use proptest::prelude::*;

use sgat_core::synthetic::{random_hetero, SyntheticSpec};
use sgat_core::{enumerate_complex, eta_hop_neighbor_map, HeteroGraph, LiftConfig};
use sgat_oracle::brute_force_simplices;

fn fast_lift(g: &HeteroGraph, cfg: &LiftConfig, eta: usize) -> Vec<Vec<Vec<u32>>> {
    let nbrs = eta_hop_neighbor_map(g, eta);
    enumerate_complex(g, cfg, &nbrs)
        .into_iter()
        .map(|lvl| lvl.into_iter().map(|s| s.vertices().to_vec()).collect())
        .collect()
}

fn assert_same_complex(g: &HeteroGraph, cfg: &LiftConfig) {
    for eta in 1..=cfg.eta_max {
        let fast = fast_lift(g, cfg, eta);
        let brute = brute_force_simplices(g, cfg, eta);
        assert_eq!(
            fast, brute,
            "complex mismatch at eta {eta} (k_max {}, lambda {}, eps {:?})",
            cfg.k_max, cfg.lambda, cfg.epsilon
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_brute_force_on_random_graphs(
        seed in any::<u64>(),
        target_count in 4usize..=16,
        hub_count in 3usize..=12,
        second_tier_count in 0usize..=6,
        edge_prob in 0.1f64..0.5,
        second_prob in 0.2f64..0.6,
        k_max in 1usize..=3,
        eta_max in 1usize..=2,
        eps_rows in vec(vec(1u32..=3, 3), 2),
        lambda_off in 0usize..=5,
    ) {
        let spec = SyntheticSpec {
            target_count,
            hub_count,
            second_tier_count,
            edge_prob,
            second_prob,
            feature_dim: 3,
            class_count: 2,
        };
        let g = random_hetero(&spec, seed);
        let cfg = LiftConfig {
            k_max,
            eta_max,
            epsilon: eps_rows[..eta_max]
                .iter()
                .map(|row| row[..k_max].to_vec())
                .collect(),
            lambda: (k_max + 1 + lambda_off).min(8),
            ef_enabled: false,
        };
        cfg.validate().unwrap();
        assert_same_complex(&g, &cfg);
    }
}

/// Fixed sweep across the whole cap range so every admissible lambda value
/// is exercised deterministically.
#[test]
fn matches_brute_force_across_cap_range() {
    for seed in 0..6u64 {
        let spec = SyntheticSpec {
            target_count: 10,
            hub_count: 6,
            second_tier_count: 3,
            edge_prob: 0.35,
            second_prob: 0.4,
            feature_dim: 3,
            class_count: 2,
        };
        let g = random_hetero(&spec, seed);
        for k_max in [1usize, 2] {
            for lambda in k_max + 1..=8 {
                for eps in 1..=3u32 {
                    let cfg = LiftConfig {
                        k_max,
                        eta_max: 2,
                        epsilon: vec![vec![eps; k_max]; 2],
                        lambda,
                        ef_enabled: false,
                    };
                    assert_same_complex(&g, &cfg);
                }
            }
        }
    }
}
