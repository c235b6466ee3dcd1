use std::collections::BTreeSet;
use std::collections::VecDeque;

use sgat_core::{HeteroGraph, LiftConfig};

/// Enumerates the complex at one hop scale by testing every target subset of
/// size <= k_max+1 against the shared-neighbor threshold and the closure cap,
/// then repairing downward closure level by level. Level k of the result
/// holds sorted vertex tuples in lexicographic order.
///
/// Panics on graphs with more than 32 targets or 128 non-targets; the
/// exponential subset walk is only meant for test inputs.
pub fn brute_force_simplices(
    g: &HeteroGraph,
    cfg: &LiftConfig,
    eta: usize,
) -> Vec<Vec<Vec<u32>>> {
    let targets = g.target_nodes();
    assert!(
        targets.len() <= 32,
        "brute-force lift refuses {} targets (limit 32)",
        targets.len()
    );
    let non_targets: Vec<u32> = (0..g.node_count() as u32)
        .filter(|&v| !g.is_target(v))
        .collect();
    assert!(
        non_targets.len() <= 128,
        "brute-force lift refuses {} non-targets (limit 128)",
        non_targets.len()
    );
    let mut bit_of = vec![usize::MAX; g.node_count()];
    for (i, &v) in non_targets.iter().enumerate() {
        bit_of[v as usize] = i;
    }

    // Own adjacency and BFS so the hop sets are derived from scratch.
    let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); g.node_count()];
    for e in g.edges() {
        if e.src != e.dst {
            adj[e.src as usize].insert(e.dst);
            adj[e.dst as usize].insert(e.src);
        }
    }

    let masks: Vec<u128> = targets
        .iter()
        .map(|&t| {
            let mut mask = 0u128;
            for v in ring_at(&adj, t, eta) {
                if bit_of[v as usize] != usize::MAX {
                    mask |= 1u128 << bit_of[v as usize];
                }
            }
            mask
        })
        .collect();

    let mut levels: Vec<Vec<Vec<u32>>> = Vec::with_capacity(cfg.k_max + 1);
    levels.push(targets.iter().map(|&t| vec![t]).collect());

    for k in 1..=cfg.k_max {
        let eps = cfg.epsilon_for(k, eta);
        let mut admitted: Vec<Vec<u32>> = Vec::new();
        for_each_combination(targets.len(), k + 1, &mut |combo| {
            let shared = combo.iter().fold(u128::MAX, |m, &i| m & masks[i]);
            if shared.count_ones() < eps {
                return;
            }
            // Closure group: the members plus every outside target that still
            // clears the threshold when added.
            let mut group = combo.len();
            for (i, m) in masks.iter().enumerate() {
                if !combo.contains(&i) && (shared & m).count_ones() >= eps {
                    group += 1;
                }
            }
            if group >= cfg.lambda {
                return;
            }
            admitted.push(combo.iter().map(|&i| targets[i]).collect());
        });

        if k >= 2 {
            let floor: BTreeSet<&[u32]> =
                levels[k - 1].iter().map(|s| s.as_slice()).collect();
            admitted.retain(|s| {
                (0..s.len()).all(|drop| {
                    let face: Vec<u32> = s
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != drop)
                        .map(|(_, &v)| v)
                        .collect();
                    floor.contains(face.as_slice())
                })
            });
        }
        levels.push(admitted);
    }
    levels
}

/// Non-target nodes at shortest-path distance exactly `eta` from `start`.
fn ring_at(adj: &[BTreeSet<u32>], start: u32, eta: usize) -> Vec<u32> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[start as usize] = 0;
    let mut queue = VecDeque::from([start]);
    let mut ring = Vec::new();
    while let Some(v) = queue.pop_front() {
        if dist[v as usize] == eta {
            ring.push(v);
            continue;
        }
        for &w in &adj[v as usize] {
            if dist[w as usize] == usize::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    ring
}

/// Calls `f` with every size-`k` index combination of `0..n` in
/// lexicographic order.
fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        f(&combo);
        // Advance the rightmost index that still has room.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if combo[i] + (k - i) < n {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}
