//! Hop-scale neighborhoods: for each target node, the non-target nodes at
//! shortest-path distance exactly η in the undirected graph.

use std::collections::{HashMap, VecDeque};

use crate::graph::HeteroGraph;

/// Per-target sets of non-target nodes at distance exactly η.
#[derive(Debug, Clone)]
pub struct NeighborMap {
    eta: usize,
    /// Target id -> sorted neighbor ids.
    sets: HashMap<u32, Vec<u32>>,
}

impl NeighborMap {
    pub fn eta(&self) -> usize {
        self.eta
    }

    /// Sorted neighbors of target `v`; empty for isolated targets.
    pub fn get(&self, v: u32) -> &[u32] {
        self.sets.get(&v).map(|s| s.as_slice()).unwrap_or(&[])
    }

    /// Sorted intersection of the neighbor sets of all `vertices`.
    pub fn shared(&self, vertices: &[u32]) -> Vec<u32> {
        let mut it = vertices.iter();
        let first = match it.next() {
            Some(&v) => self.get(v).to_vec(),
            None => return Vec::new(),
        };
        it.fold(first, |acc, &v| intersect_sorted(&acc, self.get(v)))
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Breadth-first distances from every target node; a non-target node belongs
/// to the η-scale set of a target when its distance is exactly η. Distances
/// run through any node type.
pub fn eta_hop_neighbor_map(g: &HeteroGraph, eta: usize) -> NeighborMap {
    assert!(eta >= 1, "eta must be >= 1");
    let n = g.node_count();
    let mut sets = HashMap::new();
    let mut dist: Vec<u32> = vec![u32::MAX; n];
    for v in g.target_nodes() {
        dist.fill(u32::MAX);
        dist[v as usize] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(v);
        let mut found = Vec::new();
        while let Some(x) = queue.pop_front() {
            let dx = dist[x as usize];
            if dx as usize == eta {
                continue;
            }
            for &y in g.neighbors(x) {
                if dist[y as usize] != u32::MAX {
                    continue;
                }
                dist[y as usize] = dx + 1;
                if dx as usize + 1 == eta && !g.is_target(y) {
                    found.push(y);
                }
                queue.push_back(y);
            }
        }
        found.sort_unstable();
        sets.insert(v, found);
    }
    NeighborMap { eta, sets }
}
