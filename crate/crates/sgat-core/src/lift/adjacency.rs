//! Upper adjacency between k-simplices: two distinct k-simplices are
//! neighbors when they are faces of the same stored (k+1)-simplex, which is
//! then their connecting simplex (their vertex union, hence unique). Every
//! simplex is also its own neighbor; the connecting simplex of a self-loop is
//! the simplex itself.

use std::collections::HashMap;

use super::Simplex;

/// Symmetric sparse neighborhood structure in compressed sparse row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperAdjacency {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    /// Parallel to `cols`. Off-diagonal: id of the connecting (k+1)-simplex.
    /// Diagonal: the row's own k-simplex id.
    conn: Vec<u32>,
}

impl UpperAdjacency {
    /// Number of k-simplices (rows).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries, self-loops included.
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Neighbor columns and connecting ids of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> (&[u32], &[u32]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.cols[lo..hi], &self.conn[lo..hi])
    }

    /// All `(row, col, connecting)` triples in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, conn) = self.row(i);
            cols.iter()
                .zip(conn)
                .map(move |(&j, &c)| (i as u32, j, c))
        })
    }

    /// Builds from triples; adds nothing, the caller provides self-loops.
    pub fn from_entries(n: usize, mut entries: Vec<(u32, u32, u32)>) -> Self {
        entries.sort_unstable();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut conn = Vec::with_capacity(entries.len());
        for &(i, j, c) in &entries {
            row_ptr[i as usize + 1] += 1;
            cols.push(j);
            conn.push(c);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let out = Self { n, row_ptr, cols, conn };
        debug_assert!(out.well_formed(), "duplicate or unsorted adjacency entry");
        out
    }

    fn well_formed(&self) -> bool {
        (0..self.n).all(|i| {
            let (cols, _) = self.row(i);
            cols.windows(2).all(|w| w[0] < w[1])
        })
    }
}

/// Upper adjacency for every level that has a level above it: output `a`
/// satisfies `a[k]` = adjacency among level-k simplices through level-(k+1)
/// simplices, for k in `0..levels.len()-1`.
///
/// Requires a downward-closed complex: every face of a stored simplex must be
/// stored.
pub fn build_upper_adjacency(levels: &[Vec<Simplex>]) -> Vec<UpperAdjacency> {
    let mut out = Vec::new();
    for k in 0..levels.len().saturating_sub(1) {
        let ids: HashMap<&[u32], u32> = levels[k]
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertices(), i as u32))
            .collect();
        let mut entries: Vec<(u32, u32, u32)> = Vec::new();
        for (sid, parent) in levels[k + 1].iter().enumerate() {
            let face_ids: Vec<u32> = parent
                .faces()
                .map(|f| {
                    *ids.get(f.vertices())
                        .expect("complex is downward closed")
                })
                .collect();
            for a in 0..face_ids.len() {
                for b in a + 1..face_ids.len() {
                    entries.push((face_ids[a], face_ids[b], sid as u32));
                    entries.push((face_ids[b], face_ids[a], sid as u32));
                }
            }
        }
        for i in 0..levels[k].len() as u32 {
            entries.push((i, i, i));
        }
        out.push(UpperAdjacency::from_entries(levels[k].len(), entries));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplices(vs: &[&[u32]]) -> Vec<Simplex> {
        vs.iter().map(|v| Simplex::new(v.to_vec())).collect()
    }

    #[test]
    fn triangle_edges_are_fully_upper_adjacent() {
        let levels = vec![
            simplices(&[&[0], &[1], &[2]]),
            simplices(&[&[0, 1], &[0, 2], &[1, 2]]),
            simplices(&[&[0, 1, 2]]),
        ];
        let adj = build_upper_adjacency(&levels);
        assert_eq!(adj.len(), 2);
        let a1 = &adj[1];
        assert_eq!(a1.n(), 3);
        assert_eq!(a1.nnz(), 9);
        for i in 0..3 {
            let (cols, conn) = a1.row(i);
            assert_eq!(cols, &[0, 1, 2]);
            for (&j, &c) in cols.iter().zip(conn) {
                if j as usize == i {
                    assert_eq!(c, i as u32); // self-loop carries own id
                } else {
                    assert_eq!(c, 0); // the triangle
                }
            }
        }
    }

    #[test]
    fn disjoint_edges_only_self_loop() {
        let levels = vec![
            simplices(&[&[0], &[1], &[2], &[3]]),
            simplices(&[&[0, 1], &[2, 3]]),
        ];
        let adj = build_upper_adjacency(&levels);
        let a1 = build_upper_adjacency(&levels[1..]);
        assert!(a1.is_empty()); // level 1 alone has nothing above it
        let a0 = &adj[0];
        assert_eq!(a0.n(), 4);
        // Vertices of each edge are mutually adjacent; cross-edge pairs not.
        let (cols, conn) = a0.row(0);
        assert_eq!(cols, &[0, 1]);
        assert_eq!(conn, &[0, 0]); // self then edge {0,1} (id 0)
        let (cols, _) = a0.row(2);
        assert_eq!(cols, &[2, 3]);
    }

    #[test]
    fn vertex_adjacency_follows_lifted_edges_not_raw_graph() {
        // Level 1 contains only {0,2}: vertices 0 and 1 are not upper
        // adjacent even if the raw graph connected them.
        let levels = vec![
            simplices(&[&[0], &[1], &[2]]),
            simplices(&[&[0, 2]]),
        ];
        let a0 = &build_upper_adjacency(&levels)[0];
        let (cols, _) = a0.row(0);
        assert_eq!(cols, &[0, 2]);
        let (cols, _) = a0.row(1);
        assert_eq!(cols, &[1]);
    }

    #[test]
    fn symmetry_and_unit_diagonal() {
        let levels = vec![
            simplices(&[&[0], &[1], &[2], &[3]]),
            simplices(&[&[0, 1], &[0, 2], &[1, 2], &[1, 3]]),
            simplices(&[&[0, 1, 2]]),
        ];
        for a in build_upper_adjacency(&levels) {
            let entries: Vec<_> = a.entries().collect();
            for &(i, j, c) in &entries {
                if i == j {
                    assert_eq!(c, i);
                } else {
                    assert!(
                        entries.contains(&(j, i, c)),
                        "missing mirror of ({i},{j})"
                    );
                }
            }
            for i in 0..a.n() {
                let (cols, _) = a.row(i);
                assert!(cols.contains(&(i as u32)));
            }
        }
    }

    #[test]
    fn connecting_simplex_is_vertex_union() {
        let levels = vec![
            simplices(&[&[0], &[1], &[2], &[3]]),
            simplices(&[&[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3]]),
            simplices(&[&[0, 1, 2], &[1, 2, 3]]),
        ];
        let a1 = &build_upper_adjacency(&levels)[1];
        for (i, j, c) in a1.entries() {
            if i == j {
                continue;
            }
            let mut union: Vec<u32> = levels[1][i as usize]
                .vertices()
                .iter()
                .chain(levels[1][j as usize].vertices())
                .copied()
                .collect();
            union.sort_unstable();
            union.dedup();
            assert_eq!(union, levels[2][c as usize].vertices());
        }
        // Edges {0,1} and {2,3} share no triangle: not adjacent.
        let (cols, _) = a1.row(0);
        assert!(!cols.contains(&5));
    }
}
