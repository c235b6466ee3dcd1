//! The assembled lift output: per hop scale, the simplex lists, feature
//! matrices and upper adjacencies; plus the hop-scale-independent global
//! simplex index used to align the same simplex across scales.
//!
//! On-disk layout under a bundle directory, one subdirectory per hop scale:
//!
//! * `eta{η}/simplices_k{k}.tsv` - one simplex per line, vertices tab-separated
//! * `eta{η}/features_k{k}.bin` - u64 rows, u64 cols, then row-major f64, all little-endian
//! * `eta{η}/upper_adj_k{k}.tsv` - `i<TAB>j<TAB>connecting_id`, self-loops included
//!
//! Levels run 0..=K with adjacency files for 0..K; K and η_max are inferred
//! from the files present.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::CoreError;
use crate::graph::{build_edge_features, HeteroGraph};

use super::adjacency::{build_upper_adjacency, UpperAdjacency};
use super::enumerate::enumerate_complex;
use super::features::{assign_simplex_features, augment_edge_features};
use super::neighbors::eta_hop_neighbor_map;
use super::{DenseMatrix, LiftConfig, Simplex};

/// The complex at one hop scale η: levels 0..=K with features and upper
/// adjacencies (levels 0..K).
#[derive(Debug, Clone, PartialEq)]
pub struct EtaComplex {
    pub eta: usize,
    pub levels: Vec<Vec<Simplex>>,
    pub features: Vec<DenseMatrix>,
    pub adjacency: Vec<UpperAdjacency>,
}

/// Hop-scale-independent index of the simplices present at a level: the
/// sorted union across scales. A simplex is identified by its vertex tuple,
/// so the same tuple at two scales maps to one global row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalIndex {
    pub simplices: Vec<Simplex>,
    /// `membership[η-1][local_row]` = global row of that scale's simplex.
    pub membership: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplexBundle {
    pub k_max: usize,
    pub eta_max: usize,
    /// Indexed by η-1.
    pub per_eta: Vec<EtaComplex>,
    /// Indexed by level k.
    pub global: Vec<GlobalIndex>,
}

impl SimplicialComplexBundle {
    /// Runs the full lift: neighborhoods, enumeration, features (optionally
    /// edge-augmented at level 1), adjacency, global index.
    pub fn build(g: &HeteroGraph, cfg: &LiftConfig) -> Result<Self, CoreError> {
        cfg.validate()?;
        let table = if cfg.ef_enabled {
            Some(build_edge_features(g))
        } else {
            None
        };
        let mut per_eta = Vec::with_capacity(cfg.eta_max);
        for eta in 1..=cfg.eta_max {
            let nbrs = eta_hop_neighbor_map(g, eta);
            let levels = enumerate_complex(g, cfg, &nbrs);
            let mut features = assign_simplex_features(g, &levels, &nbrs)?;
            if let Some(table) = &table {
                features[1] = augment_edge_features(g, table, &levels, &nbrs)?;
            }
            let adjacency = build_upper_adjacency(&levels);
            per_eta.push(EtaComplex {
                eta,
                levels,
                features,
                adjacency,
            });
        }
        let global = build_global(cfg.k_max, &per_eta);
        Ok(Self {
            k_max: cfg.k_max,
            eta_max: cfg.eta_max,
            per_eta,
            global,
        })
    }

    /// Global simplex count at level k.
    pub fn tau(&self, k: usize) -> usize {
        self.global[k].simplices.len()
    }

    pub fn save(&self, dir: &Path) -> Result<(), CoreError> {
        for ec in &self.per_eta {
            let sub = dir.join(format!("eta{}", ec.eta));
            fs::create_dir_all(&sub).map_err(|e| CoreError::io(&sub, e))?;
            for (k, level) in ec.levels.iter().enumerate() {
                let mut text = String::new();
                for s in level {
                    let verts: Vec<String> =
                        s.vertices().iter().map(|v| v.to_string()).collect();
                    text.push_str(&verts.join("\t"));
                    text.push('\n');
                }
                let p = sub.join(format!("simplices_k{k}.tsv"));
                fs::write(&p, text).map_err(|e| CoreError::io(&p, e))?;

                let m = &ec.features[k];
                let mut bytes =
                    Vec::with_capacity(16 + m.data.len() * std::mem::size_of::<f64>());
                bytes.extend_from_slice(&(m.rows as u64).to_le_bytes());
                bytes.extend_from_slice(&(m.cols as u64).to_le_bytes());
                for x in &m.data {
                    bytes.extend_from_slice(&x.to_le_bytes());
                }
                let p = sub.join(format!("features_k{k}.bin"));
                fs::write(&p, bytes).map_err(|e| CoreError::io(&p, e))?;
            }
            for (k, adj) in ec.adjacency.iter().enumerate() {
                let mut text = String::new();
                for (i, j, c) in adj.entries() {
                    text.push_str(&format!("{i}\t{j}\t{c}\n"));
                }
                let p = sub.join(format!("upper_adj_k{k}.tsv"));
                fs::write(&p, text).map_err(|e| CoreError::io(&p, e))?;
            }
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, CoreError> {
        let malformed = |p: &Path, msg: String| CoreError::MalformedBundle {
            path: p.to_path_buf(),
            msg,
        };
        if !dir.is_dir() {
            return Err(CoreError::MissingFile(dir.to_path_buf()));
        }
        let mut per_eta = Vec::new();
        let mut k_max: Option<usize> = None;
        for eta in 1.. {
            let sub = dir.join(format!("eta{eta}"));
            if !sub.is_dir() {
                break;
            }
            let mut levels = Vec::new();
            let mut features = Vec::new();
            for k in 0.. {
                let sp = sub.join(format!("simplices_k{k}.tsv"));
                if !sp.is_file() {
                    break;
                }
                let level = load_simplices(&sp, k)?;
                let fp = sub.join(format!("features_k{k}.bin"));
                let feats = load_features(&fp)?;
                if feats.rows != level.len() {
                    return Err(malformed(
                        &fp,
                        format!(
                            "{} feature rows for {} simplices",
                            feats.rows,
                            level.len()
                        ),
                    ));
                }
                levels.push(level);
                features.push(feats);
            }
            if levels.len() < 2 {
                return Err(malformed(
                    &sub,
                    format!("expected levels 0..=K with K >= 1, found {}", levels.len()),
                ));
            }
            let this_k = levels.len() - 1;
            match k_max {
                None => k_max = Some(this_k),
                Some(k) if k != this_k => {
                    return Err(malformed(
                        &sub,
                        format!("level count K={this_k} differs from earlier scales (K={k})"),
                    ));
                }
                Some(_) => {}
            }
            let mut adjacency = Vec::new();
            for k in 0..this_k {
                let ap = sub.join(format!("upper_adj_k{k}.tsv"));
                let adj = load_adjacency(&ap, &levels[k], &levels[k + 1])?;
                adjacency.push(adj);
            }
            per_eta.push(EtaComplex {
                eta,
                levels,
                features,
                adjacency,
            });
        }
        let Some(k_max) = k_max else {
            return Err(malformed(dir, "no eta1 subdirectory".into()));
        };
        let eta_max = per_eta.len();
        let global = build_global(k_max, &per_eta);
        Ok(Self {
            k_max,
            eta_max,
            per_eta,
            global,
        })
    }
}

fn build_global(k_max: usize, per_eta: &[EtaComplex]) -> Vec<GlobalIndex> {
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let union: BTreeSet<&Simplex> =
            per_eta.iter().flat_map(|ec| ec.levels[k].iter()).collect();
        let simplices: Vec<Simplex> = union.into_iter().cloned().collect();
        let membership = per_eta
            .iter()
            .map(|ec| {
                ec.levels[k]
                    .iter()
                    .map(|s| {
                        simplices
                            .binary_search(s)
                            .expect("every local simplex is in the union") as u32
                    })
                    .collect()
            })
            .collect();
        out.push(GlobalIndex {
            simplices,
            membership,
        });
    }
    out
}

fn load_simplices(path: &Path, k: usize) -> Result<Vec<Simplex>, CoreError> {
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut out = Vec::new();
    let mut prev: Option<Vec<u32>> = None;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut verts = Vec::new();
        for piece in line.split('\t') {
            let v: u32 = piece.trim().parse().map_err(|_| CoreError::MalformedBundle {
                path: path.to_path_buf(),
                msg: format!("line {}: bad vertex id `{piece}`", lineno + 1),
            })?;
            verts.push(v);
        }
        let bad = verts.len() != k + 1 || verts.windows(2).any(|w| w[0] >= w[1]);
        if bad {
            return Err(CoreError::MalformedBundle {
                path: path.to_path_buf(),
                msg: format!(
                    "line {}: expected {} strictly increasing vertices",
                    lineno + 1,
                    k + 1
                ),
            });
        }
        if let Some(p) = &prev {
            if p.as_slice() >= verts.as_slice() {
                return Err(CoreError::MalformedBundle {
                    path: path.to_path_buf(),
                    msg: format!("line {}: simplices out of order", lineno + 1),
                });
            }
        }
        prev = Some(verts.clone());
        out.push(Simplex::new(verts));
    }
    Ok(out)
}

fn load_features(path: &Path) -> Result<DenseMatrix, CoreError> {
    if !path.is_file() {
        return Err(CoreError::MissingFile(path.to_path_buf()));
    }
    let bytes = fs::read(path).map_err(|e| CoreError::io(path, e))?;
    let malformed = |msg: String| CoreError::MalformedBundle {
        path: path.to_path_buf(),
        msg,
    };
    if bytes.len() < 16 {
        return Err(malformed("missing rows/cols header".into()));
    }
    let rows = u64::from_le_bytes(bytes[0..8].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let expect = 16 + rows * cols * std::mem::size_of::<f64>();
    if bytes.len() != expect {
        return Err(malformed(format!(
            "expected {expect} bytes for a {rows}x{cols} matrix, found {}",
            bytes.len()
        )));
    }
    let data = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DenseMatrix { rows, cols, data })
}

fn load_adjacency(
    path: &Path,
    level: &[Simplex],
    above: &[Simplex],
) -> Result<UpperAdjacency, CoreError> {
    if !path.is_file() {
        return Err(CoreError::MissingFile(path.to_path_buf()));
    }
    let malformed = |msg: String| CoreError::MalformedBundle {
        path: path.to_path_buf(),
        msg,
    };
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let n = level.len();
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        let nums: Option<Vec<u32>> =
            parts.iter().map(|p| p.trim().parse().ok()).collect();
        let nums = match nums {
            Some(v) if v.len() == 3 => v,
            _ => {
                return Err(malformed(format!(
                    "line {}: expected `i<TAB>j<TAB>connecting_id`",
                    lineno + 1
                )))
            }
        };
        let (i, j, c) = (nums[0], nums[1], nums[2]);
        if i as usize >= n || j as usize >= n {
            return Err(malformed(format!(
                "line {}: simplex id out of range (n={n})",
                lineno + 1
            )));
        }
        if i == j {
            if c != i {
                return Err(malformed(format!(
                    "line {}: self-loop must connect through itself",
                    lineno + 1
                )));
            }
        } else {
            let Some(parent) = above.get(c as usize) else {
                return Err(malformed(format!(
                    "line {}: connecting id {c} out of range",
                    lineno + 1
                )));
            };
            let mut union: Vec<u32> = level[i as usize]
                .vertices()
                .iter()
                .chain(level[j as usize].vertices())
                .copied()
                .collect();
            union.sort_unstable();
            union.dedup();
            if union != parent.vertices() {
                return Err(malformed(format!(
                    "line {}: connecting simplex is not the vertex union",
                    lineno + 1
                )));
            }
        }
        entries.push((i, j, c));
    }
    let mut mirrored = entries.clone();
    mirrored.sort_unstable();
    for &(i, j, c) in &entries {
        if i != j && mirrored.binary_search(&(j, i, c)).is_err() {
            return Err(malformed(format!("entry ({i},{j}) has no mirror")));
        }
    }
    for i in 0..n as u32 {
        if mirrored.binary_search(&(i, i, i)).is_err() {
            return Err(malformed(format!("missing self-loop for simplex {i}")));
        }
    }
    Ok(UpperAdjacency::from_entries(n, entries))
}
