//! Heterogeneous graph datasets: loading, validation, feature padding,
//! synthetic edge features and randomized node features.
//!
//! On-disk layout of a dataset directory:
//!
//! * `nodes.tsv`  - `node_id<TAB>type_name<TAB>f0,f1,...` (feature field may be empty)
//! * `edges.tsv`  - `src_id<TAB>dst_id<TAB>edge_type_name`
//! * `labels.tsv` - `node_id<TAB>class_name` (labels define the target node type)
//! * `splits.json` - `{"train": [...], "val": [...], "test": [...]}` of target node ids
//!
//! Node ids must form the contiguous range `0..node_count`. Edges are undirected;
//! each input line is stored once in its written orientation.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// One stored (undirected) edge in its written orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    pub etype: u32,
}

/// Train/val/test node id sets over target nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<u32>,
    pub val: Vec<u32>,
    pub test: Vec<u32>,
}

/// A validated heterogeneous graph with per-node features, labels over one
/// target node type, and train/val/test splits.
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroGraph {
    node_types: Vec<u32>,
    node_type_names: Vec<String>,
    edge_type_names: Vec<String>,
    class_names: Vec<String>,
    edges: Vec<Edge>,
    /// Row-major `node_count x feature_dim`.
    features: Vec<f64>,
    feature_dim: usize,
    target_type: u32,
    /// Per-node class id; `None` for non-target nodes.
    labels: Vec<Option<u32>>,
    splits: Splits,
    /// Sorted, deduplicated undirected adjacency lists.
    adjacency: Vec<Vec<u32>>,
}

impl HeteroGraph {
    /// Assembles and validates a graph from parsed parts. `raw_features[i]` is
    /// the feature row of node `i`, `None` when the dataset provides none (the
    /// node-type one-hot fallback is applied during padding).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        node_types: Vec<u32>,
        node_type_names: Vec<String>,
        edge_type_names: Vec<String>,
        class_names: Vec<String>,
        edges: Vec<Edge>,
        raw_features: Vec<Option<Vec<f64>>>,
        target_type: u32,
        labels: Vec<Option<u32>>,
        splits: Splits,
    ) -> Result<Self, CoreError> {
        let n = node_types.len();
        assert_eq!(raw_features.len(), n, "feature rows / node count mismatch");
        assert_eq!(labels.len(), n, "label rows / node count mismatch");

        let (features, feature_dim) =
            pad_features(&raw_features, &node_types, node_type_names.len())?;

        for (i, ty) in node_types.iter().enumerate() {
            if *ty == target_type && labels[i].is_none() {
                return Err(CoreError::UnlabeledTarget { node: i as u32 });
            }
        }

        let mut seen: HashMap<u32, &str> = HashMap::new();
        for (name, ids) in [
            ("train", &splits.train),
            ("val", &splits.val),
            ("test", &splits.test),
        ] {
            for &id in ids {
                if id as usize >= n || node_types[id as usize] != target_type {
                    return Err(CoreError::NonTargetInSplit {
                        split: name.to_string(),
                        node: id,
                    });
                }
                if seen.insert(id, name).is_some() {
                    return Err(CoreError::OverlappingSplits { node: id });
                }
            }
        }

        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.src as usize].push(e.dst);
            adjacency[e.dst as usize].push(e.src);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }

        Ok(Self {
            node_types,
            node_type_names,
            edge_type_names,
            class_names,
            edges,
            features,
            feature_dim,
            target_type,
            labels,
            splits,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_types.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_type(&self, node: u32) -> u32 {
        self.node_types[node as usize]
    }

    pub fn node_type_count(&self) -> usize {
        self.node_type_names.len()
    }

    pub fn node_type_names(&self) -> &[String] {
        &self.node_type_names
    }

    pub fn edge_type_count(&self) -> usize {
        self.edge_type_names.len()
    }

    pub fn edge_type_names(&self) -> &[String] {
        &self.edge_type_names
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn feature(&self, node: u32) -> &[f64] {
        let d = self.feature_dim;
        &self.features[node as usize * d..(node as usize + 1) * d]
    }

    pub fn target_type(&self) -> u32 {
        self.target_type
    }

    pub fn is_target(&self, node: u32) -> bool {
        self.node_types[node as usize] == self.target_type
    }

    /// Target node ids in ascending order.
    pub fn target_nodes(&self) -> Vec<u32> {
        (0..self.node_count() as u32)
            .filter(|&v| self.is_target(v))
            .collect()
    }

    pub fn label(&self, node: u32) -> Option<u32> {
        self.labels[node as usize]
    }

    pub fn splits(&self) -> &Splits {
        &self.splits
    }

    /// Sorted, deduplicated undirected neighbors of `node`.
    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }
}

/// Aligns per-node feature rows to a common width `d`.
///
/// `d` is the maximum over the observed per-type widths and, when any node has
/// no feature row, the node-type count (the width of the one-hot fallback).
/// Rows are zero-padded on the right; existing coordinates are never changed.
/// Nodes without a feature row receive the one-hot encoding of their node type.
pub fn pad_features(
    raw: &[Option<Vec<f64>>],
    node_types: &[u32],
    type_count: usize,
) -> Result<(Vec<f64>, usize), CoreError> {
    let mut type_width: Vec<Option<(usize, u32)>> = vec![None; type_count];
    let mut any_missing = false;
    for (i, row) in raw.iter().enumerate() {
        match row {
            Some(r) => {
                let ty = node_types[i] as usize;
                match type_width[ty] {
                    None => type_width[ty] = Some((r.len(), i as u32)),
                    Some((w, first)) if w != r.len() => {
                        return Err(CoreError::InconsistentFeatureWidth {
                            ty: format!("type {}", ty),
                            a: w,
                            b: r.len(),
                            node: if r.len() > w { i as u32 } else { first },
                        });
                    }
                    Some(_) => {}
                }
            }
            None => any_missing = true,
        }
    }

    let mut d = type_width
        .iter()
        .filter_map(|w| w.map(|(len, _)| len))
        .max()
        .unwrap_or(0);
    if any_missing {
        d = d.max(type_count);
    }
    d = d.max(1);

    let mut out = vec![0.0; raw.len() * d];
    for (i, row) in raw.iter().enumerate() {
        let dst = &mut out[i * d..(i + 1) * d];
        match row {
            Some(r) => dst[..r.len()].copy_from_slice(r),
            None => dst[node_types[i] as usize] = 1.0,
        }
    }
    Ok((out, d))
}

/// Per-edge synthetic features: starting node feature, ending node feature and
/// a one-hot encoding of the edge type, in the stored orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFeatureTable {
    /// Row-major `edge_count x dim`, one row per stored edge.
    pub data: Vec<f64>,
    /// `2 * feature_dim + edge_type_count`.
    pub dim: usize,
    feature_dim: usize,
    /// Unordered endpoint pair -> indices of the stored edges between them.
    by_pair: HashMap<(u32, u32), Vec<usize>>,
    forward: Vec<bool>,
}

impl EdgeFeatureTable {
    pub fn edge_count(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn row(&self, edge: usize) -> &[f64] {
        &self.data[edge * self.dim..(edge + 1) * self.dim]
    }

    /// Feature of the traversal `src -> dst`, averaged over parallel edges.
    /// When the traversal runs against an edge's stored orientation, the two
    /// node-feature blocks are swapped so the result reads
    /// `h_src || h_dst || onehot(type)`.
    pub fn traversal_feature(&self, src: u32, dst: u32) -> Option<Vec<f64>> {
        let key = (src.min(dst), src.max(dst));
        let ids = self.by_pair.get(&key)?;
        let d = self.feature_dim;
        let mut acc = vec![0.0; self.dim];
        for &e in ids {
            let row = self.row(e);
            let stored_forward = self.forward[e] == (src < dst) || src == dst;
            if stored_forward {
                for (a, b) in acc.iter_mut().zip(row) {
                    *a += b;
                }
            } else {
                for i in 0..d {
                    acc[i] += row[d + i];
                    acc[d + i] += row[i];
                }
                for i in 2 * d..self.dim {
                    acc[i] += row[i];
                }
            }
        }
        let inv = 1.0 / ids.len() as f64;
        for a in &mut acc {
            *a *= inv;
        }
        Some(acc)
    }
}

/// Builds the synthetic edge-feature table `e_ij = h_i || h_j || onehot(type)`.
pub fn build_edge_features(g: &HeteroGraph) -> EdgeFeatureTable {
    let d = g.feature_dim();
    let a = g.edge_type_count();
    let dim = 2 * d + a;
    let mut data = Vec::with_capacity(g.edge_count() * dim);
    let mut by_pair: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    let mut forward = Vec::with_capacity(g.edge_count());
    for (idx, e) in g.edges().iter().enumerate() {
        data.extend_from_slice(g.feature(e.src));
        data.extend_from_slice(g.feature(e.dst));
        let mut onehot = vec![0.0; a];
        onehot[e.etype as usize] = 1.0;
        data.extend_from_slice(&onehot);
        by_pair
            .entry((e.src.min(e.dst), e.src.max(e.dst)))
            .or_default()
            .push(idx);
        forward.push(e.src <= e.dst);
    }
    EdgeFeatureTable {
        data,
        dim,
        feature_dim: d,
        by_pair,
        forward,
    }
}

/// Replaces every node feature with i.i.d. standard-normal samples of the same
/// dimension. Structure, labels and splits are untouched; the result is a pure
/// function of `(g, seed)`.
pub fn randomize_node_features(g: &HeteroGraph, seed: u64) -> HeteroGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = g.clone();
    for x in &mut out.features {
        *x = StandardNormal.sample(&mut rng);
    }
    out
}

fn read_lines(path: &Path) -> Result<Vec<String>, CoreError> {
    if !path.is_file() {
        return Err(CoreError::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    Ok(text.lines().map(|l| l.to_string()).collect())
}

fn intern(names: &mut Vec<String>, name: &str) -> u32 {
    match names.iter().position(|n| n == name) {
        Some(i) => i as u32,
        None => {
            names.push(name.to_string());
            (names.len() - 1) as u32
        }
    }
}

/// Loads and validates a dataset directory (see the module docs for the layout).
pub fn load_dataset(dir: &Path) -> Result<HeteroGraph, CoreError> {
    let nodes_path = dir.join("nodes.tsv");
    let mut rows: Vec<(u64, String, Option<Vec<f64>>, usize)> = Vec::new();
    for (lineno, line) in read_lines(&nodes_path)?.iter().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(CoreError::parse(
                "nodes.tsv",
                lineno,
                format!("expected 2 or 3 tab-separated fields, got {}", parts.len()),
            ));
        }
        let id: u64 = parts[0].trim().parse().map_err(|_| {
            CoreError::parse("nodes.tsv", lineno, format!("bad node id `{}`", parts[0]))
        })?;
        let feats = match parts.get(2).map(|s| s.trim()) {
            None | Some("") => None,
            Some(s) => {
                let mut v = Vec::new();
                for piece in s.split(',') {
                    let x: f64 = piece.trim().parse().map_err(|_| {
                        CoreError::parse(
                            "nodes.tsv",
                            lineno,
                            format!("bad feature value `{}`", piece),
                        )
                    })?;
                    v.push(x);
                }
                Some(v)
            }
        };
        rows.push((id, parts[1].trim().to_string(), feats, lineno));
    }

    rows.sort_by_key(|r| r.0);
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.0 != i as u64 {
            return Err(CoreError::NonContiguousIds {
                expected: n,
                msg: format!("found id {} where {} was expected (nodes.tsv)", row.0, i),
            });
        }
    }

    let mut node_type_names = Vec::new();
    let mut node_types = Vec::with_capacity(n);
    let mut raw_features = Vec::with_capacity(n);
    for (_, ty, feats, _) in rows {
        node_types.push(intern(&mut node_type_names, &ty));
        raw_features.push(feats);
    }

    let edges_path = dir.join("edges.tsv");
    let mut edge_type_names = Vec::new();
    let mut edges = Vec::new();
    for (lineno, line) in read_lines(&edges_path)?.iter().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 {
            return Err(CoreError::parse(
                "edges.tsv",
                lineno,
                format!("expected 3 tab-separated fields, got {}", parts.len()),
            ));
        }
        let src: u64 = parts[0].trim().parse().map_err(|_| {
            CoreError::parse("edges.tsv", lineno, format!("bad node id `{}`", parts[0]))
        })?;
        let dst: u64 = parts[1].trim().parse().map_err(|_| {
            CoreError::parse("edges.tsv", lineno, format!("bad node id `{}`", parts[1]))
        })?;
        for node in [src, dst] {
            if node >= n as u64 {
                return Err(CoreError::DanglingEdge { line: lineno, node });
            }
        }
        let etype = intern(&mut edge_type_names, parts[2].trim());
        edges.push(Edge {
            src: src as u32,
            dst: dst as u32,
            etype,
        });
    }

    let labels_path = dir.join("labels.tsv");
    let mut class_names = Vec::new();
    let mut labels: Vec<Option<u32>> = vec![None; n];
    let mut first_labeled: Option<u32> = None;
    for (lineno, line) in read_lines(&labels_path)?.iter().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 2 {
            return Err(CoreError::parse(
                "labels.tsv",
                lineno,
                format!("expected 2 tab-separated fields, got {}", parts.len()),
            ));
        }
        let id: u64 = parts[0].trim().parse().map_err(|_| {
            CoreError::parse("labels.tsv", lineno, format!("bad node id `{}`", parts[0]))
        })?;
        if id >= n as u64 {
            return Err(CoreError::DanglingLabel {
                line: lineno,
                node: id,
            });
        }
        let class = intern(&mut class_names, parts[1].trim());
        labels[id as usize] = Some(class);
        if let Some(first) = first_labeled {
            if node_types[id as usize] != node_types[first as usize] {
                return Err(CoreError::MixedLabelTypes {
                    first: node_type_names[node_types[first as usize] as usize].clone(),
                    second: node_type_names[node_types[id as usize] as usize].clone(),
                });
            }
        } else {
            first_labeled = Some(id as u32);
        }
    }
    let target_type = match first_labeled {
        Some(node) => node_types[node as usize],
        None => return Err(CoreError::NoLabels),
    };

    let splits_path = dir.join("splits.json");
    if !splits_path.is_file() {
        return Err(CoreError::MissingFile(splits_path));
    }
    let splits_text =
        fs::read_to_string(&splits_path).map_err(|e| CoreError::io(&splits_path, e))?;
    let raw_splits: RawSplits = serde_json::from_str(&splits_text)
        .map_err(|e| CoreError::parse("splits.json", e.line(), e.to_string()))?;
    let mut splits = Splits::default();
    for (name, src, dst) in [
        ("train", &raw_splits.train, &mut splits.train),
        ("val", &raw_splits.val, &mut splits.val),
        ("test", &raw_splits.test, &mut splits.test),
    ] {
        for &id in src {
            if id >= n as u64 {
                return Err(CoreError::UnknownSplitNode {
                    split: name.to_string(),
                    node: id,
                });
            }
            dst.push(id as u32);
        }
    }

    HeteroGraph::new(
        node_types,
        node_type_names,
        edge_type_names,
        class_names,
        edges,
        raw_features,
        target_type,
        labels,
        splits,
    )
}

#[derive(Deserialize)]
struct RawSplits {
    #[serde(default)]
    train: Vec<u64>,
    #[serde(default)]
    val: Vec<u64>,
    #[serde(default)]
    test: Vec<u64>,
}

/// Writes `g` back out in the dataset directory format. Padded features are
/// written as-is, so `load_dataset(save_dataset(g)) == g` up to the raw rows
/// having been padded already.
pub fn save_dataset(g: &HeteroGraph, dir: &Path) -> Result<(), CoreError> {
    fs::create_dir_all(dir).map_err(|e| CoreError::io(dir, e))?;

    let mut nodes = String::new();
    for v in 0..g.node_count() as u32 {
        let feats: Vec<String> = g.feature(v).iter().map(|x| format!("{x}")).collect();
        nodes.push_str(&format!(
            "{}\t{}\t{}\n",
            v,
            g.node_type_names[g.node_type(v) as usize],
            feats.join(",")
        ));
    }
    fs::write(dir.join("nodes.tsv"), nodes).map_err(|e| CoreError::io(dir.join("nodes.tsv"), e))?;

    let mut edges = String::new();
    for e in g.edges() {
        edges.push_str(&format!(
            "{}\t{}\t{}\n",
            e.src, e.dst, g.edge_type_names[e.etype as usize]
        ));
    }
    fs::write(dir.join("edges.tsv"), edges).map_err(|e| CoreError::io(dir.join("edges.tsv"), e))?;

    let mut labels = String::new();
    for v in 0..g.node_count() as u32 {
        if let Some(c) = g.label(v) {
            labels.push_str(&format!("{}\t{}\n", v, g.class_names[c as usize]));
        }
    }
    fs::write(dir.join("labels.tsv"), labels)
        .map_err(|e| CoreError::io(dir.join("labels.tsv"), e))?;

    let splits = serde_json::to_string_pretty(&g.splits).expect("splits serialize");
    fs::write(dir.join("splits.json"), splits)
        .map_err(|e| CoreError::io(dir.join("splits.json"), e))?;
    Ok(())
}
