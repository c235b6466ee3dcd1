use std::collections::BTreeSet;

use sgat_core::SimplicialComplexBundle;

/// Output activation applied per head after aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawActivation {
    Elu,
    Tanh,
}

/// One attention head. `w_own` maps the level's input rows, `w_conn` maps
/// the level above (the connecting slot), `attn` is the scoring vector over
/// the three concatenated projections, so its length is three head widths.
#[derive(Debug, Clone)]
pub struct HeadParams {
    pub w_own: Vec<Vec<f64>>,
    pub w_conn: Vec<Vec<f64>>,
    pub attn: Vec<f64>,
}

/// Hop-scale scoring parameters for one (level, scale) pair: a row is mapped
/// through `map`, shifted by `bias`, squashed, and dotted with `q`.
#[derive(Debug, Clone)]
pub struct FusionParams {
    pub map: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub q: Vec<f64>,
}

/// Plain nested-vector parameter set for the dense reference.
///
/// `attention[layer][scale][level][head]`; `fusion[level][scale]`, empty when
/// only one hop scale exists; `classifier` maps the per-layer concatenation
/// of vertex-level outputs to class logits. All matrices are row-major
/// `in x out` nested vecs.
#[derive(Debug, Clone)]
pub struct RawParams {
    pub leaky_slope: f64,
    pub activation: RawActivation,
    pub attention: Vec<Vec<Vec<Vec<HeadParams>>>>,
    pub fusion: Vec<Vec<FusionParams>>,
    pub classifier: Vec<Vec<f64>>,
}

/// One hop scale with dense structure: `adjacency[k][i][j]` is the index of
/// the connecting level-(k+1) simplex when the two level-k simplices are
/// upper-adjacent, the row's own index on the diagonal, and `None` otherwise.
#[derive(Debug, Clone)]
pub struct DenseEta {
    pub simplices: Vec<Vec<Vec<u32>>>,
    pub features: Vec<Vec<Vec<f64>>>,
    pub adjacency: Vec<Vec<Vec<Option<usize>>>>,
}

/// Bundle converted to dense form, with the cross-scale row order and the
/// adjacency matrices re-derived here from the simplex lists alone.
#[derive(Debug, Clone)]
pub struct DenseComplex {
    pub k_max: usize,
    pub etas: Vec<DenseEta>,
    /// Sorted union of level-k simplices over all hop scales.
    pub global: Vec<Vec<Vec<u32>>>,
    /// `membership[k][e][local]` = row of that simplex in `global[k]`.
    pub membership: Vec<Vec<Vec<usize>>>,
}

impl DenseComplex {
    pub fn from_bundle(bundle: &SimplicialComplexBundle) -> Self {
        let k_max = bundle.k_max;
        let etas: Vec<DenseEta> = bundle
            .per_eta
            .iter()
            .map(|ec| {
                let simplices: Vec<Vec<Vec<u32>>> = ec
                    .levels
                    .iter()
                    .map(|lvl| lvl.iter().map(|s| s.vertices().to_vec()).collect())
                    .collect();
                let features = ec
                    .features
                    .iter()
                    .map(|m| (0..m.rows).map(|i| m.row(i).to_vec()).collect())
                    .collect();
                let adjacency = dense_adjacency(&simplices);
                DenseEta { simplices, features, adjacency }
            })
            .collect();

        let mut global = Vec::with_capacity(k_max + 1);
        let mut membership = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let union: BTreeSet<Vec<u32>> = etas
                .iter()
                .flat_map(|e| e.simplices[k].iter().cloned())
                .collect();
            let rows: Vec<Vec<u32>> = union.into_iter().collect();
            let member: Vec<Vec<usize>> = etas
                .iter()
                .map(|e| {
                    e.simplices[k]
                        .iter()
                        .map(|s| rows.binary_search(s).expect("scale simplex in union"))
                        .collect()
                })
                .collect();
            global.push(rows);
            membership.push(member);
        }
        DenseComplex { k_max, etas, global, membership }
    }
}

/// Two distinct level-k simplices are upper-adjacent exactly when their
/// vertex union is a stored level-(k+1) simplex, which is then the unique
/// connecting simplex.
fn dense_adjacency(levels: &[Vec<Vec<u32>>]) -> Vec<Vec<Vec<Option<usize>>>> {
    let k_max = levels.len() - 1;
    let mut out = Vec::with_capacity(k_max);
    for k in 0..k_max {
        let cur = &levels[k];
        let up = &levels[k + 1];
        let mut mat = vec![vec![None; cur.len()]; cur.len()];
        for i in 0..cur.len() {
            mat[i][i] = Some(i);
            for j in 0..cur.len() {
                if i == j {
                    continue;
                }
                let mut union: Vec<u32> =
                    cur[i].iter().chain(cur[j].iter()).copied().collect();
                union.sort_unstable();
                union.dedup();
                if union.len() == k + 2 {
                    mat[i][j] = up.iter().position(|s| *s == union);
                }
            }
        }
        out.push(mat);
    }
    out
}

/// Runs the full network with explicit loops: per layer and hop scale,
/// multi-head attention on every level below the top; per level, scale
/// fusion onto the global row order; vertex-level outputs of all layers
/// concatenated into the classifier. Top-level rows are re-read raw each
/// layer. Returns one logit row per global vertex-level simplex.
pub fn dense_forward_reference(dc: &DenseComplex, p: &RawParams) -> Vec<Vec<f64>> {
    let n_scales = dc.etas.len();
    let mut state: Vec<Vec<Vec<Vec<f64>>>> =
        dc.etas.iter().map(|e| e.features.clone()).collect();
    let mut vertex_concat: Vec<Vec<f64>> = vec![Vec::new(); dc.global[0].len()];

    for layer in &p.attention {
        let branch: Vec<Vec<Vec<Vec<f64>>>> = (0..n_scales)
            .map(|e| {
                (0..dc.k_max)
                    .map(|k| {
                        attention_level(
                            &state[e][k],
                            &state[e][k + 1],
                            &dc.etas[e].adjacency[k],
                            &layer[e][k],
                            p.leaky_slope,
                            p.activation,
                        )
                    })
                    .collect()
            })
            .collect();

        for k in 0..dc.k_max {
            let fused = if n_scales == 1 {
                branch[0][k].clone()
            } else {
                fuse_level(dc, &branch, k, &p.fusion[k])
            };
            if k == 0 {
                for (row, z) in vertex_concat.iter_mut().zip(&fused) {
                    row.extend_from_slice(z);
                }
            }
            for (e, scale_state) in state.iter_mut().enumerate() {
                for (local, &g) in dc.membership[k][e].iter().enumerate() {
                    scale_state[k][local] = fused[g].clone();
                }
            }
        }
    }
    vertex_concat
        .iter()
        .map(|row| vec_mat(row, &p.classifier))
        .collect()
}

fn attention_level(
    own: &[Vec<f64>],
    up: &[Vec<f64>],
    adj: &[Vec<Option<usize>>],
    heads: &[HeadParams],
    slope: f64,
    act: RawActivation,
) -> Vec<Vec<f64>> {
    let n = own.len();
    let mut out = vec![Vec::new(); n];
    for hp in heads {
        let proj_own: Vec<Vec<f64>> = own.iter().map(|r| vec_mat(r, &hp.w_own)).collect();
        let proj_up: Vec<Vec<f64>> = up.iter().map(|r| vec_mat(r, &hp.w_conn)).collect();
        let width = hp.w_own.first().map_or(0, |r| r.len());
        for i in 0..n {
            let mut cols = Vec::new();
            let mut scores = Vec::new();
            for j in 0..n {
                let Some(conn) = adj[i][j] else { continue };
                let third = if i == j { &proj_own[i] } else { &proj_up[conn] };
                let mut s = 0.0;
                for t in 0..width {
                    s += hp.attn[t] * proj_own[i][t]
                        + hp.attn[width + t] * proj_own[j][t]
                        + hp.attn[2 * width + t] * third[t];
                }
                cols.push(j);
                scores.push(if s >= 0.0 { s } else { slope * s });
            }
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
            let total: f64 = exps.iter().sum();
            let mut agg = vec![0.0; width];
            for (idx, &j) in cols.iter().enumerate() {
                let alpha = exps[idx] / total;
                for t in 0..width {
                    agg[t] += alpha * proj_own[j][t];
                }
            }
            out[i].extend(agg.into_iter().map(|x| activate(x, act)));
        }
    }
    out
}

/// Scores every hop scale (zero when it holds no level-k simplices),
/// softmaxes the scores, and sums the weighted branch rows into global rows.
fn fuse_level(
    dc: &DenseComplex,
    branch: &[Vec<Vec<Vec<f64>>>],
    k: usize,
    fusion: &[FusionParams],
) -> Vec<Vec<f64>> {
    let n_scales = branch.len();
    let mut raw = vec![0.0; n_scales];
    for e in 0..n_scales {
        let rows = &branch[e][k];
        if rows.is_empty() {
            continue;
        }
        let fp = &fusion[e];
        let mut acc = 0.0;
        for row in rows {
            let mapped = vec_mat(row, &fp.map);
            for (t, q) in fp.q.iter().enumerate() {
                acc += q * (mapped[t] + fp.bias[t]).tanh();
            }
        }
        raw[e] = acc / rows.len() as f64;
    }
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = raw.iter().map(|w| (w - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    let beta: Vec<f64> = exps.iter().map(|w| w / total).collect();

    let hidden = branch
        .iter()
        .find_map(|b| b[k].first())
        .map_or(0, |r| r.len());
    let mut fused = vec![vec![0.0; hidden]; dc.global[k].len()];
    for e in 0..n_scales {
        for (local, row) in branch[e][k].iter().enumerate() {
            let g = dc.membership[k][e][local];
            for t in 0..hidden {
                fused[g][t] += beta[e] * row[t];
            }
        }
    }
    fused
}

fn vec_mat(v: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    assert_eq!(
        v.len(),
        m.len(),
        "dense reference dim mismatch: row {} vs matrix {}",
        v.len(),
        m.len()
    );
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; cols];
    for (x, mrow) in v.iter().zip(m) {
        for (o, w) in out.iter_mut().zip(mrow) {
            *o += x * w;
        }
    }
    out
}

fn activate(x: f64, a: RawActivation) -> f64 {
    match a {
        RawActivation::Elu => {
            if x > 0.0 {
                x
            } else {
                x.exp() - 1.0
            }
        }
        RawActivation::Tanh => x.tanh(),
    }
}
