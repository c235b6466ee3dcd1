/// Standard graph attention weights, computed densely: for every node `i`
/// and neighbor `j` in `neighbors[i]`, score the concatenated projections
/// with the two-block vector `attn`, apply the leaky rectifier, and softmax
/// per node. The returned rows align with `neighbors[i]`, which must list
/// the node itself when a self-loop is wanted.
pub fn gat_reference_scores(
    neighbors: &[Vec<usize>],
    feats: &[Vec<f64>],
    w: &[Vec<f64>],
    attn: &[f64],
    slope: f64,
) -> Vec<Vec<f64>> {
    let width = w.first().map_or(0, |r| r.len());
    assert_eq!(attn.len(), 2 * width, "scoring vector must cover two blocks");
    let proj: Vec<Vec<f64>> = feats
        .iter()
        .map(|row| {
            let mut out = vec![0.0; width];
            for (x, wrow) in row.iter().zip(w) {
                for (o, v) in out.iter_mut().zip(wrow) {
                    *o += x * v;
                }
            }
            out
        })
        .collect();
    neighbors
        .iter()
        .enumerate()
        .map(|(i, nbrs)| {
            let scores: Vec<f64> = nbrs
                .iter()
                .map(|&j| {
                    let mut s = 0.0;
                    for t in 0..width {
                        s += attn[t] * proj[i][t] + attn[width + t] * proj[j][t];
                    }
                    if s >= 0.0 {
                        s
                    } else {
                        slope * s
                    }
                })
                .collect();
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
            let total: f64 = exps.iter().sum();
            exps.into_iter().map(|e| e / total).collect()
        })
        .collect()
}
