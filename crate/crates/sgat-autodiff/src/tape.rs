//! Reverse-mode differentiation over a recorded operation list.
//!
//! A `Tape` owns every tensor it creates: shapes, forward values, gradient
//! buffers and the producing operation, in recording order. `backward` walks
//! the list once in reverse, so recording order is the topological order.
//! Gradients accumulate additively across fan-out. After `backward`, gradient
//! buffers of interior nodes are consumed; only leaf gradients remain
//! readable.
//!
//! Shape mismatches are programming errors and panic with both shapes; they
//! are not recoverable conditions. Zero-row tensors flow through every
//! operation (empty simplex levels produce them routinely).

use std::rc::Rc;

use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TensorId(usize);

#[derive(Clone)]
enum Op {
    Leaf,
    Zeros,
    MatMul { a: TensorId, b: TensorId },
    Add { a: TensorId, b: TensorId },
    ConcatCols { parts: Vec<TensorId> },
    ConcatRows { parts: Vec<TensorId> },
    GatherRows { x: TensorId, idx: Rc<Vec<usize>> },
    ScatterAddRows { x: TensorId, idx: Rc<Vec<usize>> },
    MulColBroadcast { x: TensorId, w: TensorId },
    AddRowBroadcast { x: TensorId, b: TensorId },
    ScaleScalar { x: TensorId, s: TensorId },
    LeakyRelu { x: TensorId, slope: f64 },
    Elu { x: TensorId },
    Tanh { x: TensorId },
    SegmentSoftmax { x: TensorId, seg: Rc<Vec<usize>> },
    CrossEntropy {
        logits: TensorId,
        labels: Rc<Vec<u32>>,
        mask: Rc<Vec<usize>>,
    },
    MeanAll { x: TensorId },
    MulConstMask { x: TensorId, mask: Rc<Vec<f64>> },
}

#[derive(Default)]
pub struct Tape {
    shapes: Vec<(usize, usize)>,
    values: Vec<Vec<f64>>,
    grads: Vec<Vec<f64>>,
    ops: Vec<Op>,
    backward_done: bool,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn shape(&self, id: TensorId) -> (usize, usize) {
        self.shapes[id.0]
    }

    pub fn value(&self, id: TensorId) -> &[f64] {
        &self.values[id.0]
    }

    /// Gradient buffer of `id`. Meaningful for leaves after `backward`;
    /// interior buffers are consumed by the reverse sweep.
    pub fn grad(&self, id: TensorId) -> &[f64] {
        assert!(self.backward_done, "backward has not run");
        &self.grads[id.0]
    }

    pub fn to_matrix(&self, id: TensorId) -> Matrix {
        let (r, c) = self.shape(id);
        Matrix::from_flat(r, c, self.values[id.0].clone())
    }

    fn push(&mut self, shape: (usize, usize), value: Vec<f64>, op: Op) -> TensorId {
        assert!(
            !self.backward_done,
            "tape already differentiated; record on a fresh tape"
        );
        debug_assert_eq!(value.len(), shape.0 * shape.1);
        let id = TensorId(self.ops.len());
        self.grads.push(vec![0.0; value.len()]);
        self.shapes.push(shape);
        self.values.push(value);
        self.ops.push(op);
        id
    }

    pub fn leaf(&mut self, m: &Matrix) -> TensorId {
        self.push((m.rows, m.cols), m.data.clone(), Op::Leaf)
    }

    pub fn zeros(&mut self, rows: usize, cols: usize) -> TensorId {
        self.push((rows, cols), vec![0.0; rows * cols], Op::Zeros)
    }

    pub fn matmul(&mut self, a: TensorId, b: TensorId) -> TensorId {
        let (n, m) = self.shape(a);
        let (m2, p) = self.shape(b);
        assert!(
            m == m2,
            "matmul shape mismatch: {:?} x {:?}",
            self.shape(a),
            self.shape(b)
        );
        let va = &self.values[a.0];
        let vb = &self.values[b.0];
        let mut out = vec![0.0; n * p];
        for i in 0..n {
            for k in 0..m {
                let aik = va[i * m + k];
                if aik == 0.0 {
                    continue;
                }
                let brow = &vb[k * p..(k + 1) * p];
                let crow = &mut out[i * p..(i + 1) * p];
                for (cj, bj) in crow.iter_mut().zip(brow) {
                    *cj += aik * bj;
                }
            }
        }
        self.push((n, p), out, Op::MatMul { a, b })
    }

    pub fn add(&mut self, a: TensorId, b: TensorId) -> TensorId {
        assert!(
            self.shape(a) == self.shape(b),
            "add shape mismatch: {:?} vs {:?}",
            self.shape(a),
            self.shape(b)
        );
        let out = self.values[a.0]
            .iter()
            .zip(&self.values[b.0])
            .map(|(x, y)| x + y)
            .collect();
        self.push(self.shape(a), out, Op::Add { a, b })
    }

    pub fn concat_cols(&mut self, parts: &[TensorId]) -> TensorId {
        assert!(!parts.is_empty(), "concat_cols of nothing");
        let rows = self.shape(parts[0]).0;
        for &p in parts {
            assert!(
                self.shape(p).0 == rows,
                "concat_cols row mismatch: {:?} vs {:?}",
                self.shape(parts[0]),
                self.shape(p)
            );
        }
        let cols: usize = parts.iter().map(|&p| self.shape(p).1).sum();
        let mut out = vec![0.0; rows * cols];
        let mut at = 0;
        for &p in parts {
            let pc = self.shape(p).1;
            let v = &self.values[p.0];
            for r in 0..rows {
                out[r * cols + at..r * cols + at + pc]
                    .copy_from_slice(&v[r * pc..(r + 1) * pc]);
            }
            at += pc;
        }
        self.push(
            (rows, cols),
            out,
            Op::ConcatCols {
                parts: parts.to_vec(),
            },
        )
    }

    pub fn concat_rows(&mut self, parts: &[TensorId]) -> TensorId {
        assert!(!parts.is_empty(), "concat_rows of nothing");
        let cols = self.shape(parts[0]).1;
        for &p in parts {
            assert!(
                self.shape(p).1 == cols,
                "concat_rows column mismatch: {:?} vs {:?}",
                self.shape(parts[0]),
                self.shape(p)
            );
        }
        let rows: usize = parts.iter().map(|&p| self.shape(p).0).sum();
        let mut out = Vec::with_capacity(rows * cols);
        for &p in parts {
            out.extend_from_slice(&self.values[p.0]);
        }
        self.push(
            (rows, cols),
            out,
            Op::ConcatRows {
                parts: parts.to_vec(),
            },
        )
    }

    /// Row `r` of the output is row `idx[r]` of `x`.
    pub fn gather_rows(&mut self, x: TensorId, idx: Rc<Vec<usize>>) -> TensorId {
        let (n, c) = self.shape(x);
        let mut out = Vec::with_capacity(idx.len() * c);
        for &i in idx.iter() {
            assert!(i < n, "gather_rows index {i} out of range for {n} rows");
            out.extend_from_slice(&self.values[x.0][i * c..(i + 1) * c]);
        }
        self.push((idx.len(), c), out, Op::GatherRows { x, idx })
    }

    /// Output has `out_rows` rows; row `idx[r]` accumulates row `r` of `x`.
    pub fn scatter_add_rows(
        &mut self,
        x: TensorId,
        idx: Rc<Vec<usize>>,
        out_rows: usize,
    ) -> TensorId {
        let (n, c) = self.shape(x);
        assert!(
            idx.len() == n,
            "scatter_add_rows: {} indices for {n} rows",
            idx.len()
        );
        let mut out = vec![0.0; out_rows * c];
        for (r, &i) in idx.iter().enumerate() {
            assert!(
                i < out_rows,
                "scatter index {i} out of range for {out_rows} rows"
            );
            let src = &self.values[x.0][r * c..(r + 1) * c];
            let dst = &mut out[i * c..(i + 1) * c];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
        self.push((out_rows, c), out, Op::ScatterAddRows { x, idx })
    }

    /// Scales each row of `x` by the matching entry of the column vector `w`.
    pub fn mul_col_broadcast(&mut self, x: TensorId, w: TensorId) -> TensorId {
        let (n, c) = self.shape(x);
        assert!(
            self.shape(w) == (n, 1),
            "mul_col_broadcast shape mismatch: {:?} vs {:?}",
            self.shape(x),
            self.shape(w)
        );
        let vw = &self.values[w.0];
        let vx = &self.values[x.0];
        let mut out = vec![0.0; n * c];
        for r in 0..n {
            for j in 0..c {
                out[r * c + j] = vx[r * c + j] * vw[r];
            }
        }
        self.push((n, c), out, Op::MulColBroadcast { x, w })
    }

    /// Adds the single-row tensor `b` to every row of `x`.
    pub fn add_row_broadcast(&mut self, x: TensorId, b: TensorId) -> TensorId {
        let (n, c) = self.shape(x);
        assert!(
            self.shape(b) == (1, c),
            "add_row_broadcast shape mismatch: {:?} vs {:?}",
            self.shape(x),
            self.shape(b)
        );
        let vb = &self.values[b.0];
        let vx = &self.values[x.0];
        let mut out = vec![0.0; n * c];
        for r in 0..n {
            for j in 0..c {
                out[r * c + j] = vx[r * c + j] + vb[j];
            }
        }
        self.push((n, c), out, Op::AddRowBroadcast { x, b })
    }

    /// Multiplies every entry of `x` by the 1x1 tensor `s`.
    pub fn scale_scalar(&mut self, x: TensorId, s: TensorId) -> TensorId {
        assert!(
            self.shape(s) == (1, 1),
            "scale_scalar expects a 1x1 scale, got {:?}",
            self.shape(s)
        );
        let sv = self.values[s.0][0];
        let out = self.values[x.0].iter().map(|v| v * sv).collect();
        self.push(self.shape(x), out, Op::ScaleScalar { x, s })
    }

    pub fn leaky_relu(&mut self, x: TensorId, slope: f64) -> TensorId {
        let out = self.values[x.0]
            .iter()
            .map(|&v| if v > 0.0 { v } else { slope * v })
            .collect();
        self.push(self.shape(x), out, Op::LeakyRelu { x, slope })
    }

    pub fn elu(&mut self, x: TensorId) -> TensorId {
        let out = self.values[x.0]
            .iter()
            .map(|&v| if v > 0.0 { v } else { v.exp() - 1.0 })
            .collect();
        self.push(self.shape(x), out, Op::Elu { x })
    }

    pub fn tanh(&mut self, x: TensorId) -> TensorId {
        let out = self.values[x.0].iter().map(|v| v.tanh()).collect();
        self.push(self.shape(x), out, Op::Tanh { x })
    }

    /// Softmax of a column vector within each segment: `seg[r]` names the
    /// segment of row `r`, segments are `0..n_segments`, every segment
    /// non-empty. Stabilized by per-segment max subtraction; non-finite
    /// scores yield NaN weights rather than a panic so that overflow shows
    /// up as a non-finite loss.
    pub fn segment_softmax(
        &mut self,
        x: TensorId,
        seg: Rc<Vec<usize>>,
        n_segments: usize,
    ) -> TensorId {
        let (n, c) = self.shape(x);
        assert!(
            c == 1,
            "segment_softmax expects a column vector, got {:?}",
            (n, c)
        );
        assert!(
            seg.len() == n,
            "segment_softmax: {} segment ids for {n} rows",
            seg.len()
        );
        let v = &self.values[x.0];
        let mut max = vec![f64::NEG_INFINITY; n_segments];
        let mut count = vec![0usize; n_segments];
        for (r, &s) in seg.iter().enumerate() {
            assert!(s < n_segments, "segment id {s} out of range");
            max[s] = max[s].max(v[r]);
            count[s] += 1;
        }
        assert!(
            count.iter().all(|&c| c > 0),
            "empty softmax segment (self-loops guarantee at least one entry)"
        );
        let mut denom = vec![0.0; n_segments];
        let mut out = vec![0.0; n];
        for (r, &s) in seg.iter().enumerate() {
            let e = (v[r] - max[s]).exp();
            out[r] = e;
            denom[s] += e;
        }
        for (r, &s) in seg.iter().enumerate() {
            out[r] /= denom[s];
        }
        self.push((n, 1), out, Op::SegmentSoftmax { x, seg })
    }

    /// Mean over `mask` rows of the negative log softmax probability of the
    /// row's label. `labels` has one entry per row of `logits`.
    pub fn cross_entropy(
        &mut self,
        logits: TensorId,
        labels: Rc<Vec<u32>>,
        mask: Rc<Vec<usize>>,
    ) -> TensorId {
        let (n, c) = self.shape(logits);
        assert!(labels.len() == n, "{} labels for {n} rows", labels.len());
        assert!(!mask.is_empty(), "cross_entropy over an empty node set");
        let v = &self.values[logits.0];
        let mut total = 0.0;
        for &r in mask.iter() {
            assert!(r < n, "mask row {r} out of range for {n} rows");
            let label = labels[r] as usize;
            assert!(label < c, "label {label} out of range for {c} classes");
            let row = &v[r * c..(r + 1) * c];
            let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + row.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
            total += lse - row[label];
        }
        let out = vec![total / mask.len() as f64];
        self.push(
            (1, 1),
            out,
            Op::CrossEntropy {
                logits,
                labels,
                mask,
            },
        )
    }

    pub fn mean_all(&mut self, x: TensorId) -> TensorId {
        let (n, c) = self.shape(x);
        assert!(n * c > 0, "mean_all of an empty tensor");
        let v = &self.values[x.0];
        let out = vec![v.iter().sum::<f64>() / (n * c) as f64];
        self.push((1, 1), out, Op::MeanAll { x })
    }

    /// Elementwise product with a fixed mask (dropout or constant scaling).
    pub fn mul_const_mask(&mut self, x: TensorId, mask: Rc<Vec<f64>>) -> TensorId {
        let (n, c) = self.shape(x);
        assert!(
            mask.len() == n * c,
            "mask of {} entries for a {n}x{c} tensor",
            mask.len()
        );
        let out = self.values[x.0]
            .iter()
            .zip(mask.iter())
            .map(|(v, m)| v * m)
            .collect();
        self.push((n, c), out, Op::MulConstMask { x, mask })
    }

    fn add_into(&mut self, id: TensorId, contrib: &[f64]) {
        let g = &mut self.grads[id.0];
        debug_assert_eq!(g.len(), contrib.len());
        for (gi, ci) in g.iter_mut().zip(contrib) {
            *gi += ci;
        }
    }

    /// Reverse sweep from the scalar `loss`. Call once per tape.
    pub fn backward(&mut self, loss: TensorId) {
        assert!(!self.backward_done, "backward ran already");
        assert!(
            self.shape(loss) == (1, 1),
            "backward needs a scalar, got {:?}",
            self.shape(loss)
        );
        self.backward_done = true;
        self.grads[loss.0][0] = 1.0;
        for i in (0..self.ops.len()).rev() {
            if matches!(self.ops[i], Op::Leaf | Op::Zeros) {
                continue;
            }
            // Inputs always precede node i, so their gradients are still
            // accumulating when node i's gradient is consumed here.
            let g = std::mem::take(&mut self.grads[i]);
            if g.iter().all(|&x| x == 0.0) {
                continue;
            }
            let op = self.ops[i].clone();
            match op {
                Op::Leaf | Op::Zeros => unreachable!(),
                Op::MatMul { a, b } => {
                    let (n, m) = self.shape(a);
                    let p = self.shape(b).1;
                    let va = &self.values[a.0];
                    let vb = &self.values[b.0];
                    let mut da = vec![0.0; n * m];
                    let mut db = vec![0.0; m * p];
                    for r in 0..n {
                        for k in 0..m {
                            let mut acc = 0.0;
                            for j in 0..p {
                                acc += g[r * p + j] * vb[k * p + j];
                            }
                            da[r * m + k] = acc;
                        }
                    }
                    for r in 0..n {
                        for k in 0..m {
                            let ark = va[r * m + k];
                            if ark == 0.0 {
                                continue;
                            }
                            for j in 0..p {
                                db[k * p + j] += ark * g[r * p + j];
                            }
                        }
                    }
                    self.add_into(a, &da);
                    self.add_into(b, &db);
                }
                Op::Add { a, b } => {
                    self.add_into(a, &g);
                    self.add_into(b, &g);
                }
                Op::ConcatCols { parts } => {
                    let (rows, cols) = self.shapes[i];
                    let mut at = 0;
                    for p in parts {
                        let pc = self.shape(p).1;
                        let mut dp = vec![0.0; rows * pc];
                        for r in 0..rows {
                            dp[r * pc..(r + 1) * pc]
                                .copy_from_slice(&g[r * cols + at..r * cols + at + pc]);
                        }
                        self.add_into(p, &dp);
                        at += pc;
                    }
                }
                Op::ConcatRows { parts } => {
                    let mut at = 0;
                    for p in parts {
                        let len = self.values[p.0].len();
                        let dp = g[at..at + len].to_vec();
                        self.add_into(p, &dp);
                        at += len;
                    }
                }
                Op::GatherRows { x, idx } => {
                    let (n, c) = self.shape(x);
                    let mut dx = vec![0.0; n * c];
                    for (r, &src) in idx.iter().enumerate() {
                        for j in 0..c {
                            dx[src * c + j] += g[r * c + j];
                        }
                    }
                    self.add_into(x, &dx);
                }
                Op::ScatterAddRows { x, idx } => {
                    let (n, c) = self.shape(x);
                    let mut dx = vec![0.0; n * c];
                    for (r, &dst) in idx.iter().enumerate() {
                        dx[r * c..(r + 1) * c]
                            .copy_from_slice(&g[dst * c..(dst + 1) * c]);
                    }
                    self.add_into(x, &dx);
                }
                Op::MulColBroadcast { x, w } => {
                    let (n, c) = self.shape(x);
                    let vx = &self.values[x.0];
                    let vw = &self.values[w.0];
                    let mut dx = vec![0.0; n * c];
                    let mut dw = vec![0.0; n];
                    for r in 0..n {
                        for j in 0..c {
                            dx[r * c + j] = g[r * c + j] * vw[r];
                            dw[r] += g[r * c + j] * vx[r * c + j];
                        }
                    }
                    self.add_into(x, &dx);
                    self.add_into(w, &dw);
                }
                Op::AddRowBroadcast { x, b } => {
                    let (n, c) = self.shape(x);
                    let mut db = vec![0.0; c];
                    for r in 0..n {
                        for j in 0..c {
                            db[j] += g[r * c + j];
                        }
                    }
                    self.add_into(x, &g);
                    self.add_into(b, &db);
                }
                Op::ScaleScalar { x, s } => {
                    let sv = self.values[s.0][0];
                    let vx = &self.values[x.0];
                    let ds = vec![g.iter().zip(vx).map(|(gi, xi)| gi * xi).sum()];
                    let dx: Vec<f64> = g.iter().map(|gi| gi * sv).collect();
                    self.add_into(x, &dx);
                    self.add_into(s, &ds);
                }
                Op::LeakyRelu { x, slope } => {
                    let vx = &self.values[x.0];
                    let dx: Vec<f64> = g
                        .iter()
                        .zip(vx)
                        .map(|(gi, &xi)| if xi > 0.0 { *gi } else { gi * slope })
                        .collect();
                    self.add_into(x, &dx);
                }
                Op::Elu { x } => {
                    let vout = &self.values[i];
                    let dx: Vec<f64> = g
                        .iter()
                        .zip(vout)
                        .map(|(gi, &o)| if o > 0.0 { *gi } else { gi * (o + 1.0) })
                        .collect();
                    self.add_into(x, &dx);
                }
                Op::Tanh { x } => {
                    let vout = &self.values[i];
                    let dx: Vec<f64> = g
                        .iter()
                        .zip(vout)
                        .map(|(gi, o)| gi * (1.0 - o * o))
                        .collect();
                    self.add_into(x, &dx);
                }
                Op::SegmentSoftmax { x, seg } => {
                    let vout = &self.values[i];
                    let n_seg = seg.iter().copied().max().map_or(0, |m| m + 1);
                    let mut dot = vec![0.0; n_seg];
                    for (r, &s) in seg.iter().enumerate() {
                        dot[s] += vout[r] * g[r];
                    }
                    let dx: Vec<f64> = seg
                        .iter()
                        .enumerate()
                        .map(|(r, &s)| vout[r] * (g[r] - dot[s]))
                        .collect();
                    self.add_into(x, &dx);
                }
                Op::CrossEntropy {
                    logits,
                    labels,
                    mask,
                } => {
                    let (n, c) = self.shape(logits);
                    let v = &self.values[logits.0];
                    let scale = g[0] / mask.len() as f64;
                    let mut dl = vec![0.0; n * c];
                    for &r in mask.iter() {
                        let row = &v[r * c..(r + 1) * c];
                        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        let denom: f64 = row.iter().map(|x| (x - m).exp()).sum();
                        for j in 0..c {
                            let p = (row[j] - m).exp() / denom;
                            let ind = if j == labels[r] as usize { 1.0 } else { 0.0 };
                            dl[r * c + j] = scale * (p - ind);
                        }
                    }
                    self.add_into(logits, &dl);
                }
                Op::MeanAll { x } => {
                    let len = self.values[x.0].len();
                    let dx = vec![g[0] / len as f64; len];
                    self.add_into(x, &dx);
                }
                Op::MulConstMask { x, mask } => {
                    let dx: Vec<f64> = g
                        .iter()
                        .zip(mask.iter())
                        .map(|(gi, mi)| gi * mi)
                        .collect();
                    self.add_into(x, &dx);
                }
            }
        }
    }
}
