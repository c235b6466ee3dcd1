//! Classification metrics over selected rows of a logit matrix.

use sgat_autodiff::Matrix;

/// Arg-max class per row; ties break toward the lower class id.
pub fn predictions(logits: &Matrix) -> Vec<u32> {
    (0..logits.rows)
        .map(|r| {
            let row = logits.row(r);
            let mut best = 0usize;
            for (c, v) in row.iter().enumerate() {
                if *v > row[best] {
                    best = c;
                }
            }
            best as u32
        })
        .collect()
}

/// Macro and micro F1 over the given rows. The class count is the logit
/// width; classes absent from both predictions and labels score 0 and still
/// divide the macro mean. Micro F1 is computed from the pooled confusion
/// counts, which for single-label data collapses to plain accuracy.
pub fn evaluate_f1(logits: &Matrix, labels: &[u32], nodes: &[usize]) -> (f64, f64) {
    assert!(!nodes.is_empty(), "empty evaluation node set");
    assert_eq!(labels.len(), logits.rows, "labels / logit rows mismatch");
    let classes = logits.cols;
    let preds = predictions(logits);

    let mut tp = vec![0usize; classes];
    let mut fp = vec![0usize; classes];
    let mut fal_n = vec![0usize; classes];
    for &i in nodes {
        let (y, p) = (labels[i] as usize, preds[i] as usize);
        assert!(y < classes, "label {y} out of range for {classes} classes");
        if y == p {
            tp[y] += 1;
        } else {
            fp[p] += 1;
            fal_n[y] += 1;
        }
    }

    let f1 = |tp: usize, fp: usize, fal_n: usize| -> f64 {
        let denom = 2 * tp + fp + fal_n;
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    };
    let macro_f1 =
        (0..classes).map(|c| f1(tp[c], fp[c], fal_n[c])).sum::<f64>() / classes as f64;

    let (tp_all, fp_all, fn_all) = (
        tp.iter().sum::<usize>(),
        fp.iter().sum::<usize>(),
        fal_n.iter().sum::<usize>(),
    );
    let micro_f1 = f1(tp_all, fp_all, fn_all);
    (macro_f1, micro_f1)
}
