//! Binary checkpoint of named matrices.
//!
//! Layout (all integers little-endian): magic `SGATCKPT`, format version u32,
//! entry count u64, then per entry: name length u64, UTF-8 name, rows u64,
//! cols u64, row-major f64 data.

use std::fs;
use std::path::Path;

use crate::error::AutodiffError;
use crate::matrix::Matrix;

const MAGIC: &[u8; 8] = b"SGATCKPT";
const VERSION: u32 = 1;

pub fn save_checkpoint(
    path: &Path,
    entries: &[(String, &Matrix)],
) -> Result<(), AutodiffError> {
    let mut bytes = Vec::new();
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(entries.len() as u64).to_le_bytes());
    for (name, m) in entries {
        let nb = name.as_bytes();
        bytes.extend_from_slice(&(nb.len() as u64).to_le_bytes());
        bytes.extend_from_slice(nb);
        bytes.extend_from_slice(&(m.rows as u64).to_le_bytes());
        bytes.extend_from_slice(&(m.cols as u64).to_le_bytes());
        for x in &m.data {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    fs::write(path, bytes).map_err(|e| AutodiffError::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Vec<(String, Matrix)>, AutodiffError> {
    let bytes = fs::read(path).map_err(|e| AutodiffError::io(path, e))?;
    let mut at = 0usize;
    let take = |at: &mut usize, n: usize| -> Result<&[u8], AutodiffError> {
        if *at + n > bytes.len() {
            return Err(AutodiffError::checkpoint(path, "truncated file"));
        }
        let s = &bytes[*at..*at + n];
        *at += n;
        Ok(s)
    };
    if take(&mut at, 8)? != MAGIC {
        return Err(AutodiffError::checkpoint(path, "bad magic"));
    }
    let version = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap());
    if version != VERSION {
        return Err(AutodiffError::checkpoint(
            path,
            format!("unsupported format version {version}"),
        ));
    }
    let count = u64::from_le_bytes(take(&mut at, 8)?.try_into().unwrap()) as usize;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let name_len = u64::from_le_bytes(take(&mut at, 8)?.try_into().unwrap()) as usize;
        let name = String::from_utf8(take(&mut at, name_len)?.to_vec())
            .map_err(|_| AutodiffError::checkpoint(path, "parameter name is not UTF-8"))?;
        let rows = u64::from_le_bytes(take(&mut at, 8)?.try_into().unwrap()) as usize;
        let cols = u64::from_le_bytes(take(&mut at, 8)?.try_into().unwrap()) as usize;
        let data: Vec<f64> = take(&mut at, rows * cols * 8)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        out.push((name, Matrix::from_flat(rows, cols, data)));
    }
    if at != bytes.len() {
        return Err(AutodiffError::checkpoint(path, "trailing bytes"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_named_matrices() {
        let tmp = tempfile::tempdir().unwrap();
        let p = tmp.path().join("params.bin");
        let a = Matrix::from_rows(vec![vec![1.5, -2.5], vec![0.0, 1e-300]]);
        let b = Matrix::zeros(0, 7);
        save_checkpoint(&p, &[("layer0.w".into(), &a), ("empty".into(), &b)]).unwrap();
        let loaded = load_checkpoint(&p).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded[0].0, "layer0.w");
        assert_eq!(loaded[0].1, a);
        assert_eq!(loaded[1].1, b);
    }

    #[test]
    fn rejects_garbage_and_truncation() {
        let tmp = tempfile::tempdir().unwrap();
        let p = tmp.path().join("bad.bin");
        fs::write(&p, b"not a checkpoint").unwrap();
        assert!(matches!(
            load_checkpoint(&p),
            Err(AutodiffError::Checkpoint { .. })
        ));

        let good = tmp.path().join("good.bin");
        let a = Matrix::from_rows(vec![vec![1.0, 2.0]]);
        save_checkpoint(&good, &[("w".into(), &a)]).unwrap();
        let mut bytes = fs::read(&good).unwrap();
        bytes.truncate(bytes.len() - 4);
        fs::write(&good, &bytes).unwrap();
        match load_checkpoint(&good).unwrap_err() {
            AutodiffError::Checkpoint { msg, .. } => assert_eq!(msg, "truncated file"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let tmp = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_checkpoint(&tmp.path().join("absent.bin")),
            Err(AutodiffError::Io { .. })
        ));
    }
}
