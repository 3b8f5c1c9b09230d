use crate::{Error, Result};
use num_bigint::BigInt;
use std::fmt::Write as _;

/// Sparse integer matrix in coordinate form, sorted by (row, col), with a
/// row index for O(nnz) row-major traversal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, i64)>,
    row_start: Vec<usize>,
    max_abs: u64,
}

impl SparseMatrix {
    /// Builds a matrix from unordered entries; rejects out-of-range indices
    /// and repeated positions.
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize, i64)>) -> Result<SparseMatrix> {
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::invalid(format!("duplicate entry at ({}, {})", w[0].0 + 1, w[0].1 + 1)));
            }
        }
        if let Some(&(i, j, _)) = entries.iter().find(|&&(i, j, _)| i >= rows || j >= cols) {
            return Err(Error::invalid(format!("entry ({}, {}) outside {}x{}", i + 1, j + 1, rows, cols)));
        }
        let mut row_start = vec![0; rows + 1];
        for &(i, _, _) in &entries {
            row_start[i + 1] += 1;
        }
        for i in 0..rows {
            row_start[i + 1] += row_start[i];
        }
        let max_abs = entries.iter().map(|e| e.2.unsigned_abs()).max().unwrap_or(0);
        Ok(SparseMatrix { rows, cols, entries, row_start, max_abs })
    }

    pub fn from_dense(a: &[Vec<i64>]) -> SparseMatrix {
        let cols = a.first().map_or(0, |r| r.len());
        let entries = a
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().filter(|e| *e.1 != 0).map(move |(j, &v)| (i, j, v)))
            .collect();
        SparseMatrix::new(a.len(), cols, entries).expect("dense input is well formed")
    }

    pub fn identity(n: usize) -> SparseMatrix {
        SparseMatrix::diag(&vec![1; n])
    }

    pub fn diag(d: &[i64]) -> SparseMatrix {
        let entries = d.iter().enumerate().filter(|e| *e.1 != 0).map(|(i, &v)| (i, i, v)).collect();
        SparseMatrix::new(d.len(), d.len(), entries).unwrap()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Largest absolute entry (U).
    pub fn max_abs(&self) -> u64 {
        self.max_abs
    }

    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[(usize, usize, i64)] {
        &self.entries[self.row_start[i]..self.row_start[i + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        let r = self.row(i);
        r.binary_search_by_key(&j, |e| e.1).map_or(0, |k| r[k].2)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for &(i, j, v) in &self.entries {
            d[i][j] = v;
        }
        d
    }

    pub fn transpose(&self) -> SparseMatrix {
        let e = self.entries.iter().map(|&(i, j, v)| (j, i, v)).collect();
        SparseMatrix::new(self.cols, self.rows, e).unwrap()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.entries.iter().all(|&(i, j, v)| self.get(j, i) == v)
    }

    /// Largest row sum of absolute values; bounds every eigenvalue.
    pub fn max_row_abs_sum(&self) -> u128 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.2.unsigned_abs() as u128).sum::<u128>())
            .max()
            .unwrap_or(0)
    }

    /// Text form: `n m nnz`, then one `i j v` line per entry (1-indexed).
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.nnz());
        for &(i, j, v) in &self.entries {
            writeln!(s, "{} {} {}", i + 1, j + 1, v).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<SparseMatrix> {
        let mut lines = numbered_lines(text);
        let (ln, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty matrix file".into() })?;
        let h = fields::<usize>(ln, header, 3, "header \"n m nnz\"")?;
        let (rows, cols, nnz) = (h[0], h[1], h[2]);
        let mut entries = Vec::with_capacity(nnz);
        let mut seen_at = std::collections::HashMap::new();
        for k in 0..nnz {
            let (ln, line) = lines.next().ok_or(Error::Parse {
                line: ln + k + 1,
                msg: format!("expected {nnz} entries, found {k}"),
            })?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse { line: ln, msg: "expected \"i j v\"".into() });
            }
            let idx = |s: &str, bound: usize, what: &str| -> Result<usize> {
                let v: usize = s.parse().map_err(|_| Error::Parse { line: ln, msg: format!("bad {what} index {s:?}") })?;
                if v == 0 || v > bound {
                    return Err(Error::Parse { line: ln, msg: format!("{what} index {v} outside 1..={bound}") });
                }
                Ok(v - 1)
            };
            let i = idx(parts[0], rows, "row")?;
            let j = idx(parts[1], cols, "column")?;
            let v: i64 = parts[2]
                .parse()
                .map_err(|_| Error::Parse { line: ln, msg: format!("bad entry value {:?} (64-bit integer expected)", parts[2]) })?;
            if let Some(prev) = seen_at.insert((i, j), ln) {
                return Err(Error::Parse { line: ln, msg: format!("entry ({}, {}) repeats line {prev}", i + 1, j + 1) });
            }
            entries.push((i, j, v));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::Parse { line: ln, msg: format!("trailing data after {nnz} entries") });
        }
        SparseMatrix::new(rows, cols, entries)
    }
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

fn fields<T: std::str::FromStr>(ln: usize, line: &str, count: usize, what: &str) -> Result<Vec<T>> {
    let v: Vec<T> = line
        .split_whitespace()
        .map(|s| s.parse::<T>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse { line: ln, msg: format!("malformed {what}") })?;
    if v.len() != count {
        return Err(Error::Parse { line: ln, msg: format!("malformed {what}") });
    }
    Ok(v)
}

/// Text form of an integer vector: `n`, then one entry per line.
pub fn vector_to_text(v: &[BigInt]) -> String {
    let mut s = format!("{}\n", v.len());
    for x in v {
        writeln!(s, "{x}").unwrap();
    }
    s
}

pub fn parse_vector(text: &str) -> Result<Vec<BigInt>> {
    let mut lines = numbered_lines(text);
    let (ln, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty vector file".into() })?;
    let n = fields::<usize>(ln, header, 1, "header \"n\"")?[0];
    let mut out = Vec::with_capacity(n);
    let mut last = ln;
    for (ln, line) in lines {
        for tok in line.split_whitespace() {
            let x: BigInt = tok.parse().map_err(|_| Error::Parse { line: ln, msg: format!("bad integer {tok:?}") })?;
            if out.len() == n {
                return Err(Error::Parse { line: ln, msg: format!("more than {n} entries") });
            }
            out.push(x);
        }
        last = ln;
    }
    if out.len() != n {
        return Err(Error::Parse { line: last, msg: format!("expected {n} entries, found {}", out.len()) });
    }
    Ok(out)
}
