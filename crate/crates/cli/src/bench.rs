//! Solver benchmark on generated sparse systems: wall time and peak
//! working space per size.

use lospace::meter::{self, WorkspaceMeter};
use lospace::{lin_solve, BigInt, Seed, SolveOutcome, SolverConfig, SparseMatrix};
use rand::Rng;
use std::time::Instant;

pub const CSV_HEADER: &str = "n,nnz,ms,peak_bits,ratio";

/// Largest entry of every generated matrix.
pub const BENCH_U: i64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub nnz: usize,
    pub ms: u128,
    pub peak_bits: u64,
    /// `peak_bits / (n·log₂(nU))`.
    pub ratio: f64,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!("{},{},{},{},{:.4}", self.n, self.nnz, self.ms, self.peak_bits, self.ratio)
    }
}

#[derive(Debug)]
pub enum BenchError {
    Solver(lospace::Error),
    Output(std::io::Error),
}

impl From<std::io::Error> for BenchError {
    fn from(e: std::io::Error) -> Self {
        BenchError::Output(e)
    }
}

/// Tridiagonal matrix with `±U` on the diagonal, off-diagonal entries in
/// `[−20, 20]` and about n extra entries scattered off the band, at most two
/// per row. Every row is strictly diagonally dominant, so the matrix is
/// invertible.
pub fn tridiagonal_plus_noise(n: usize, seed: Seed) -> SparseMatrix {
    let mut rng = seed.rng();
    let mut entries = Vec::with_capacity(4 * n);
    for i in 0..n {
        let sign = if rng.gen::<bool>() { 1 } else { -1 };
        entries.push((i, i, sign * BENCH_U));
        if i + 1 < n {
            entries.push((i, i + 1, rng.gen_range(-20..=20)));
            entries.push((i + 1, i, rng.gen_range(-20..=20)));
        }
    }
    let mut extra = vec![0u8; n];
    let mut taken = std::collections::HashSet::new();
    if n > 2 {
        for _ in 0..n {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i.abs_diff(j) <= 1 || extra[i] == 2 || !taken.insert((i, j)) {
                continue;
            }
            extra[i] += 1;
            let v = rng.gen_range(1..=20) * if rng.gen::<bool>() { 1 } else { -1 };
            entries.push((i, j, v));
        }
    }
    entries.retain(|e| e.2 != 0);
    SparseMatrix::new(n, n, entries).expect("generated entries are distinct and in range")
}

fn rhs(n: usize, seed: Seed) -> Vec<BigInt> {
    let mut rng = seed.rng();
    (0..n).map(|_| BigInt::from(rng.gen_range(-BENCH_U..=BENCH_U))).collect()
}

/// One solve per size, each under a fresh meter. Rows go to `emit` as soon
/// as they are measured.
pub fn bench_run(
    sizes: &[usize],
    eps: f64,
    seed: Seed,
    cfg: &SolverConfig,
    mut emit: impl FnMut(&BenchRow) -> std::io::Result<()>,
) -> Result<Vec<BenchRow>, BenchError> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let s = seed.derive("bench").index(n as u64);
        let a = tridiagonal_plus_noise(n, s.derive("matrix"));
        let b = rhs(n, s.derive("rhs"));
        let m = WorkspaceMeter::new();
        let start = Instant::now();
        let out = meter::with_meter(&m, || lin_solve(&a, &b, eps, s.derive("solve"), cfg)).map_err(BenchError::Solver)?;
        let ms = start.elapsed().as_millis();
        if out == SolveOutcome::Singular {
            return Err(BenchError::Solver(lospace::Error::Singular));
        }
        let peak_bits = m.peak_bits();
        let scale = n as f64 * ((n as f64) * BENCH_U as f64).log2();
        let row = BenchRow { n, nnz: a.nnz(), ms, peak_bits, ratio: peak_bits as f64 / scale };
        emit(&row)?;
        rows.push(row);
    }
    Ok(rows)
}
