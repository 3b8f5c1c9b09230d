//! Per-phase wall time of the exact solver on the bench generator.
//!
//! `cargo run --release -p lospace-bench --example phase_times -- 128`

use lospace::rational_solver::{determinant, lift_exact, lin_solve};
use lospace::{Seed, SolverConfig};
use lospace_cli::bench::tridiagonal_plus_noise;
use std::time::Instant;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    let a = tridiagonal_plus_noise(n, Seed::new(1));
    let b: Vec<_> = (0..n).map(|i| lospace::BigInt::from(i as i64 % 7 - 3)).collect();
    let t = Instant::now();
    let d = determinant(&a, 2, Seed::new(2)).unwrap();
    println!("det: {:?} ({} bits)", t.elapsed(), d.bits());
    let t = Instant::now();
    let (_, stats, _) = lift_exact(&a, &b, Seed::new(3), &SolverConfig::default()).unwrap().unwrap();
    println!("lift_exact: {:?} T={} p={}", t.elapsed(), stats.iterations, stats.prime);
    let t = Instant::now();
    lin_solve(&a, &b, 1e-6, Seed::new(3), &SolverConfig::default()).unwrap();
    println!("lin_solve: {:?}", t.elapsed());
}
