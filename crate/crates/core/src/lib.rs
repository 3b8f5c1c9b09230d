//! Exact and entry-wise approximate linear algebra over the integers in
//! working space linear in the input dimension.
//!
//! The crate is layered bottom-up:
//!
//! * [`numeric`]: big integers, L-bit floating point with tracked error, fixed point.
//! * [`primes`]: Miller–Rabin, sampling distinct primes, CRT reconstruction.
//! * [`field`]: prime-field arithmetic (Montgomery for word-sized moduli, big-integer fallback).
//! * [`linop`]: sparse matrices and composed black-box operators.
//! * [`wiedemann`]: minimal polynomials, kernels, solves and determinants mod p.
//! * [`rational_solver`]: integer determinants by CRT and the p-adic rational solver.
//! * [`spectral`]: inverse power iteration, spectrum, eigenvectors, SVD.
//! * [`meter`]: working-space accounting used by every module above.

pub mod error;
pub mod field;
pub mod linop;
pub mod meter;
pub mod numeric;
pub mod primes;
pub mod rational_solver;
pub mod seed;
pub mod spectral;
pub mod wiedemann;

#[cfg(feature = "oracle")]
pub mod oracle;

pub use error::{Error, Result};
pub use linop::{LinearOperator, SparseMatrix};
pub use meter::WorkspaceMeter;
pub use num_bigint::{BigInt, BigUint};
pub use numeric::{Fixed, Float};
pub use rational_solver::{determinant, lin_solve, linear_regression, SolveOutcome, SolverConfig};
pub use seed::Seed;
pub use spectral::{eigendecompose, spectrum, svd, EigenPair, SpectralConfig, SvdColumn};
