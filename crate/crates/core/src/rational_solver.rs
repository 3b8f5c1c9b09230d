//! Integer determinants by Chinese remaindering and the linear-space
//! rational solver by p-adic lifting.
//!
//! The solver never stores the big residual `bΔ − A·(Σ ỹ⁽ᵏ⁾pᵏ)`. It splits
//! it into the digits `b̃⁽ⁱ⁾ = ⌊bΔ/pⁱ⌋ mod p`, recomputed one entry at a
//! time, and a small carry vector `r̃` with `‖r̃‖∞ ≤ 2nU`. The solution
//! digits are folded into two L-bit float accumulators per coordinate, one
//! for the digit expansion and one for its complement, which is all that
//! is needed to recover sign and magnitude of `A⁻¹bΔ`.

use crate::field::{IntRing, PrimeField, Ring, Wrap128};
use crate::linop::{Bound, LinearOperator, SparseMatrix};
use crate::meter::{self, Charge};
use crate::numeric::Float;
use crate::primes::{self, Crt};
use crate::seed::{Rng, Seed};
use crate::wiedemann::{self, ZpSolver};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Failure exponent: each randomized stage fails with probability
    /// at most `n^-c`.
    pub c: u32,
    /// Number of coordinate blocks K; `None` uses
    /// `min{n, max{1, ⌈log₂(1/ε)/log₂(2nU)⌉}}`.
    pub blocks: Option<usize>,
    /// Compute determinant residues on the rayon pool (requires the
    /// `parallel` feature; ignored otherwise).
    pub parallel: bool,
    /// Fresh lifting primes tried when the first divides the determinant.
    pub prime_resamples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { c: primes::DEFAULT_C, blocks: None, parallel: false, prime_resamples: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Singular,
    Solution(Vec<Float>),
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&[Float]> {
        match self {
            SolveOutcome::Singular => None,
            SolveOutcome::Solution(x) => Some(x),
        }
    }
}

fn failure_budget(n: usize, c: u32) -> f64 {
    (n.max(2) as f64).powi(-(c as i32 + 2))
}

/// Squared Euclidean norms of the columns, one product at a time.
fn column_norms_sq(op: &LinearOperator<'_>) -> Result<Vec<BigInt>> {
    let n = op.cols();
    let bound = op.bind(&IntRing);
    let mut e = vec![BigInt::zero(); n];
    let mut col = vec![BigInt::zero(); op.rows()];
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        e[j] = BigInt::one();
        bound.apply(&e, &mut col)?;
        e[j] = BigInt::zero();
        out.push(col.iter().map(|x| x * x).sum());
    }
    Ok(out)
}

/// Bits needed so that `2^bits ≥ √x` for x ≥ 0.
fn sqrt_bits(x: &BigInt) -> u64 {
    x.bits().div_ceil(2)
}

/// Number of primes of at least `lower` bits needed to exceed `2^target`.
fn count_for(target_bits: u64, prime_floor: &BigUint) -> usize {
    let per = (prime_floor.bits() - 1).max(1);
    target_bits.div_ceil(per) as usize
}

/// Exact determinant of a square operator. Uses `max{n, ·}` primes from
/// `[N, N²]` with `N = max{16, n²U, 6n²}`, enough for the product to exceed
/// twice the Hadamard bound, and recovers the signed value by CRT.
pub fn determinant_op(op: &LinearOperator<'_>, seed: Seed, cfg: &SolverConfig) -> Result<BigInt> {
    let n = op.rows();
    if n != op.cols() {
        return Err(Error::DimensionMismatch { expected: n, found: op.cols() });
    }
    if n == 0 {
        return Ok(BigInt::one());
    }
    let u = op.max_abs_entry().max(BigInt::one());
    let nb = BigInt::from(n);
    let lower = (&nb * &nb * &u).max(BigInt::from(16)).max(&nb * &nb * 6u32).into_parts().1;
    // Hadamard: |det| ≤ ∏ ‖colⱼ‖, so 2^(h+2) > 2|det| with h = Σ ⌈log₂‖colⱼ‖⌉.
    let norms = column_norms_sq(op)?;
    if norms.iter().any(|x| x.is_zero()) {
        return Ok(BigInt::zero());
    }
    let h: u64 = norms.iter().map(sqrt_bits).sum();
    let count = n.max(count_for(h + 2, &lower));
    let ps = primes::sample_primes_with(count, &lower, cfg.c, primes::DEFAULT_ROUNDS, &mut seed.derive("det.primes").rng())?;
    let delta = failure_budget(n, cfg.c);
    let residue = |i: usize, p: &BigUint| -> Result<BigInt> {
        let mut rng = seed.derive("det.residue").index(i as u64).rng();
        Ok(BigInt::from(wiedemann::determinant_zp(op, p, delta, &mut rng)?))
    };
    let mut crt = Crt::new();
    let mut charge = meter::charge("det.crt", 0);
    if cfg.parallel && cfg!(feature = "parallel") {
        for (p, r) in ps.iter().zip(parallel_residues(&ps, &residue)?) {
            crt.push(&BigInt::from(p.clone()), &r)?;
        }
    } else {
        for (i, p) in ps.iter().enumerate() {
            let r = residue(i, p)?;
            crt.push(&BigInt::from(p.clone()), &r)?;
            charge.at_least(crt.bits());
        }
    }
    charge.at_least(crt.bits());
    Ok(crt.signed())
}

#[cfg(feature = "parallel")]
fn parallel_residues<G>(ps: &[BigUint], residue: &G) -> Result<Vec<BigInt>>
where
    G: Fn(usize, &BigUint) -> Result<BigInt> + Sync,
{
    use rayon::prelude::*;
    let m = meter::current();
    ps.par_iter()
        .enumerate()
        .map(|(i, p)| match &m {
            Some(m) => meter::with_meter(m, || residue(i, p)),
            None => residue(i, p),
        })
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_residues<G>(ps: &[BigUint], residue: &G) -> Result<Vec<BigInt>>
where
    G: Fn(usize, &BigUint) -> Result<BigInt> + Sync,
{
    ps.iter().enumerate().map(|(i, p)| residue(i, p)).collect()
}

/// Exact determinant of an integer matrix.
pub fn determinant(a: &SparseMatrix, c: u32, seed: Seed) -> Result<BigInt> {
    let cfg = SolverConfig { c, ..SolverConfig::default() };
    determinant_op(&LinearOperator::base(a), seed, &cfg)
}

/// `⌊b·Δ / pⁱ⌋ mod p` for one entry, floor semantics for negative products.
pub fn digit_of_b(b: &BigInt, delta: &BigInt, p: &BigUint, i: u32) -> BigUint {
    let pp = BigInt::from(p.pow(i));
    digit_with_power(b, delta, &pp, p)
}

fn digit_with_power(b: &BigInt, delta: &BigInt, p_pow: &BigInt, p: &BigUint) -> BigUint {
    let q = (b * delta).div_floor(p_pow);
    q.mod_floor(&BigInt::from(p.clone())).into_parts().1
}

/// Signed value from the two digit accumulators: `y₊` when `y₊ < y₋`,
/// otherwise `−(y₋ + 1)`; exact zero when every digit was zero.
pub fn sign_combine(y_plus: &Float, y_minus: &Float, all_digits_zero: bool) -> Result<Float> {
    if all_digits_zero {
        return Ok(Float::zero(y_plus.prec()));
    }
    if y_plus < y_minus {
        Ok(y_plus.clone())
    } else {
        let one = Float::from_i64(1, y_minus.prec());
        Ok(y_minus.add_same_sign(&one)?.neg())
    }
}

/// Receives the solution digits of one lifting pass.
trait DigitSink {
    /// Digit `i` of coordinate `lo + k` for each k in the active block.
    fn push(&mut self, lo: usize, hi: usize, digits: &[BigUint], p: &BigUint, p_pow: &BigInt) -> Result<()>;
}

/// The L-bit float accumulators `y₊ = Σ ỹ pⁱ`, `y₋ = Σ (p−1−ỹ) pⁱ`.
struct FloatSink {
    prec: u32,
    plus: Vec<Float>,
    minus: Vec<Float>,
    nonzero: Vec<bool>,
    charge: Charge,
}

impl FloatSink {
    fn new(len: usize, prec: u32) -> FloatSink {
        FloatSink {
            prec,
            plus: vec![Float::zero(prec); len],
            minus: vec![Float::zero(prec); len],
            nonzero: vec![false; len],
            charge: meter::charge("lift.accumulators", 0),
        }
    }

    fn bits(&self) -> u64 {
        let f = |x: &Float| x.mantissa().bits() + 64;
        self.plus.iter().chain(&self.minus).map(f).sum::<u64>() + self.nonzero.len() as u64
    }
}

impl DigitSink for FloatSink {
    fn push(&mut self, lo: usize, hi: usize, digits: &[BigUint], p: &BigUint, p_pow: &BigInt) -> Result<()> {
        let scale = Float::from_bigint(p_pow, self.prec)?;
        let pm1 = p - 1u32;
        for (k, d) in digits[lo..hi].iter().enumerate() {
            if !d.is_zero() {
                self.nonzero[k] = true;
                let t = Float::from_bigint(&BigInt::from(d.clone()), self.prec)?.mul(&scale)?;
                self.plus[k] = self.plus[k].add_same_sign(&t)?;
            }
            let c = &pm1 - d;
            if !c.is_zero() {
                let t = Float::from_bigint(&BigInt::from(c), self.prec)?.mul(&scale)?;
                self.minus[k] = self.minus[k].add_same_sign(&t)?;
            }
        }
        let bits = self.bits();
        self.charge.at_least(bits);
        Ok(())
    }
}

/// Exact accumulators for the test harness: `Σ ỹ⁽ⁱ⁾ pⁱ` per coordinate.
struct ExactSink {
    sum: Vec<BigInt>,
}

impl DigitSink for ExactSink {
    fn push(&mut self, lo: usize, hi: usize, digits: &[BigUint], _p: &BigUint, p_pow: &BigInt) -> Result<()> {
        for (k, d) in digits[lo..hi].iter().enumerate() {
            self.sum[k] += BigInt::from(d.clone()) * p_pow;
        }
        Ok(())
    }
}

/// Per-run lifting statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftStats {
    pub prime: BigUint,
    pub iterations: usize,
    pub passes: usize,
    /// Largest `‖r̃⁽ⁱ⁾‖∞` observed.
    pub max_residual: BigInt,
    /// The bound `2nU` it was checked against.
    pub residual_bound: BigInt,
}

/// One lifting pass over a coordinate block.
trait Lifter {
    fn pass(&mut self, b: &[BigInt], lo: usize, hi: usize, sink: &mut dyn DigitSink) -> Result<()>;
    fn stats(&self) -> LiftStats;
    fn iterations(&self, b: &[BigInt]) -> usize;
}

struct LiftImpl<'s, F: PrimeField> {
    f: &'s F,
    solver: ZpSolver<'s, F>,
    wrap: Option<Bound<'s, Wrap128>>,
    int: Option<Bound<'s, IntRing>>,
    rng: Rng,
    delta: &'s BigInt,
    p: &'s BigUint,
    pint: BigInt,
    pinv: u128,
    col_bits: u64,
    stats: LiftStats,
}

/// Iterations so that `pᵀ > 4·‖b‖·∏ⱼ max(1, ‖colⱼ‖)`, which bounds every
/// `|Δ·(A⁻¹b)ᵢ|` (a determinant with column i replaced by b), and at
/// least n.
fn iterations_for(n: usize, col_bits: u64, b: &[BigInt], p: &BigUint) -> usize {
    let bnorm: BigInt = b.iter().map(|x| x * x).sum();
    n.max(count_for(col_bits + sqrt_bits(&bnorm) + 3, p))
}

impl<F: PrimeField> Lifter for LiftImpl<'_, F> {
    fn pass(&mut self, b: &[BigInt], lo: usize, hi: usize, sink: &mut dyn DigitSink) -> Result<()> {
        let f = self.f;
        let n = b.len();
        let p = self.p;
        let iterations = iterations_for(n, self.col_bits, b, p);
        let bound = self.stats.residual_bound.clone();
        let word = |x: &BigInt| x.bits() + 1;
        let _fixed = meter::charge("lift.state", word(self.delta) + bound.bits() + 64);
        let mut vectors = meter::charge("lift.vectors", 0);
        let mut p_pow_charge = meter::charge("lift.p_power", 0);

        let mut r = vec![BigInt::zero(); n];
        let mut p_pow = BigInt::one();
        let wide = self.wrap.is_some();
        let mut yw = vec![0u128; if wide { n } else { 0 }];
        let mut tw = vec![0u128; if wide { n } else { 0 }];
        let mut yi = vec![BigInt::zero(); if wide { 0 } else { n }];
        let mut ti = vec![BigInt::zero(); if wide { 0 } else { n }];
        for i in 0..iterations {
            let bt: Vec<BigUint> = b.iter().map(|bj| digit_with_power(bj, self.delta, &p_pow, p)).collect();
            let rhs: Vec<F::Elem> =
                bt.iter().zip(&r).map(|(x, ri)| f.sub(&f.from_biguint(x), &f.from_bigint(ri))).collect();
            let y = self.solver.solve(&rhs, &mut self.rng)?;
            let digits: Vec<BigUint> = y.iter().map(|e| f.to_biguint(e)).collect();
            sink.push(lo, hi, &digits, p, &p_pow)?;

            // r̃ ← (r̃ + Aỹ − b̃)/p, an exact division. When the carries fit
            // in 126 bits it is computed mod 2¹²⁸ with p⁻¹.
            if let Some(aw) = &self.wrap {
                for (w, d) in yw.iter_mut().zip(&digits) {
                    *w = Wrap128::from_biguint(d);
                }
                aw.apply(&yw, &mut tw)?;
                for j in 0..n {
                    let s = tw[j].wrapping_add(Wrap128.from_bigint(&r[j])).wrapping_sub(Wrap128::from_biguint(&bt[j]));
                    r[j] = BigInt::from(s.wrapping_mul(self.pinv) as i128);
                }
            } else {
                for (w, d) in yi.iter_mut().zip(&digits) {
                    *w = BigInt::from(d.clone());
                }
                self.int.as_ref().unwrap().apply(&yi, &mut ti)?;
                for j in 0..n {
                    let s = &ti[j] + &r[j] - BigInt::from(bt[j].clone());
                    let (q, rem) = s.div_rem(&self.pint);
                    debug_assert!(rem.is_zero());
                    r[j] = q;
                }
            }
            let norm = r.iter().map(|x| x.abs()).max().unwrap_or_default();
            if norm > bound {
                return Err(Error::ResidualBound { iteration: i });
            }
            if norm > self.stats.max_residual {
                self.stats.max_residual = norm;
            }
            let live = r.iter().map(word).sum::<u64>() + 4 * n as u64 * f.bits() + 256 * yw.len() as u64;
            vectors.at_least(live);
            p_pow *= &self.pint;
            p_pow_charge.at_least(word(&p_pow));
        }
        self.stats.iterations = self.stats.iterations.max(iterations);
        self.stats.passes += 1;
        Ok(())
    }

    fn stats(&self) -> LiftStats {
        self.stats.clone()
    }

    fn iterations(&self, b: &[BigInt]) -> usize {
        iterations_for(b.len(), self.col_bits, b, self.p)
    }
}

/// Everything fixed by the operator alone: `Δ`, the lifting prime and the
/// column norm bound.
struct Prepared {
    delta: BigInt,
    p: BigUint,
    col_bits: u64,
    residual_bound: BigInt,
    failure: f64,
    n: usize,
    u: BigInt,
}

fn prepare(op: &LinearOperator<'_>, seed: Seed, cfg: &SolverConfig) -> Result<Option<Prepared>> {
    let n = op.rows();
    if n != op.cols() {
        return Err(Error::DimensionMismatch { expected: n, found: op.cols() });
    }
    let delta = determinant_op(op, seed.derive("det"), cfg)?;
    if delta.is_zero() {
        return Ok(None);
    }
    let u = op.max_abs_entry().max(BigInt::one());
    let nb = BigInt::from(n);
    let lower = (&nb * &nb * &nb * &u).max(BigInt::from(16)).max(&nb * &nb * 6u32).into_parts().1;
    let mut prime_rng = seed.derive("lift.prime").rng();
    let mut p = None;
    for _ in 0..=cfg.prime_resamples {
        let cand = primes::sample_primes_with(1, &lower, cfg.c, primes::DEFAULT_ROUNDS, &mut prime_rng)?.remove(0);
        // Δ is known exactly, so p ∤ Δ is checked directly.
        if !(&delta % BigInt::from(cand.clone())).is_zero() {
            p = Some(cand);
            break;
        }
    }
    let p = p.ok_or(Error::RetriesExhausted("lifting prime"))?;
    let col_bits = column_norms_sq(op)?.iter().map(sqrt_bits).sum();
    let residual_bound = BigInt::from(2 * n) * &u;
    Ok(Some(Prepared { delta, p, col_bits, residual_bound, failure: failure_budget(n, cfg.c), n, u }))
}

/// A nonsingular operator with its determinant, lifting prime and mod-p
/// minimal polynomial fixed, ready for any number of right-hand sides.
pub struct Solver<'r> {
    lifter: &'r mut dyn Lifter,
    delta: &'r BigInt,
    n: usize,
    u: &'r BigInt,
    blocks: Option<usize>,
}

impl Solver<'_> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn determinant(&self) -> &BigInt {
        self.delta
    }

    /// Entry-wise `e^ε`-approximation of `A⁻¹b`.
    pub fn solve(&mut self, b: &[BigInt], eps: f64) -> Result<Vec<Float>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: b.len() });
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::invalid("ε must lie in (0, 1)"));
        }
        let n = self.n;
        let prec = accumulator_bits(n, self.u, eps, self.lifter.iterations(b));
        let k = self.blocks.unwrap_or_else(|| block_count(n, self.u, eps));
        let delta_f = Float::from_bigint(self.delta, prec)?;
        let mut out = Vec::with_capacity(n);
        for (lo, hi) in blocks_for(n, k) {
            let mut acc = FloatSink::new(hi - lo, prec);
            self.lifter.pass(b, lo, hi, &mut acc)?;
            for k in 0..acc.plus.len() {
                let y = sign_combine(&acc.plus[k], &acc.minus[k], !acc.nonzero[k])?;
                out.push(if y.is_zero() { y } else { y.div(&delta_f)? });
            }
        }
        Ok(out)
    }

    pub fn stats(&self) -> LiftStats {
        self.lifter.stats()
    }

    fn exact(&mut self, b: &[BigInt]) -> Result<Vec<BigInt>> {
        let mut sink = ExactSink { sum: vec![BigInt::zero(); self.n] };
        self.lifter.pass(b, 0, self.n, &mut sink)?;
        Ok(sink.sum)
    }
}

/// Prepares `op` once and hands a [`Solver`] to `body`, or `None` when the
/// operator is singular.
pub fn with_solver<T>(
    op: &LinearOperator<'_>,
    seed: Seed,
    cfg: &SolverConfig,
    body: impl FnOnce(Option<&mut Solver<'_>>) -> Result<T>,
) -> Result<T> {
    let Some(prep) = prepare(op, seed, cfg)? else {
        return body(None);
    };
    let _charge = meter::charge("solver.prepared", prep.delta.bits() + prep.p.bits() + prep.u.bits() + 128);
    let rng = seed.derive("lift.solve").rng();
    crate::with_field!(&prep.p, |f| run_with(f, op, &prep, rng, cfg.blocks, body))
}

fn run_with<F: PrimeField, T>(
    f: &F,
    op: &LinearOperator<'_>,
    prep: &Prepared,
    mut rng: Rng,
    blocks: Option<usize>,
    body: impl FnOnce(Option<&mut Solver<'_>>) -> Result<T>,
) -> Result<T> {
    let a = op.bind(f);
    let (wrap_ring, int_ring) = (Wrap128, IntRing);
    let wide = prep.residual_bound.bits() < 126;
    let solver = ZpSolver::new(&a, prep.failure, &mut rng)?;
    let mut lifter = LiftImpl {
        f,
        solver,
        wrap: op_if(wide, || op.bind(&wrap_ring)),
        int: op_if(!wide, || op.bind(&int_ring)),
        rng,
        delta: &prep.delta,
        p: &prep.p,
        pint: BigInt::from(prep.p.clone()),
        pinv: Wrap128::inv_odd(Wrap128::from_biguint(&prep.p)),
        col_bits: prep.col_bits,
        stats: LiftStats {
            prime: prep.p.clone(),
            iterations: 0,
            passes: 0,
            max_residual: BigInt::zero(),
            residual_bound: prep.residual_bound.clone(),
        },
    };
    let mut s = Solver { lifter: &mut lifter, delta: &prep.delta, n: prep.n, u: &prep.u, blocks };
    body(Some(&mut s))
}

fn op_if<T>(cond: bool, f: impl FnOnce() -> T) -> Option<T> {
    if cond {
        Some(f())
    } else {
        None
    }
}

/// Accumulator width `L = ⌈2 log₂(nU/ε)⌉` (with ε clamped at
/// `2^(−2n log₂(2nU))`), widened if needed so the `2T + 8` roundings of one
/// output entry stay below ε.
pub fn accumulator_bits(n: usize, u: &BigInt, eps: f64, iterations: usize) -> u32 {
    let log_nu = (n as f64).log2() + bigint_log2(u);
    let log_inv_eps = (-eps.log2()).min(2.0 * n as f64 * (1.0 + log_nu)).max(0.0);
    let l = (2.0 * (log_nu + log_inv_eps)).ceil();
    let guard = ((2 * iterations + 8) as f64).log2().ceil() + log_inv_eps.ceil() + 1.0;
    l.max(guard).max(8.0) as u32
}

pub(crate) fn bigint_log2(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 52 {
        x.to_f64().unwrap_or(1.0).max(1.0).log2()
    } else {
        let top = (x.abs() >> (bits - 52) as u64).to_f64().unwrap();
        top.log2() + (bits - 52) as f64
    }
}

/// Default number of coordinate blocks.
pub fn block_count(n: usize, u: &BigInt, eps: f64) -> usize {
    let log_2nu = (2.0 * n as f64).log2() + bigint_log2(u);
    let k = ((-eps.log2()).max(0.0) / log_2nu).ceil() as usize;
    k.clamp(1, n.max(1))
}

fn blocks_for(n: usize, k: usize) -> Vec<(usize, usize)> {
    let size = n.div_ceil(k.max(1)).max(1);
    (0..n).step_by(size).map(|lo| (lo, (lo + size).min(n))).collect()
}

/// Entry-wise `e^ε`-approximation of `A⁻¹b` for a black-box operator.
pub fn lin_solve_op(op: &LinearOperator<'_>, b: &[BigInt], eps: f64, seed: Seed, cfg: &SolverConfig) -> Result<SolveOutcome> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("ε must lie in (0, 1)"));
    }
    if b.len() != op.rows() {
        return Err(Error::DimensionMismatch { expected: op.rows(), found: b.len() });
    }
    with_solver(op, seed, cfg, |s| match s {
        None => Ok(SolveOutcome::Singular),
        Some(s) => Ok(SolveOutcome::Solution(s.solve(b, eps)?)),
    })
}

/// Entry-wise `e^ε`-approximation of `A⁻¹b`, or `Singular`.
pub fn lin_solve(a: &SparseMatrix, b: &[BigInt], eps: f64, seed: Seed, cfg: &SolverConfig) -> Result<SolveOutcome> {
    lin_solve_op(&LinearOperator::base(a), b, eps, seed, cfg)
}

/// Exact-mode run of the lifting loop: returns `Δ`, the run statistics and
/// the exact digit sums `Σᵢ ỹ⁽ⁱ⁾pⁱ`. `None` when singular.
pub fn lift_exact(a: &SparseMatrix, b: &[BigInt], seed: Seed, cfg: &SolverConfig) -> Result<Option<(BigInt, LiftStats, Vec<BigInt>)>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    with_solver(&LinearOperator::base(a), seed, cfg, |s| match s {
        None => Ok(None),
        Some(s) => {
            let sums = s.exact(b)?;
            Ok(Some((s.determinant().clone(), s.stats(), sums)))
        }
    })
}

/// `Aᵀb` streamed row by row (O(d) live entries).
fn transpose_times(a: &SparseMatrix, b: &[BigInt]) -> Result<Vec<BigInt>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    let mut out = vec![BigInt::zero(); a.cols()];
    for (j, bj) in b.iter().enumerate() {
        for &(_, i, v) in a.row(j) {
            out[i] += bj * v;
        }
    }
    Ok(out)
}

/// Least squares `argmin ‖Ax − b‖₂` through the normal equations, with
/// `AᵀA` applied as a row-streamed Gram operator.
pub fn linear_regression(a: &SparseMatrix, b: &[BigInt], eps: f64, seed: Seed, cfg: &SolverConfig) -> Result<Vec<Float>> {
    let rhs = transpose_times(a, b)?;
    let _charge = meter::charge("regression.rhs", meter::bigint_bits(&rhs));
    match lin_solve_op(&LinearOperator::gram(a), &rhs, eps, seed, cfg)? {
        SolveOutcome::Singular => Err(Error::Singular),
        SolveOutcome::Solution(x) => Ok(x),
    }
}

/// Sign of an integer as −1, 0, 1.
pub fn sign_of(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
