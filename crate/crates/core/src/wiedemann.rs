//! Finite-field core: Berlekamp–Massey, Wiedemann's minimal polynomial,
//! kernel vectors, linear solves and preconditioned determinants mod p.
//!
//! Every routine keeps O(n) field elements live. Results that can be
//! checked cheaply (kernel vectors, solutions) are verified with one extra
//! product before being returned, and retried otherwise.

use crate::field::{PrimeField, Ring};
use crate::linop::{Bound, LinearOperator};
use crate::meter;
use crate::seed::Rng;
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};

/// Polynomial over F_p, coefficients lowest degree first, canonical residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    pub p: BigUint,
    pub coeffs: Vec<BigUint>,
}

impl FpPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Builds from small coefficients (lowest degree first), reducing mod p.
    pub fn from_u64(p: u64, coeffs: &[u64]) -> FpPoly {
        let p = BigUint::from(p);
        let coeffs = coeffs.iter().map(|&c| BigUint::from(c) % &p).collect();
        FpPoly { p, coeffs }
    }
}

fn to_poly<F: PrimeField>(f: &F, c: &[F::Elem]) -> FpPoly {
    FpPoly { p: f.modulus().clone(), coeffs: c.iter().map(|e| f.to_biguint(e)).collect() }
}

fn vec_bits<F: PrimeField>(f: &F, n: usize) -> u64 {
    n as u64 * f.bits()
}

/// `⌈k · ln(1/δ)⌉`, at least 1.
pub fn repetitions(k: f64, delta: f64) -> usize {
    ((k * (1.0 / delta).ln()).ceil() as usize).max(1)
}

/// Monic minimal linear recurrence `g` of `seq`: `Σᵢ gᵢ seq_{i+j} = 0` for
/// every valid j, lowest degree first.
pub fn berlekamp_massey_in<F: PrimeField>(f: &F, seq: &[F::Elem]) -> Vec<F::Elem> {
    let _charge = meter::charge("wiedemann.bm", 3 * vec_bits(f, seq.len() / 2 + 1));
    // Connection polynomial c(x) = 1 + c₁x + … with s_k + Σ cᵢ s_{k−i} = 0.
    let mut c = vec![f.one()];
    let mut b = vec![f.one()];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut bd = f.one();
    for k in 0..seq.len() {
        let mut d = seq[k].clone();
        for i in 1..=len.min(c.len() - 1) {
            d = f.add(&d, &f.mul(&c[i], &seq[k - i]));
        }
        if f.is_zero(&d) {
            shift += 1;
            continue;
        }
        let coef = f.mul(&d, &f.inv(&bd).expect("nonzero discrepancy"));
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, f.zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + shift] = f.sub(&c[i + shift], &f.mul(&coef, bi));
        }
        if 2 * len <= k {
            len = k + 1 - len;
            b = prev;
            bd = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.resize(len + 1, f.zero());
    c.reverse();
    c
}

/// Public form of [`berlekamp_massey_in`] on canonical residues.
pub fn berlekamp_massey(seq: &[BigUint], p: &BigUint) -> FpPoly {
    crate::with_field!(p, |f| {
        let s: Vec<_> = seq.iter().map(|x| f.from_biguint(x)).collect();
        to_poly(f, &berlekamp_massey_in(f, &s))
    })
}

/// One Wiedemann run: random projections x, y and the scalars xᵀAⁱy for
/// i < 2n, fed to Berlekamp–Massey. Always a monic factor of μ_A.
pub fn wiedemann_run<F: PrimeField>(op: &Bound<'_, F>, rng: &mut Rng) -> Vec<F::Elem> {
    let f = op.ring();
    let n = op.rows();
    let _charge = meter::charge("wiedemann.krylov", vec_bits(f, 3 * n + 2 * n));
    let x: Vec<F::Elem> = (0..n).map(|_| f.random(rng)).collect();
    let mut y: Vec<F::Elem> = (0..n).map(|_| f.random(rng)).collect();
    let mut t = vec![f.zero(); n];
    let mut seq = Vec::with_capacity(2 * n);
    for i in 0..2 * n {
        seq.push(dot(f, &x, &y));
        if i + 1 < 2 * n {
            op.apply(&y, &mut t).expect("square operator");
            std::mem::swap(&mut y, &mut t);
        }
    }
    berlekamp_massey_in(f, &seq)
}

fn dot<F: PrimeField>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter().zip(b).fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
}

/// Best of `boost` Wiedemann runs (largest degree).
pub fn minimal_polynomial_in<F: PrimeField>(op: &Bound<'_, F>, boost: usize, rng: &mut Rng) -> Vec<F::Elem> {
    let mut best: Option<Vec<F::Elem>> = None;
    for _ in 0..boost.max(1) {
        let g = wiedemann_run(op, rng);
        if g.len() == op.rows() + 1 {
            return g;
        }
        if best.as_ref().is_none_or(|b| g.len() > b.len()) {
            best = Some(g);
        }
    }
    best.unwrap()
}

pub fn minimal_polynomial(op: &LinearOperator<'_>, p: &BigUint, boost: usize, rng: &mut Rng) -> Result<FpPoly> {
    square(op)?;
    Ok(crate::with_field!(p, |f| to_poly(f, &minimal_polynomial_in(&op.bind(f), boost, rng))))
}

fn square(op: &LinearOperator<'_>) -> Result<()> {
    if op.rows() != op.cols() {
        return Err(Error::DimensionMismatch { expected: op.rows(), found: op.cols() });
    }
    Ok(())
}

/// `out ← g(A) z` by Horner's rule with two live vectors.
fn poly_apply<F: PrimeField>(op: &Bound<'_, F>, g: &[F::Elem], z: &[F::Elem]) -> Vec<F::Elem> {
    let f = op.ring();
    let n = z.len();
    let _charge = meter::charge("wiedemann.horner", vec_bits(f, 2 * n));
    let lead = g.last().cloned().unwrap_or_else(|| f.zero());
    let mut acc: Vec<F::Elem> = z.iter().map(|x| f.mul(&lead, x)).collect();
    let mut t = vec![f.zero(); n];
    for k in (0..g.len().saturating_sub(1)).rev() {
        op.apply(&acc, &mut t).expect("square operator");
        for (a, (ti, zi)) in acc.iter_mut().zip(t.iter().zip(z)) {
            *a = f.add(ti, &f.mul(&g[k], zi));
        }
    }
    acc
}

fn is_zero_vec<F: PrimeField>(f: &F, v: &[F::Elem]) -> bool {
    v.iter().all(|x| f.is_zero(x))
}

/// Nonzero kernel vector of a singular operator, verified. Each attempt
/// uses one Wiedemann run; at most `⌈48 ln(1/δ)⌉` attempts are made.
pub fn find_kernel_in<F: PrimeField>(op: &Bound<'_, F>, delta: f64, rng: &mut Rng) -> Result<Vec<F::Elem>> {
    let f = op.ring();
    let n = op.rows();
    let _charge = meter::charge("wiedemann.kernel", vec_bits(f, 3 * n));
    for _ in 0..repetitions(48.0, delta) {
        let mu = wiedemann_run(op, rng);
        let c = mu.iter().take_while(|x| f.is_zero(x)).count();
        let z: Vec<F::Elem> = (0..n).map(|_| f.random(rng)).collect();
        let mut w = poly_apply(op, &mu[c..], &z);
        if is_zero_vec(f, &w) {
            continue;
        }
        let mut t = vec![f.zero(); n];
        for _ in 0..=n {
            op.apply(&w, &mut t).expect("square operator");
            if is_zero_vec(f, &t) {
                return Ok(w);
            }
            std::mem::swap(&mut w, &mut t);
        }
    }
    Err(Error::RetriesExhausted("find_kernel"))
}

pub fn find_kernel(op: &LinearOperator<'_>, p: &BigUint, delta: f64, rng: &mut Rng) -> Result<Vec<BigUint>> {
    square(op)?;
    crate::with_field!(p, |f| {
        let v = find_kernel_in(&op.bind(f), delta, rng)?;
        Ok(v.iter().map(|x| f.to_biguint(x)).collect())
    })
}

/// Solves `A x ≡ b (mod p)` through a kernel vector `(y, v)` of
/// `[[A, −b], [0, 0]]`, returning `y / v`, verified.
pub fn linsolve_zp(op: &LinearOperator<'_>, b: &[BigUint], p: &BigUint, delta: f64, rng: &mut Rng) -> Result<Vec<BigUint>> {
    square(op)?;
    let n = op.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let bi: Vec<BigInt> = b.iter().map(|x| BigInt::from(x.clone())).collect();
    let aug = op.clone().augment(&bi)?;
    crate::with_field!(p, |f| {
        let a = op.bind(f);
        let g = aug.bind(f);
        let rhs: Vec<_> = b.iter().map(|x| f.from_biguint(x)).collect();
        let mut check = vec![f.zero(); n];
        let tries = repetitions(48.0, delta);
        for _ in 0..tries {
            let k = match find_kernel_in(&g, delta, rng) {
                Ok(k) => k,
                Err(_) => break,
            };
            let Some(vinv) = f.inv(&k[n]) else { continue };
            let x: Vec<_> = k[..n].iter().map(|y| f.mul(y, &vinv)).collect();
            a.apply(&x, &mut check)?;
            if check == rhs {
                return Ok(x.iter().map(|e| f.to_biguint(e)).collect());
            }
        }
        Err(Error::RetriesExhausted("linsolve_zp"))
    })
}

/// Repeated solves against one operator mod p: the minimal polynomial is
/// found once and each right-hand side costs `deg μ` products by Horner's
/// rule, `x = −μ₀⁻¹ Σ_{k≥1} μ_k A^{k−1} b`. Every solution is verified; a
/// failed check triggers a fresh minimal polynomial.
pub struct ZpSolver<'s, F: PrimeField> {
    op: &'s Bound<'s, F>,
    mu: Vec<F::Elem>,
    neg_inv_mu0: F::Elem,
    max_tries: usize,
    _charge: meter::Charge,
}

impl<'s, F: PrimeField> ZpSolver<'s, F> {
    /// Fails with [`Error::Singular`] when the operator is singular mod p
    /// (a factor of μ_A divisible by X proves it).
    pub fn new(op: &'s Bound<'s, F>, delta: f64, rng: &mut Rng) -> Result<Self> {
        let f = op.ring();
        let mu = wiedemann_run(op, rng);
        let charge = meter::charge("wiedemann.solver_mu", vec_bits(f, op.rows() + 1));
        let mut s = ZpSolver {
            op,
            neg_inv_mu0: f.zero(),
            mu: Vec::new(),
            max_tries: repetitions(48.0, delta),
            _charge: charge,
        };
        s.set_mu(mu)?;
        Ok(s)
    }

    fn set_mu(&mut self, mu: Vec<F::Elem>) -> Result<()> {
        let f = self.op.ring();
        let inv = f.inv(&mu[0]).ok_or(Error::Singular)?;
        self.neg_inv_mu0 = f.neg(&inv);
        self.mu = mu;
        Ok(())
    }

    pub fn solve(&mut self, b: &[F::Elem], rng: &mut Rng) -> Result<Vec<F::Elem>> {
        let f = self.op.ring();
        let n = b.len();
        let mut check = vec![f.zero(); n];
        for attempt in 0..self.max_tries {
            if attempt > 0 {
                let mu = wiedemann_run(self.op, rng);
                if mu.len() >= self.mu.len() {
                    self.set_mu(mu)?;
                }
            }
            let s = poly_apply(self.op, &self.mu[1..], b);
            let x: Vec<F::Elem> = s.iter().map(|e| f.mul(e, &self.neg_inv_mu0)).collect();
            self.op.apply(&x, &mut check)?;
            if check == b {
                return Ok(x);
            }
        }
        Err(Error::RetriesExhausted("linsolve_zp"))
    }
}

/// `det(A) mod p` over preconditioned runs: with a random nonsingular
/// diagonal D, the recurrence f found for DA has degree n exactly when it is
/// the characteristic polynomial, and then `det A = (−1)ⁿ f(0) / ∏ dᵢ`.
/// Such a run is a certificate and ends the vote at once; otherwise the run
/// votes 0, and 0 is returned after `⌈18 ln(1/δ)⌉` runs without a
/// certificate.
pub fn determinant_zp_in<F: PrimeField>(op: &LinearOperator<'_>, f: &F, delta: f64, rng: &mut Rng) -> Result<F::Elem> {
    square(op)?;
    let n = op.rows();
    let runs = repetitions(18.0, delta);
    let _charge = meter::charge("wiedemann.det_diag", vec_bits(f, n));
    for _ in 0..runs {
        let d: Vec<F::Elem> = (0..n).map(|_| f.random_nonzero(rng)).collect();
        let dint: Vec<BigInt> = d.iter().map(|x| BigInt::from(f.to_biguint(x))).collect();
        let da = op.clone().diag_scale(dint)?;
        let g = wiedemann_run(&da.bind(f), rng);
        if g.len() == n + 1 {
            let prod = d.iter().fold(f.one(), |acc, x| f.mul(&acc, x));
            let v = f.mul(&g[0], &f.inv(&prod).expect("nonzero diagonal"));
            return Ok(if n % 2 == 1 { f.neg(&v) } else { v });
        }
    }
    Ok(f.zero())
}

pub fn determinant_zp(op: &LinearOperator<'_>, p: &BigUint, delta: f64, rng: &mut Rng) -> Result<BigUint> {
    crate::with_field!(p, |f| determinant_zp_in(op, f, delta, rng).map(|e| f.to_biguint(&e)))
}
