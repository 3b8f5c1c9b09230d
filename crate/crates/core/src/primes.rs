//! Miller–Rabin, uniform sampling of distinct primes from `[n, n²]`, and
//! Chinese remaindering.

use crate::seed::Rng;
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng as _;
use std::collections::BTreeSet;

pub const DEFAULT_ROUNDS: u32 = 40;
pub const DEFAULT_C: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Prime,
    Composite,
}

const SMALL_PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

fn mulmod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod64(r, b, m);
        }
        b = mulmod64(b, b, m);
        e >>= 1;
    }
    r
}

fn witness64(x: u64, d: u64, s: u32, a: u64) -> bool {
    let mut y = powmod64(a, d, x);
    if y == 1 || y == x - 1 {
        return false;
    }
    for _ in 1..s {
        y = mulmod64(y, y, x);
        if y == x - 1 {
            return false;
        }
    }
    true
}

fn witness_big(x: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let xm1 = x - 1u32;
    let mut y = a.modpow(d, x);
    if y.is_one() || y == xm1 {
        return false;
    }
    for _ in 1..s {
        y = (&y * &y) % x;
        if y == xm1 {
            return false;
        }
    }
    true
}

/// Miller–Rabin with `rounds` random witnesses. Primes are always reported
/// prime; a composite slips through with probability at most `4^-rounds`.
pub fn test_prime(x: &BigUint, rounds: u32, rng: &mut Rng) -> Primality {
    use Primality::*;
    if *x < BigUint::from(2u32) {
        return Composite;
    }
    for &p in &SMALL_PRIMES {
        if *x == BigUint::from(p) {
            return Prime;
        }
        if (x % p).is_zero() {
            return Composite;
        }
    }
    let xm1 = x - 1u32;
    let s = xm1.trailing_zeros().unwrap_or(0);
    let d = &xm1 >> s;
    if let Some(x64) = x.to_u64() {
        let d64 = d.to_u64().unwrap();
        for _ in 0..rounds {
            let a = rng.gen_range(2..x64 - 1);
            if witness64(x64, d64, s as u32, a) {
                return Composite;
            }
        }
        return Prime;
    }
    let lo = BigUint::from(2u32);
    for _ in 0..rounds {
        let a = rng.gen_biguint_range(&lo, &xm1);
        if witness_big(x, &d, s, &a) {
            return Composite;
        }
    }
    Prime
}

pub fn is_prime(x: &BigUint, rng: &mut Rng) -> bool {
    test_prime(x, DEFAULT_ROUNDS, rng) == Primality::Prime
}

/// `⌈log₂ n⌉` for n ≥ 1.
fn log2_ceil(n: &BigUint) -> u64 {
    (n - 1u32).bits().max(1)
}

/// Samples `k` distinct primes uniformly from `[n, n²]` using failure
/// exponent `c` for the per-prime rejection budget `⌈8(c+2)log₂²n⌉`.
pub fn sample_primes_with(k: usize, n: &BigUint, c: u32, rounds: u32, rng: &mut Rng) -> Result<Vec<BigUint>> {
    if *n < BigUint::from(16u32) {
        return Err(Error::invalid("prime sampling lower bound must be at least 16"));
    }
    if k == 0 || BigUint::from(k) > *n {
        return Err(Error::invalid("prime count must lie in [1, n]"));
    }
    let l = log2_ceil(n);
    let budget = 8 * (c as u64 + 2) * l * l;
    let hi = n * n + 1u32;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(k);
    let _charge = crate::meter::charge("primes.sampled", k as u64 * 2 * l);
    for _ in 0..k {
        let mut found = false;
        for _ in 0..budget {
            let x = rng.gen_biguint_range(n, &hi);
            if !seen.contains(&x) && test_prime(&x, rounds, rng) == Primality::Prime {
                seen.insert(x.clone());
                out.push(x);
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::SamplingExhausted);
        }
    }
    Ok(out)
}

pub fn sample_primes(k: usize, n: &BigUint, rng: &mut Rng) -> Result<Vec<BigUint>> {
    sample_primes_with(k, n, DEFAULT_C, DEFAULT_ROUNDS, rng)
}

/// Incremental (Garner) reconstruction: only the running modulus and
/// residue are stored.
#[derive(Debug, Clone)]
pub struct Crt {
    modulus: BigInt,
    residue: BigInt,
}

impl Default for Crt {
    fn default() -> Self {
        Crt::new()
    }
}

impl Crt {
    pub fn new() -> Crt {
        Crt { modulus: BigInt::one(), residue: BigInt::zero() }
    }

    pub fn push(&mut self, p: &BigInt, r: &BigInt) -> Result<()> {
        if !p.is_positive() || r.is_negative() || r >= p {
            return Err(Error::invalid("CRT residue must lie in [0, p)"));
        }
        let pm = self.modulus.mod_floor(p);
        if pm.is_zero() {
            return Err(Error::DuplicatePrime(p.clone()));
        }
        let g = pm.extended_gcd(p);
        if !g.gcd.is_one() {
            return Err(Error::DuplicatePrime(p.clone()));
        }
        let t = ((r - &self.residue) * g.x).mod_floor(p);
        self.residue += &self.modulus * t;
        self.modulus *= p;
        Ok(())
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    /// Representative in `(-P/2, P/2]`: `R` if `R < P/2`, else `R - P`.
    pub fn signed(&self) -> BigInt {
        if &self.residue * 2u32 < self.modulus {
            self.residue.clone()
        } else {
            &self.residue - &self.modulus
        }
    }

    pub fn bits(&self) -> u64 {
        self.modulus.bits() + self.residue.bits()
    }
}

/// Solves the system `x ≡ rᵢ (mod pᵢ)`, returning `(P, R)` with `0 ≤ R < P`.
pub fn crt_combine(pairs: &[(BigInt, BigInt)]) -> Result<(BigInt, BigInt)> {
    let mut crt = Crt::new();
    for (p, r) in pairs {
        crt.push(p, r)?;
    }
    Ok((crt.modulus, crt.residue))
}
