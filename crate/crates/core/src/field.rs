//! Ring and prime-field arithmetic used by the black-box operators.
//!
//! [`Ring`] is the minimal interface an operator needs to apply itself:
//! the integers ([`IntRing`]), integers mod 2¹²⁸ ([`Wrap128`]) and prime
//! fields all implement it, so `apply_int` and `apply_mod` share one code
//! path. Prime fields use Montgomery form over `N` 64-bit limbs when the
//! modulus fits in 256 bits and fall back to big integers otherwise; pick
//! one for a given modulus with [`with_field!`](crate::with_field).

use crate::seed::Rng;
use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

pub trait Ring: Sync + Send {
    type Elem: Clone + Debug + PartialEq + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, x: i64) -> Self::Elem;
    fn from_bigint(&self, x: &BigInt) -> Self::Elem;

    /// `a · x` for a machine-word integer `a`.
    fn mul_small(&self, a: i64, x: &Self::Elem) -> Self::Elem {
        self.mul(&self.from_i64(a), x)
    }

    /// Information content of one element, for space accounting.
    fn elem_bits(&self, e: &Self::Elem) -> u64;
}

pub trait PrimeField: Ring {
    fn modulus(&self) -> &BigUint;
    /// Bit length of the modulus.
    fn bits(&self) -> u64;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_biguint(&self, x: &BigUint) -> Self::Elem;
    fn to_biguint(&self, a: &Self::Elem) -> BigUint;

    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    /// Multiplicative inverse by Fermat; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return None;
        }
        let e = self.modulus() - 2u32;
        Some(self.pow(a, &e))
    }

    fn random(&self, rng: &mut Rng) -> Self::Elem {
        self.from_biguint(&rng.gen_biguint_below(self.modulus()))
    }

    fn random_nonzero(&self, rng: &mut Rng) -> Self::Elem {
        let x = rng.gen_biguint_range(&BigUint::one(), self.modulus());
        self.from_biguint(&x)
    }
}

/// Exact integer arithmetic.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntRing;

impl Ring for IntRing {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_i64(&self, x: i64) -> BigInt {
        BigInt::from(x)
    }
    fn from_bigint(&self, x: &BigInt) -> BigInt {
        x.clone()
    }
    fn mul_small(&self, a: i64, x: &BigInt) -> BigInt {
        x * a
    }
    fn elem_bits(&self, e: &BigInt) -> u64 {
        e.bits() + 1
    }
}

/// Integers modulo 2¹²⁸ with wrapping arithmetic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Wrap128;

impl Wrap128 {
    /// Inverse of an odd `a` modulo 2¹²⁸ (Newton iteration).
    pub fn inv_odd(a: u128) -> u128 {
        debug_assert!(a & 1 == 1);
        let mut x = a;
        for _ in 0..7 {
            x = x.wrapping_mul(2u128.wrapping_sub(a.wrapping_mul(x)));
        }
        x
    }

    pub fn from_biguint(x: &BigUint) -> u128 {
        let d = x.to_u64_digits();
        d.first().copied().unwrap_or(0) as u128 | (d.get(1).copied().unwrap_or(0) as u128) << 64
    }
}

impl Ring for Wrap128 {
    type Elem = u128;

    fn zero(&self) -> u128 {
        0
    }
    fn add(&self, a: &u128, b: &u128) -> u128 {
        a.wrapping_add(*b)
    }
    fn sub(&self, a: &u128, b: &u128) -> u128 {
        a.wrapping_sub(*b)
    }
    fn neg(&self, a: &u128) -> u128 {
        a.wrapping_neg()
    }
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        a.wrapping_mul(*b)
    }
    fn from_i64(&self, x: i64) -> u128 {
        x as i128 as u128
    }
    fn from_bigint(&self, x: &BigInt) -> u128 {
        let m = Wrap128::from_biguint(x.magnitude());
        if x.is_negative() {
            m.wrapping_neg()
        } else {
            m
        }
    }
    fn mul_small(&self, a: i64, x: &u128) -> u128 {
        (a as i128 as u128).wrapping_mul(*x)
    }
    fn elem_bits(&self, _: &u128) -> u64 {
        128
    }
}

#[inline(always)]
fn mac(a: u64, b: u64, c: u64, carry: u64) -> (u64, u64) {
    let t = a as u128 + b as u128 * c as u128 + carry as u128;
    (t as u64, (t >> 64) as u64)
}

/// Prime field in Montgomery form over `N` limbs; requires an odd modulus
/// below 2^(64N).
#[derive(Debug, Clone)]
pub struct Mont<const N: usize> {
    p: [u64; N],
    pinv: u64,
    r2: [u64; N],
    one: [u64; N],
    modulus: BigUint,
    bits: u64,
}

fn to_limbs<const N: usize>(x: &BigUint) -> [u64; N] {
    let mut out = [0u64; N];
    for (o, d) in out.iter_mut().zip(x.to_u64_digits()) {
        *o = d;
    }
    out
}

fn from_limbs(x: &[u64]) -> BigUint {
    let mut bytes = Vec::with_capacity(x.len() * 8);
    for d in x {
        bytes.extend_from_slice(&d.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

impl<const N: usize> Mont<N> {
    pub fn new(p: &BigUint) -> Mont<N> {
        assert!(p.bit(0) && p.bits() <= 64 * N as u64, "Montgomery field needs an odd modulus that fits");
        let limbs = to_limbs::<N>(p);
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(limbs[0].wrapping_mul(inv)));
        }
        let r = (BigUint::one() << (64 * N)) % p;
        let r2 = (&r * &r) % p;
        Mont {
            p: limbs,
            pinv: inv.wrapping_neg(),
            r2: to_limbs(&r2),
            one: to_limbs(&r),
            modulus: p.clone(),
            bits: p.bits(),
        }
    }

    #[inline]
    fn geq_p(&self, t: &[u64; N]) -> bool {
        for i in (0..N).rev() {
            if t[i] != self.p[i] {
                return t[i] > self.p[i];
            }
        }
        true
    }

    #[inline]
    fn sub_p(&self, t: &mut [u64; N]) {
        let mut borrow = 0u64;
        for i in 0..N {
            let (d, b1) = t[i].overflowing_sub(self.p[i]);
            let (d, b2) = d.overflowing_sub(borrow);
            t[i] = d;
            borrow = (b1 | b2) as u64;
        }
    }

    #[inline]
    fn mont_mul(&self, a: &[u64; N], b: &[u64; N]) -> [u64; N] {
        let mut t = [0u64; N];
        let mut tn = 0u64;
        for &bi in b.iter() {
            let mut c = 0u64;
            for j in 0..N {
                let (lo, hi) = mac(t[j], a[j], bi, c);
                t[j] = lo;
                c = hi;
            }
            let (s, o) = tn.overflowing_add(c);
            tn = s;
            let tn1 = o as u64;
            let m = t[0].wrapping_mul(self.pinv);
            let (_, mut c) = mac(t[0], m, self.p[0], 0);
            for j in 1..N {
                let (lo, hi) = mac(t[j], m, self.p[j], c);
                t[j - 1] = lo;
                c = hi;
            }
            let (s, o) = tn.overflowing_add(c);
            t[N - 1] = s;
            tn = tn1 + o as u64;
        }
        if tn != 0 || self.geq_p(&t) {
            self.sub_p(&mut t);
        }
        t
    }

    fn from_plain_u64(&self, x: u64) -> [u64; N] {
        let mut t = [0u64; N];
        t[0] = if N == 1 { x % self.p[0] } else { x };
        self.mont_mul(&t, &self.r2)
    }
}

impl<const N: usize> Ring for Mont<N> {
    type Elem = [u64; N];

    #[inline]
    fn zero(&self) -> [u64; N] {
        [0; N]
    }

    #[inline]
    fn add(&self, a: &[u64; N], b: &[u64; N]) -> [u64; N] {
        let mut t = [0u64; N];
        let mut carry = false;
        for i in 0..N {
            let (s, c1) = a[i].overflowing_add(b[i]);
            let (s, c2) = s.overflowing_add(carry as u64);
            t[i] = s;
            carry = c1 | c2;
        }
        if carry || self.geq_p(&t) {
            self.sub_p(&mut t);
        }
        t
    }

    #[inline]
    fn sub(&self, a: &[u64; N], b: &[u64; N]) -> [u64; N] {
        let mut t = [0u64; N];
        let mut borrow = false;
        for i in 0..N {
            let (d, b1) = a[i].overflowing_sub(b[i]);
            let (d, b2) = d.overflowing_sub(borrow as u64);
            t[i] = d;
            borrow = b1 | b2;
        }
        if borrow {
            let mut carry = false;
            for i in 0..N {
                let (s, c1) = t[i].overflowing_add(self.p[i]);
                let (s, c2) = s.overflowing_add(carry as u64);
                t[i] = s;
                carry = c1 | c2;
            }
        }
        t
    }

    #[inline]
    fn neg(&self, a: &[u64; N]) -> [u64; N] {
        self.sub(&[0; N], a)
    }

    #[inline]
    fn mul(&self, a: &[u64; N], b: &[u64; N]) -> [u64; N] {
        self.mont_mul(a, b)
    }

    fn from_i64(&self, x: i64) -> [u64; N] {
        let m = self.from_plain_u64(x.unsigned_abs());
        if x < 0 {
            self.neg(&m)
        } else {
            m
        }
    }

    fn from_bigint(&self, x: &BigInt) -> [u64; N] {
        let r = if x.is_negative() || x.magnitude() >= &self.modulus {
            x.mod_floor(&BigInt::from(self.modulus.clone())).into_parts().1
        } else {
            x.magnitude().clone()
        };
        self.mont_mul(&to_limbs(&r), &self.r2)
    }

    fn elem_bits(&self, _: &[u64; N]) -> u64 {
        self.bits
    }
}

impl<const N: usize> PrimeField for Mont<N> {
    fn modulus(&self) -> &BigUint {
        &self.modulus
    }
    fn bits(&self) -> u64 {
        self.bits
    }
    fn one(&self) -> [u64; N] {
        self.one
    }
    fn is_zero(&self, a: &[u64; N]) -> bool {
        a.iter().all(|&x| x == 0)
    }
    fn from_biguint(&self, x: &BigUint) -> [u64; N] {
        let r = if x >= &self.modulus { x % &self.modulus } else { x.clone() };
        self.mont_mul(&to_limbs(&r), &self.r2)
    }
    fn to_biguint(&self, a: &[u64; N]) -> BigUint {
        let mut unit = [0u64; N];
        unit[0] = 1;
        from_limbs(&self.mont_mul(a, &unit))
    }
}

/// Prime field on plain big integers; used for moduli beyond 256 bits and
/// for p = 2.
#[derive(Debug, Clone)]
pub struct BigField {
    p: BigUint,
    bits: u64,
}

impl BigField {
    pub fn new(p: &BigUint) -> BigField {
        BigField { p: p.clone(), bits: p.bits() }
    }
}

impl Ring for BigField {
    type Elem = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.p {
            s - &self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + &self.p - b
        }
    }
    fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            a.clone()
        } else {
            &self.p - a
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.p
    }
    fn from_i64(&self, x: i64) -> BigUint {
        self.from_bigint(&BigInt::from(x))
    }
    fn from_bigint(&self, x: &BigInt) -> BigUint {
        x.mod_floor(&BigInt::from_biguint(Sign::Plus, self.p.clone())).into_parts().1
    }
    fn elem_bits(&self, _: &BigUint) -> u64 {
        self.bits
    }
}

impl PrimeField for BigField {
    fn modulus(&self) -> &BigUint {
        &self.p
    }
    fn bits(&self) -> u64 {
        self.bits
    }
    fn one(&self) -> BigUint {
        BigUint::one() % &self.p
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn from_biguint(&self, x: &BigUint) -> BigUint {
        x % &self.p
    }
    fn to_biguint(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
}

/// Which representation [`with_field!`](crate::with_field) picks for a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Limbs1,
    Limbs2,
    Limbs3,
    Limbs4,
    Big,
}

impl FieldKind {
    pub fn of(p: &BigUint) -> FieldKind {
        if !p.bit(0) {
            return FieldKind::Big;
        }
        match p.bits() {
            0..=64 => FieldKind::Limbs1,
            65..=128 => FieldKind::Limbs2,
            129..=192 => FieldKind::Limbs3,
            193..=256 => FieldKind::Limbs4,
            _ => FieldKind::Big,
        }
    }
}

/// Evaluates `$body` with `$f` bound to a `&impl PrimeField` for modulus `$p`.
#[macro_export]
macro_rules! with_field {
    ($p:expr, |$f:ident| $body:expr) => {{
        let __p: &$crate::BigUint = $p;
        match $crate::field::FieldKind::of(__p) {
            $crate::field::FieldKind::Limbs1 => {
                let $f = &$crate::field::Mont::<1>::new(__p);
                $body
            }
            $crate::field::FieldKind::Limbs2 => {
                let $f = &$crate::field::Mont::<2>::new(__p);
                $body
            }
            $crate::field::FieldKind::Limbs3 => {
                let $f = &$crate::field::Mont::<3>::new(__p);
                $body
            }
            $crate::field::FieldKind::Limbs4 => {
                let $f = &$crate::field::Mont::<4>::new(__p);
                $body
            }
            $crate::field::FieldKind::Big => {
                let $f = &$crate::field::BigField::new(__p);
                $body
            }
        }
    }};
}

/// Reduces `x` into `[0, p)`.
pub fn residue(x: &BigInt, p: &BigUint) -> BigUint {
    x.mod_floor(&BigInt::from_biguint(Sign::Plus, p.clone())).into_parts().1
}

/// `x` as a `u64` if it fits.
pub fn small(x: &BigUint) -> Option<u64> {
    x.to_u64()
}
