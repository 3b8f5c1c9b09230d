use crate::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::Fixed;

/// An L-bit floating-point number `mantissa · 2^exponent`.
///
/// The mantissa is kept odd (or zero) so equal values are structurally
/// equal. Every operation rounds the exact result to `prec` mantissa bits,
/// half to even. Debug builds carry `merr`, an upper bound on
/// `|ln(value / exact)|` accumulated through each operation.
#[derive(Clone, Debug)]
pub struct Float {
    mant: BigInt,
    exp: i64,
    prec: u32,
    #[cfg(debug_assertions)]
    merr: f64,
}

fn unit(prec: u32) -> f64 {
    (-(prec.min(2000) as f64)).exp2()
}

/// Rounds `mag · 2^exp (+ sticky)` to `prec` bits. When `sticky` is set the
/// caller guarantees `mag` has more than `prec` bits, so the discarded part
/// is visible.
fn round_mag(mut mag: BigUint, mut exp: i64, sticky: bool, prec: u32) -> (BigUint, i64, bool) {
    if mag.is_zero() {
        return (mag, 0, sticky);
    }
    let bits = mag.bits();
    let mut inexact = sticky;
    if bits > prec as u64 {
        let k = bits - prec as u64;
        let tz = mag.trailing_zeros().unwrap_or(0);
        let half_bit = mag.bit(k - 1);
        let below_half_zero = tz >= k - 1;
        inexact |= tz < k;
        let q: BigUint = &mag >> k;
        let up = half_bit && (!below_half_zero || sticky || q.bit(0));
        mag = if up { q + 1u32 } else { q };
        exp += k as i64;
    }
    let tz = mag.trailing_zeros().unwrap_or(0);
    mag >>= tz;
    exp += tz as i64;
    (mag, exp, inexact)
}

impl Float {
    pub fn zero(prec: u32) -> Float {
        Float::raw(BigInt::zero(), 0, prec, 0.0)
    }

    fn raw(mant: BigInt, exp: i64, prec: u32, _merr: f64) -> Float {
        Float {
            mant,
            exp,
            prec,
            #[cfg(debug_assertions)]
            merr: _merr,
        }
    }

    fn build(neg: bool, mag: BigUint, exp: i64, sticky: bool, prec: u32, merr_in: f64) -> Result<Float> {
        let (mag, exp, inexact) = round_mag(mag, exp, sticky, prec);
        if mag.is_zero() {
            return Ok(Float::zero(prec));
        }
        let merr = merr_in + if inexact { unit(prec) } else { 0.0 };
        let sign = if neg { Sign::Minus } else { Sign::Plus };
        let f = Float::raw(BigInt::from_biguint(sign, mag), exp, prec, merr);
        f.check_range()?;
        Ok(f)
    }

    fn check_range(&self) -> Result<()> {
        if self.mant.is_zero() || self.prec >= 62 {
            return Ok(());
        }
        let limit = 1i64 << self.prec;
        let top = self.top();
        let ok = top >= -limit && (top < limit || (top == limit && self.mant.magnitude().is_one()));
        if ok {
            Ok(())
        } else {
            Err(Error::Overflow)
        }
    }

    /// `⌊log₂ |x|⌋` for nonzero x.
    fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64 - 1
    }

    /// Rounds `mant · 2^exp` to `prec` bits.
    pub fn from_parts(mant: BigInt, exp: i64, prec: u32) -> Result<Float> {
        let neg = mant.is_negative();
        Float::build(neg, mant.into_parts().1, exp, false, prec, 0.0)
    }

    pub fn from_bigint(x: &BigInt, prec: u32) -> Result<Float> {
        Float::from_parts(x.clone(), 0, prec)
    }

    pub fn from_i64(x: i64, prec: u32) -> Float {
        Float::from_parts(BigInt::from(x), 0, prec).expect("small integers are in range")
    }

    /// Nearest L-bit float to `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Float> {
        if den.is_zero() {
            return Err(Error::DivideByZero);
        }
        if num.is_zero() {
            return Ok(Float::zero(prec));
        }
        let neg = num.is_negative() != den.is_negative();
        Float::ratio_mag(num.magnitude(), den.magnitude(), 0, neg, prec, 0.0)
    }

    fn ratio_mag(num: &BigUint, den: &BigUint, exp: i64, neg: bool, prec: u32, merr: f64) -> Result<Float> {
        let shift = (prec as i64 + 2 + den.bits() as i64 - num.bits() as i64).max(0);
        let scaled = num << shift as u64;
        let (q, r) = num_integer::Integer::div_rem(&scaled, den);
        Float::build(neg, q, exp - shift, !r.is_zero(), prec, merr)
    }

    /// Exact conversion of a finite f64 followed by rounding to `prec` bits.
    pub fn from_f64(x: f64, prec: u32) -> Result<Float> {
        if !x.is_finite() {
            return Err(Error::Overflow);
        }
        if x == 0.0 {
            return Ok(Float::zero(prec));
        }
        let bits = x.to_bits();
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 { (frac, -1074) } else { (frac | (1u64 << 52), e - 1075) };
        let m = BigInt::from(m);
        Float::from_parts(if x < 0.0 { -m } else { m }, e, prec)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// −1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Tracked bound on `|ln(self / exact)|`.
    #[cfg(debug_assertions)]
    pub fn merr(&self) -> f64 {
        self.merr
    }

    fn merr_or_zero(&self) -> f64 {
        #[cfg(debug_assertions)]
        {
            self.merr
        }
        #[cfg(not(debug_assertions))]
        {
            0.0
        }
    }

    pub fn with_prec(mut self, prec: u32) -> Result<Float> {
        if prec >= self.prec || self.mant.bits() <= prec as u64 {
            self.prec = prec;
            return Ok(self);
        }
        let neg = self.is_negative();
        let merr = self.merr_or_zero();
        Float::build(neg, self.mant.into_parts().1, self.exp, false, prec, merr)
    }

    pub fn neg(&self) -> Float {
        let mut f = self.clone();
        f.mant = -f.mant;
        f
    }

    pub fn abs(&self) -> Float {
        let mut f = self.clone();
        f.mant = f.mant.abs();
        f
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Result<Float> {
        let mut f = self.clone();
        if !f.is_zero() {
            f.exp = f.exp.checked_add(k).ok_or(Error::Overflow)?;
            f.check_range()?;
        }
        Ok(f)
    }

    /// Sum of two floats of the same sign (zero counts as either sign).
    pub fn add_same_sign(&self, other: &Float) -> Result<Float> {
        let prec = self.prec.max(other.prec);
        if other.is_zero() {
            return self.clone().with_prec(prec);
        }
        if self.is_zero() {
            return other.clone().with_prec(prec);
        }
        if self.is_negative() != other.is_negative() {
            return Err(Error::SignMismatch);
        }
        let merr = self.merr_or_zero().max(other.merr_or_zero());
        let (a, b) = if self.top() >= other.top() { (self, other) } else { (other, self) };
        let cut = a.top() - prec as i64 - 3;
        let base = if a.exp.min(b.exp) >= cut { a.exp.min(b.exp) } else { cut.min(a.exp) };
        let am = a.mant.magnitude() << (a.exp - base) as u64;
        let (bm, sticky) = if b.exp >= base {
            (b.mant.magnitude() << (b.exp - base) as u64, false)
        } else {
            let s = (b.exp - base).unsigned_abs();
            let tz = b.mant.magnitude().trailing_zeros().unwrap_or(0);
            (b.mant.magnitude() >> s, tz < s)
        };
        Float::build(a.is_negative(), am + bm, base, sticky, prec, merr)
    }

    pub fn mul(&self, other: &Float) -> Result<Float> {
        let prec = self.prec.max(other.prec);
        if self.is_zero() || other.is_zero() {
            return Ok(Float::zero(prec));
        }
        let merr = self.merr_or_zero() + other.merr_or_zero();
        let exp = self.exp.checked_add(other.exp).ok_or(Error::Overflow)?;
        let neg = self.is_negative() != other.is_negative();
        Float::build(neg, self.mant.magnitude() * other.mant.magnitude(), exp, false, prec, merr)
    }

    pub fn recip(&self) -> Result<Float> {
        if self.is_zero() {
            return Err(Error::DivideByZero);
        }
        let exp = self.exp.checked_neg().ok_or(Error::Overflow)?;
        Float::ratio_mag(&BigUint::one(), self.mant.magnitude(), exp, self.is_negative(), self.prec, self.merr_or_zero())
    }

    /// `self / other` with a single rounding.
    pub fn div(&self, other: &Float) -> Result<Float> {
        if other.is_zero() {
            return Err(Error::DivideByZero);
        }
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return Ok(Float::zero(prec));
        }
        let exp = self.exp.checked_sub(other.exp).ok_or(Error::Overflow)?;
        let neg = self.is_negative() != other.is_negative();
        let merr = self.merr_or_zero() + other.merr_or_zero();
        Float::ratio_mag(self.mant.magnitude(), other.mant.magnitude(), exp, neg, prec, merr)
    }

    pub fn sqrt(&self) -> Result<Float> {
        if self.is_negative() {
            return Err(Error::invalid("square root of a negative float"));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let mut m = self.mant.magnitude().clone();
        let mut e = self.exp;
        if e.rem_euclid(2) == 1 {
            m <<= 1u32;
            e -= 1;
        }
        let want = 2 * (self.prec as i64 + 2);
        let t = ((want - m.bits() as i64 + 1) / 2).max(0);
        m <<= (2 * t) as u64;
        let s = m.sqrt();
        let sticky = &s * &s != m;
        Float::build(false, s, e / 2 - t, sticky, self.prec, self.merr_or_zero() / 2.0)
    }

    /// The exact value as `num / den` with `den` a power of two.
    pub fn to_ratio(&self) -> (BigInt, BigInt) {
        if self.exp >= 0 {
            (&self.mant << self.exp as u64, BigInt::one())
        } else {
            (self.mant.clone(), BigInt::one() << self.exp.unsigned_abs())
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let drop = bits.saturating_sub(64);
        let top: BigUint = self.mant.magnitude() >> drop;
        let m = top.to_u64().unwrap() as f64;
        let e = self.exp + drop as i64;
        let v = m * (e.clamp(-3000, 3000) as f64).exp2();
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Nearest fixed-point value with `frac` fractional bits (ties to even).
    pub fn to_fixed(&self, frac: u32) -> Fixed {
        let shift = self.exp + frac as i64;
        let scaled = if shift >= 0 {
            &self.mant << shift as u64
        } else {
            let mag = self.mant.magnitude();
            let s = shift.unsigned_abs();
            let q: BigUint = mag >> s;
            let half = s >= 1 && mag.bit(s - 1);
            let rest = mag.trailing_zeros().unwrap_or(0) < s - 1;
            let up = half && (rest || q.bit(0));
            let q = BigInt::from(if up { q + 1u32 } else { q });
            if self.is_negative() {
                -q
            } else {
                q
            }
        };
        Fixed::new(scaled, frac)
    }

    /// Decimal rendering with exactly `digits` digits after the point,
    /// rounded half away from zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let (num, den) = self.to_ratio();
        let scaled = num.abs() * BigInt::from(10u32).pow(digits as u32);
        let two = BigInt::from(2u32);
        let q = (&scaled * &two + &den) / (&den * &two);
        let s = q.to_string();
        let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if self.is_negative() && !q.is_zero() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Float) -> bool {
        self.mant == other.mant && (self.mant.is_zero() || self.exp == other.exp)
    }
}

impl Eq for Float {}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Float) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Float {
    fn cmp(&self, other: &Float) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        let mag = match self.top().cmp(&other.top()) {
            Ordering::Equal => {
                let base = self.exp.min(other.exp);
                let a = self.mant.magnitude() << (self.exp - base) as u64;
                let b = other.mant.magnitude() << (other.exp - base) as u64;
                a.cmp(&b)
            }
            o => o,
        };
        if sa < 0 {
            mag.reverse()
        } else {
            mag
        }
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0*2^0");
        }
        let sign = if self.is_negative() { '-' } else { '+' };
        write!(f, "{}{}*2^{}", sign, self.mant.magnitude(), self.exp)
    }
}

/// Parses the `±m*2^e` form. The mantissa is taken exactly; precision is
/// its bit length (at least 1).
impl FromStr for Float {
    type Err = Error;

    fn from_str(s: &str) -> Result<Float> {
        let bad = || Error::invalid(format!("malformed float {s:?}"));
        let (m, e) = s.trim().split_once("*2^").ok_or_else(bad)?;
        let m = m.strip_prefix('+').unwrap_or(m);
        let mant = BigInt::from_str(m).map_err(|_| bad())?;
        let exp = i64::from_str(e).map_err(|_| bad())?;
        let prec = (mant.bits() as u32).max(1);
        Float::from_parts(mant, exp, prec)
    }
}
