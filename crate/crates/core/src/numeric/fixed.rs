use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

use super::Float;

/// Fixed-point value `scaled / 2^frac`.
#[derive(Clone, Debug)]
pub struct Fixed {
    scaled: BigInt,
    frac: u32,
}

impl Fixed {
    pub fn new(scaled: BigInt, frac: u32) -> Fixed {
        Fixed { scaled, frac }
    }

    pub fn zero(frac: u32) -> Fixed {
        Fixed::new(BigInt::zero(), frac)
    }

    pub fn from_int(x: impl Into<BigInt>, frac: u32) -> Fixed {
        Fixed::new(x.into() << frac as u64, frac)
    }

    /// Nearest value to `x` on the `2^-frac` grid.
    pub fn from_f64(x: f64, frac: u32) -> Result<Fixed> {
        Ok(Float::from_f64(x, 64)?.to_fixed(frac))
    }

    /// Largest grid value not exceeding `num / den` (den > 0).
    pub fn floor_ratio(num: &BigInt, den: &BigInt, frac: u32) -> Result<Fixed> {
        if !den.is_positive() {
            return Err(Error::invalid("fixed-point ratio needs a positive denominator"));
        }
        let scaled = super::floor_div(&(num << frac as u64), den);
        Ok(Fixed::new(scaled, frac))
    }

    pub fn scaled(&self) -> &BigInt {
        &self.scaled
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac
    }

    pub fn is_zero(&self) -> bool {
        self.scaled.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.scaled.is_negative()
    }

    /// Same value with `frac` fractional bits; rounds to nearest (ties away
    /// from zero) when bits are dropped.
    pub fn rescale(&self, frac: u32) -> Fixed {
        if frac >= self.frac {
            return Fixed::new(&self.scaled << (frac - self.frac) as u64, frac);
        }
        let s = (self.frac - frac) as u64;
        let half = BigInt::from(1) << (s - 1);
        let mag = (self.scaled.abs() + half) >> s;
        Fixed::new(if self.is_negative() { -mag } else { mag }, frac)
    }

    fn align(&self, other: &Fixed) -> (BigInt, BigInt, u32) {
        let f = self.frac.max(other.frac);
        (
            &self.scaled << (f - self.frac) as u64,
            &other.scaled << (f - other.frac) as u64,
            f,
        )
    }

    pub fn add(&self, other: &Fixed) -> Fixed {
        let (a, b, f) = self.align(other);
        Fixed::new(a + b, f)
    }

    pub fn sub(&self, other: &Fixed) -> Fixed {
        let (a, b, f) = self.align(other);
        Fixed::new(a - b, f)
    }

    pub fn neg(&self) -> Fixed {
        Fixed::new(-&self.scaled, self.frac)
    }

    pub fn abs(&self) -> Fixed {
        Fixed::new(self.scaled.abs(), self.frac)
    }

    /// Exact product; the result carries the summed fractional bits.
    pub fn mul(&self, other: &Fixed) -> Fixed {
        Fixed::new(&self.scaled * &other.scaled, self.frac + other.frac)
    }

    /// Exact halving (one more fractional bit).
    pub fn half(&self) -> Fixed {
        Fixed::new(self.scaled.clone(), self.frac + 1)
    }

    /// Exact midpoint `(a + b) / 2`.
    pub fn midpoint(a: &Fixed, b: &Fixed) -> Fixed {
        a.add(b).half()
    }

    pub fn to_float(&self, prec: u32) -> Result<Float> {
        Float::from_parts(self.scaled.clone(), -(self.frac as i64), prec)
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.scaled.bits();
        let drop = bits.saturating_sub(60);
        let top = (&self.scaled >> drop).to_f64().unwrap_or(0.0);
        top * ((drop as f64) - self.frac as f64).exp2()
    }

    /// Decimal rendering with `digits` digits after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        Float::from_parts(self.scaled.clone(), -(self.frac as i64), self.scaled.bits().max(1) as u32)
            .expect("exact conversion")
            .to_decimal(digits)
    }
}

impl PartialEq for Fixed {
    fn eq(&self, other: &Fixed) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Fixed {}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Fixed) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fixed {
    fn cmp(&self, other: &Fixed) -> Ordering {
        let (a, b, _) = self.align(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(12);
        f.write_str(&self.to_decimal(digits))
    }
}
