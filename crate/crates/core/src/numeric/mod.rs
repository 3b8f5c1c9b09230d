//! Big integers (re-exported from `num-bigint`), L-bit floating point and
//! fixed point.

mod fixed;
mod float;

pub use fixed::Fixed;
pub use float::Float;
pub use num_bigint::{BigInt, BigUint};

use crate::Result;
use std::cmp::Ordering;

/// `⌊a / b⌋` rounding toward negative infinity.
pub fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

pub fn fl_from_bigratio(num: &BigInt, den: &BigInt, l: u32) -> Result<Float> {
    Float::from_ratio(num, den, l)
}

pub fn fl_add_same_sign(x: &Float, y: &Float) -> Result<Float> {
    x.add_same_sign(y)
}

pub fn fl_mul(x: &Float, y: &Float) -> Result<Float> {
    x.mul(y)
}

pub fn fl_recip(x: &Float) -> Result<Float> {
    x.recip()
}

pub fn fl_cmp(x: &Float, y: &Float) -> Ordering {
    x.cmp(y)
}
