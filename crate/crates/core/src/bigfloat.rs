//! Binary fixed-point reals: `mantissa / 2^bits`.
//!
//! Every value carries an absolute resolution of `2^-bits`. Arithmetic between
//! operands of different resolution rounds to the coarser one. Results are
//! truncated toward negative infinity, so each operation is off by at most one
//! unit in the last place.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::scalar::Real;

/// Smallest supported resolution in bits.
pub const MIN_BITS: u32 = 64;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

#[derive(Clone, Debug)]
pub struct BigFloat {
    mant: BigInt,
    bits: u32,
}

/// Bits needed for `digits` decimal digits plus `guard` extra bits.
pub fn bits_for_digits(digits: u32, guard: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + guard
}

impl BigFloat {
    /// Raw constructor; `bits` is raised to [`MIN_BITS`] if smaller.
    pub fn from_raw(mant: BigInt, bits: u32) -> Self {
        if bits < MIN_BITS {
            BigFloat {
                mant: mant << (MIN_BITS - bits),
                bits: MIN_BITS,
            }
        } else {
            BigFloat { mant, bits }
        }
    }

    pub fn zero(bits: u32) -> Self {
        Self::from_raw(BigInt::zero(), bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    /// Same value at resolution `bits` (truncating when coarsening).
    pub fn with_bits(&self, bits: u32) -> Self {
        let bits = bits.max(MIN_BITS);
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => BigFloat {
                mant: &self.mant << (bits - self.bits),
                bits,
            },
            Ordering::Less => BigFloat {
                mant: &self.mant >> (self.bits - bits),
                bits,
            },
        }
    }

    fn aligned(a: &Self, b: &Self) -> (BigInt, BigInt, u32) {
        let bits = a.bits.min(b.bits);
        (a.with_bits(bits).mant, b.with_bits(bits).mant, bits)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        BigFloat {
            mant: &self.mant * k,
            bits: self.bits,
        }
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero(), "division by zero");
        BigFloat {
            mant: self.mant.div_floor(k),
            bits: self.bits,
        }
    }

    /// `true` iff `|self| < 10^-e`.
    pub fn abs_below_pow10(&self, e: u32) -> bool {
        // |m| * 10^e < 2^bits
        (self.mant.abs() * BigInt::from(10u32).pow(e)) < (BigInt::from(1) << self.bits)
    }

    /// Largest `k <= cap` with `|self| < 10^-k` (`cap` for zero).
    pub fn decimal_exponent_below(&self, cap: u32) -> u32 {
        if self.mant.is_zero() {
            return cap;
        }
        let est = ((self.bits as f64 - self.mant.bits() as f64) / LOG2_10).floor();
        let mut k = (est.max(0.0) as u32).min(cap);
        while k > 0 && !self.abs_below_pow10(k) {
            k -= 1;
        }
        while k < cap && self.abs_below_pow10(k + 1) {
            k += 1;
        }
        if k == 0 && !self.abs_below_pow10(0) {
            0
        } else {
            k
        }
    }

    /// Decimal string with exactly `frac` digits after the point, rounded
    /// to nearest.
    pub fn to_decimal(&self, frac: u32) -> String {
        let scale = BigInt::from(10u32).pow(frac);
        let num = self.mant.abs() * scale * 2 + (BigInt::from(1) << self.bits);
        let q: BigInt = num >> (self.bits + 1);
        let digits = q.to_string();
        let (int, fr) = if frac == 0 {
            (digits, String::new())
        } else if digits.len() as u32 > frac {
            let cut = digits.len() - frac as usize;
            (digits[..cut].to_string(), digits[cut..].to_string())
        } else {
            ("0".to_string(), format!("{:0>w$}", digits, w = frac as usize))
        };
        let sign = if self.mant.sign() == Sign::Minus && !q.is_zero() { "-" } else { "" };
        if fr.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{fr}")
        }
    }

    /// Scientific notation with `sig` significant digits, e.g. `1.25e-62`.
    pub fn to_scientific(&self, sig: u32) -> String {
        if self.mant.is_zero() {
            return "0".into();
        }
        let sig = sig.max(1);
        // exponent e with 10^e <= |x| < 10^(e+1)
        let log10 = (self.mant.bits() as f64 - self.bits as f64) / LOG2_10;
        let mut e = log10.floor() as i64;
        let ten = BigInt::from(10u32);
        let abs = self.mant.abs();
        let cmp_pow = |e: i64| -> Ordering {
            // compare |x| with 10^e
            if e >= 0 {
                abs.cmp(&(ten.pow(e as u32) << self.bits))
            } else {
                (&abs * ten.pow((-e) as u32)).cmp(&(BigInt::from(1) << self.bits))
            }
        };
        while cmp_pow(e) == Ordering::Less {
            e -= 1;
        }
        while cmp_pow(e + 1) != Ordering::Less {
            e += 1;
        }
        // digits = round(|x| * 10^(sig-1-e))
        let shift = sig as i64 - 1 - e;
        let (num, den) = if shift >= 0 {
            (&abs * ten.pow(shift as u32), BigInt::from(1) << self.bits)
        } else {
            (abs.clone(), ten.pow((-shift) as u32) << self.bits)
        };
        let mut q: BigInt = (num * 2 + &den) / (den * 2);
        if q.to_string().len() as u32 > sig {
            q /= 10;
            e += 1;
        }
        let s = q.to_string();
        let sign = if self.mant.is_negative() { "-" } else { "" };
        if s.len() > 1 {
            format!("{sign}{}.{}e{e}", &s[..1], &s[1..])
        } else {
            format!("{sign}{s}e{e}")
        }
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let bits = self.bits.max(other.bits);
        Some(self.with_bits(bits).mant.cmp(&other.with_bits(bits).mant))
    }
}

impl Add for BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: BigFloat) -> BigFloat {
        let (a, b, bits) = BigFloat::aligned(&self, &rhs);
        BigFloat { mant: a + b, bits }
    }
}

impl Sub for BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: BigFloat) -> BigFloat {
        let (a, b, bits) = BigFloat::aligned(&self, &rhs);
        BigFloat { mant: a - b, bits }
    }
}

impl Mul for BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: BigFloat) -> BigFloat {
        let (a, b, bits) = BigFloat::aligned(&self, &rhs);
        BigFloat {
            mant: (a * b) >> bits,
            bits,
        }
    }
}

impl Div for BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: BigFloat) -> BigFloat {
        let (a, b, bits) = BigFloat::aligned(&self, &rhs);
        assert!(!b.is_zero(), "division by zero");
        BigFloat {
            mant: (a << bits).div_floor(&b),
            bits,
        }
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat {
            mant: -self.mant,
            bits: self.bits,
        }
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let frac = f
            .precision()
            .map(|p| p as u32)
            .unwrap_or_else(|| (self.bits as f64 / LOG2_10).floor() as u32);
        f.write_str(&self.to_decimal(frac))
    }
}

impl Real for BigFloat {
    type Ctx = u32;

    fn from_bigint(n: &BigInt, bits: u32) -> Self {
        Self::from_raw(n << bits.max(MIN_BITS), bits.max(MIN_BITS))
    }

    fn from_ratio(r: &BigRational, bits: u32) -> Self {
        let bits = bits.max(MIN_BITS);
        BigFloat {
            mant: (r.numer() << bits).div_floor(r.denom()),
            bits,
        }
    }

    fn from_dyadic(n: &BigInt, shift: u64, bits: u32) -> Self {
        let bits = bits.max(MIN_BITS);
        let mant = if shift <= bits as u64 {
            n << (bits as u64 - shift)
        } else {
            n >> (shift - bits as u64)
        };
        BigFloat { mant, bits }
    }

    fn sqrt_of(d: u32, bits: u32) -> Self {
        let bits = bits.max(MIN_BITS);
        BigFloat {
            mant: (BigInt::from(d) << (2 * bits)).sqrt(),
            bits,
        }
    }

    fn pi(bits: u32) -> Self {
        machin_pi(bits.max(MIN_BITS))
    }

    fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            bits: self.bits,
        }
    }

    fn to_f64(&self) -> f64 {
        let keep = 60u32;
        let excess = self.mant.bits().saturating_sub(keep as u64);
        let top = (&self.mant >> excess).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi(excess as i32 - self.bits as i32)
    }

    fn ctx(&self) -> u32 {
        self.bits
    }

    fn mul_i64(&self, k: i64) -> Self {
        self.mul_int(&BigInt::from(k))
    }

    fn div_i64(&self, k: i64) -> Self {
        self.div_int(&BigInt::from(k))
    }
}

/// `atan(1/x) * 2^bits`, summed until terms vanish. Each of the
/// `~bits / (2 log2 x)` terms is truncated by under one unit.
fn atan_inv_fixed(x: u64, bits: u32) -> BigInt {
    let one = BigInt::from(1) << bits;
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = &one / &x; // 2^bits / x^(2k+1)
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// `pi = 16 atan(1/5) - 4 atan(1/239)` with 32 guard bits.
fn machin_pi(bits: u32) -> BigFloat {
    let guard = 32;
    let w = bits + guard;
    let v = atan_inv_fixed(5, w) * 16 - atan_inv_fixed(239, w) * 4;
    BigFloat {
        mant: v >> guard,
        bits,
    }
}

/// Resolution used by the oracles: `digits` decimals plus 64 guard bits.
pub fn oracle_bits(digits: u32) -> u32 {
    bits_for_digits(digits, 64)
}

/// pi to at least `digits` correct decimals, independent of any series under test.
pub fn pi_oracle(digits: u32) -> BigFloat {
    machin_pi(oracle_bits(digits))
}

/// `sqrt(d)` to at least `digits` correct decimals.
pub fn sqrt_oracle(d: u32, digits: u32) -> BigFloat {
    BigFloat::sqrt_of(d, oracle_bits(digits))
}

/// First `digits` decimals of `x` (truncated, not rounded).
pub fn truncated_decimal(x: &BigFloat, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let q: BigInt = (x.mant.abs() * scale) >> x.bits;
    let s = format!("{:0>w$}", q.to_string(), w = digits as usize + 1);
    let cut = s.len() - digits as usize;
    let sign = if x.mant.is_negative() { "-" } else { "" };
    format!("{sign}{}.{}", &s[..cut], &s[cut..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI_100: &str = "3.1415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

    #[test]
    fn oracle_examples() {
        // 15 and 10 significant digits, rounded
        assert_eq!(pi_oracle(15).to_decimal(14), "3.14159265358979");
        assert_eq!(sqrt_oracle(5, 10).to_decimal(9), "2.236067977");
        assert_eq!(sqrt_oracle(6, 10).to_decimal(9), "2.449489743");
        assert_eq!(truncated_decimal(&sqrt_oracle(6, 10), 9), "2.449489742");
    }

    #[test]
    fn pi_matches_published_digits() {
        assert_eq!(truncated_decimal(&pi_oracle(100), 100), PI_100);
        // lower resolutions are prefixes
        for d in [10u32, 37, 64, 99] {
            assert_eq!(truncated_decimal(&pi_oracle(d), d), &PI_100[..d as usize + 2]);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        for d in [2u32, 5, 6] {
            let r = sqrt_oracle(d, 200);
            let bits = r.bits();
            let err = (r.clone() * r - BigFloat::from_i64(d as i64, bits)).abs();
            assert!(err.abs_below_pow10(200));
        }
    }

    #[test]
    fn formatting() {
        let x = BigFloat::from_ratio(&BigRational::new((-1).into(), 8.into()), 80);
        assert_eq!(x.to_decimal(3), "-0.125");
        assert_eq!(x.to_decimal(2), "-0.13");
        assert_eq!(x.to_scientific(2), "-1.3e-1");
        let y = BigFloat::from_ratio(&BigRational::new(3.into(), 1000.into()), 200);
        assert_eq!(y.to_scientific(3), "3.00e-3");
        assert_eq!(BigFloat::from_i64(12345, 64).to_scientific(2), "1.2e4");
        assert_eq!(BigFloat::from_i64(99, 64).to_scientific(1), "1e2");
        assert_eq!(y.decimal_exponent_below(100), 2);
        assert_eq!(BigFloat::zero(64).decimal_exponent_below(7), 7);
    }

    #[test]
    fn f64_conversion_survives_high_resolution() {
        let x = BigFloat::from_ratio(&BigRational::new(1.into(), 3.into()), 40_000);
        assert!((x.to_f64() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_resolution_rounds_to_coarser() {
        let a = BigFloat::from_i64(1, 100);
        let b = BigFloat::from_i64(2, 200);
        assert_eq!((a + b).bits(), 100);
    }

    proptest! {
        #[test]
        fn field_ops_match_rationals(a in -10_000i64..10_000, b in 1i64..10_000, c in -10_000i64..10_000, d in 1i64..10_000) {
            let bits = 256;
            let ra = BigRational::new(a.into(), b.into());
            let rc = BigRational::new(c.into(), d.into());
            let fa = BigFloat::from_ratio(&ra, bits);
            let fc = BigFloat::from_ratio(&rc, bits);
            let tol = 240;
            let close = |x: BigFloat, r: BigRational| (x - BigFloat::from_ratio(&r, bits)).abs().abs_below_pow10(tol / 4);
            prop_assert!(close(fa.clone() + fc.clone(), &ra + &rc));
            prop_assert!(close(fa.clone() - fc.clone(), &ra - &rc));
            prop_assert!(close(fa.clone() * fc.clone(), &ra * &rc));
            if c != 0 {
                prop_assert!(close(fa.clone() / fc.clone(), &ra / &rc));
            }
            prop_assert_eq!(fa.partial_cmp(&fc), ra.partial_cmp(&rc));
        }
    }
}
