//! Scalar abstractions the summation and series code is generic over.
//!
//! Truncated sums run over two carriers: exact rationals and residues
//! modulo `p^K`. Kernel values additionally need exact division by
//! integers, which in the modular world requires tracking the `p`-adic
//! valuation separately ([`crate::residue::PadicScaled`]). Series
//! evaluation runs over any [`Real`]: `f32`/`f64` through `num-traits`,
//! or the arbitrary-precision [`crate::bigfloat::BigFloat`].

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, ToPrimitive, Zero};

use crate::error::Result;

/// A commutative ring a truncated sum accumulates in.
pub trait SumScalar: Clone + PartialEq + Debug {
    /// Whatever the ring needs to build constants (nothing, or a modulus).
    type Ctx: Clone + Debug;

    fn zero_in(ctx: &Self::Ctx) -> Self;
    fn from_bigint(n: &BigInt, ctx: &Self::Ctx) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;

    fn from_int(n: i64, ctx: &Self::Ctx) -> Self {
        Self::from_bigint(&BigInt::from(n), ctx)
    }
}

/// Carrier for hypergeometric kernel values: a multiplicative quantity
/// advanced by integer ratios, collapsed into a [`SumScalar`] for summation.
pub trait KernelCarrier: Clone + Debug {
    type Scalar: SumScalar;

    fn one_in(ctx: &<Self::Scalar as SumScalar>::Ctx) -> Self;
    fn from_bigint(n: &BigInt, ctx: &<Self::Scalar as SumScalar>::Ctx) -> Self;
    /// Multiply by `prod(num) / prod(den)`; every factor is a nonzero integer.
    fn mul_ratio(&mut self, num: &[i64], den: &[i64]) -> Result<()>;
    fn to_scalar(&self) -> Result<Self::Scalar>;
}

impl SumScalar for BigInt {
    type Ctx = ();

    fn zero_in(_: &()) -> Self {
        BigInt::zero()
    }
    fn from_bigint(n: &BigInt, _: &()) -> Self {
        n.clone()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl SumScalar for BigRational {
    type Ctx = ();

    fn zero_in(_: &()) -> Self {
        BigRational::zero()
    }
    fn from_bigint(n: &BigInt, _: &()) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl KernelCarrier for BigRational {
    type Scalar = BigRational;

    fn one_in(_: &()) -> Self {
        BigRational::one()
    }
    fn from_bigint(n: &BigInt, _: &()) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn mul_ratio(&mut self, num: &[i64], den: &[i64]) -> Result<()> {
        let top: BigInt = num.iter().map(|&x| BigInt::from(x)).product();
        let bottom: BigInt = den.iter().map(|&x| BigInt::from(x)).product();
        if bottom.is_zero() {
            return Err(crate::error::Error::DivisionByZero);
        }
        *self = &*self * BigRational::new(top, bottom);
        Ok(())
    }
    fn to_scalar(&self) -> Result<BigRational> {
        Ok(self.clone())
    }
}

/// Real numbers at some working precision.
///
/// Constructors take a context: `()` for hardware floats, a bit precision
/// for [`crate::bigfloat::BigFloat`].
pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type Ctx: Copy + Debug;

    fn from_bigint(n: &BigInt, ctx: Self::Ctx) -> Self;
    fn from_ratio(r: &BigRational, ctx: Self::Ctx) -> Self;
    fn sqrt_of(d: u32, ctx: Self::Ctx) -> Self;
    fn pi(ctx: Self::Ctx) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;

    /// Context this value was built with.
    fn ctx(&self) -> Self::Ctx;

    fn from_i64(n: i64, ctx: Self::Ctx) -> Self {
        Self::from_bigint(&BigInt::from(n), ctx)
    }

    /// `n / 2^shift`.
    fn from_dyadic(n: &BigInt, shift: u64, ctx: Self::Ctx) -> Self {
        Self::from_ratio(&BigRational::new(n.clone(), BigInt::from(1) << shift), ctx)
    }

    fn mul_i64(&self, k: i64) -> Self {
        self.clone() * Self::from_i64(k, self.ctx())
    }

    fn div_i64(&self, k: i64) -> Self {
        self.clone() / Self::from_i64(k, self.ctx())
    }
}

impl<F> Real for F
where
    F: Float + FloatConst + FromPrimitive + Debug,
{
    type Ctx = ();

    fn from_bigint(n: &BigInt, _: ()) -> Self {
        F::from_f64(n.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan)
    }
    fn from_ratio(r: &BigRational, _: ()) -> Self {
        F::from_f64(r.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(F::nan)
    }
    fn sqrt_of(d: u32, _: ()) -> Self {
        F::from_u32(d).map(Float::sqrt).unwrap_or_else(F::nan)
    }
    fn pi(_: ()) -> Self {
        F::PI()
    }
    fn abs(&self) -> Self {
        Float::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn ctx(&self) {}
}
