//! Exact arithmetic in `Q(sqrt 5)` and `Q(sqrt 6)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Num, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sequences::{fib, lucas, Companion};

/// Squarefree radicand of the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Radicand {
    Five,
    Six,
}

impl Radicand {
    pub fn value(self) -> u32 {
        match self {
            Radicand::Five => 5,
            Radicand::Six => 6,
        }
    }
}

impl TryFrom<u32> for Radicand {
    type Error = Error;

    fn try_from(d: u32) -> Result<Self> {
        match d {
            5 => Ok(Radicand::Five),
            6 => Ok(Radicand::Six),
            _ => Err(Error::UnsupportedRadicand(d)),
        }
    }
}

/// `a + b sqrt(d)` over any numeric coefficient type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadratic<T> {
    d: Radicand,
    a: T,
    b: T,
}

/// Rational coefficients; the form every identity check runs in.
pub type QuadraticNumber = Quadratic<BigRational>;

impl<T> Quadratic<T>
where
    T: Clone + Num + Neg<Output = T>,
{
    pub fn new(a: T, b: T, d: Radicand) -> Self {
        Quadratic { d, a, b }
    }

    pub fn from_rational(a: T, d: Radicand) -> Self {
        Quadratic { d, a, b: T::zero() }
    }

    pub fn one(d: Radicand) -> Self {
        Self::from_rational(T::one(), d)
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn radicand(&self) -> Radicand {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(Error::MixedRadicands(self.d.value(), other.d.value()))
        }
    }

    fn d_as_t(&self) -> T {
        (0..self.d.value()).fold(T::zero(), |acc, _| acc + T::one())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Quadratic {
            d: self.d,
            a: self.a.clone() + other.a.clone(),
            b: self.b.clone() + other.b.clone(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Quadratic {
            d: self.d,
            a: self.a.clone() - other.a.clone(),
            b: self.b.clone() - other.b.clone(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let (a, b, c, e) = (&self.a, &self.b, &other.a, &other.b);
        Ok(Quadratic {
            d: self.d,
            a: a.clone() * c.clone() + self.d_as_t() * b.clone() * e.clone(),
            b: a.clone() * e.clone() + b.clone() * c.clone(),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        self.checked_mul(&other.inverse()?)
    }

    pub fn scale(&self, k: &T) -> Self {
        Quadratic {
            d: self.d,
            a: self.a.clone() * k.clone(),
            b: self.b.clone() * k.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        Quadratic {
            d: self.d,
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// `a^2 - d b^2`
    pub fn norm(&self) -> T {
        self.a.clone() * self.a.clone() - self.d_as_t() * self.b.clone() * self.b.clone()
    }

    pub fn trace(&self) -> T {
        self.a.clone() + self.a.clone()
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = self.conj();
        Ok(Quadratic {
            d: self.d,
            a: c.a / n.clone(),
            b: c.b / n,
        })
    }

    /// Binary exponentiation; negative exponents go through the inverse.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let mut base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one(self.d);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }
}

impl<T: Clone + Num + Neg<Output = T>> Add for &Quadratic<T> {
    type Output = Quadratic<T>;

    /// Panics on mixed radicands; use [`Quadratic::checked_add`] to handle that.
    fn add(self, rhs: Self) -> Quadratic<T> {
        self.checked_add(rhs).expect("same radicand")
    }
}

impl<T: Clone + Num + Neg<Output = T>> Sub for &Quadratic<T> {
    type Output = Quadratic<T>;

    fn sub(self, rhs: Self) -> Quadratic<T> {
        self.checked_sub(rhs).expect("same radicand")
    }
}

impl<T: Clone + Num + Neg<Output = T>> Mul for &Quadratic<T> {
    type Output = Quadratic<T>;

    fn mul(self, rhs: Self) -> Quadratic<T> {
        self.checked_mul(rhs).expect("same radicand")
    }
}

impl<T: Clone + Num + Neg<Output = T>> Neg for &Quadratic<T> {
    type Output = Quadratic<T>;

    fn neg(self) -> Quadratic<T> {
        Quadratic {
            d: self.d,
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Quadratic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})*sqrt({})", self.a, self.b, self.d.value())
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl QuadraticNumber {
    pub fn from_ints(a: i64, b: i64, d: Radicand) -> Self {
        Quadratic::new(q(a, 1), q(b, 1), d)
    }

    /// Golden ratio `(1 + sqrt 5) / 2`.
    pub fn phi() -> Self {
        Quadratic::new(q(1, 2), q(1, 2), Radicand::Five)
    }

    /// `rho = (sqrt 3 - sqrt 2)^2 = 5 - 2 sqrt 6`.
    pub fn rho() -> Self {
        Self::from_ints(5, -2, Radicand::Six)
    }

    /// `5 + 2 sqrt 6`, the conjugate (and inverse) of `rho`.
    pub fn rho_conj() -> Self {
        Self::from_ints(5, 2, Radicand::Six)
    }

    /// Embeds into the reals using the positive square root.
    pub fn to_real<R: Real>(&self, ctx: R::Ctx) -> R {
        let a = R::from_ratio(&self.a, ctx);
        if self.b.is_zero() {
            return a;
        }
        a + R::from_ratio(&self.b, ctx) * R::sqrt_of(self.d.value(), ctx)
    }
}

/// Closed forms `U_n = ((5+2sqrt6)^(2n) - (5-2sqrt6)^(2n)) / (40 sqrt 6)` and
/// `V_n = ((5+2sqrt6)^(2n) + (5-2sqrt6)^(2n)) / 2`.
pub fn u_v_closed_form(n: u64) -> Result<(QuadraticNumber, QuadraticNumber)> {
    let up = QuadraticNumber::rho_conj().pow(2 * n as i64)?;
    let down = QuadraticNumber::rho().pow(2 * n as i64)?;
    let forty_root6 = QuadraticNumber::from_ints(0, 40, Radicand::Six);
    let u = (&up - &down).checked_div(&forty_root6)?;
    let v = (&up + &down).scale(&q(1, 2));
    Ok((u, v))
}

/// Exact identity checks in `Q(sqrt d)`; returns the failures (expected none).
pub fn check_structural_identities() -> Vec<String> {
    let mut failures = Vec::new();
    let rho = QuadraticNumber::rho();

    let poly = &(&QuadraticNumber::one(Radicand::Six) - &rho.scale(&q(10, 1))) + &(&rho * &rho);
    if !(poly.a().is_zero() && poly.b().is_zero()) {
        failures.push(format!("1 - 10 rho + rho^2 = {poly}, expected 0"));
    }

    let us = Companion::U.spec().integers();
    let vs = Companion::V.spec().integers();
    for (n, (u, v)) in us.zip(vs).take(201).enumerate() {
        match u_v_closed_form(n as u64) {
            Ok((cu, cv)) => {
                let want_u = QuadraticNumber::from_rational(BigRational::from_integer(u), Radicand::Six);
                let want_v = QuadraticNumber::from_rational(BigRational::from_integer(v), Radicand::Six);
                if cu != want_u || cv != want_v {
                    failures.push(format!("U/V closed form disagrees with recurrence at n = {n}"));
                }
            }
            Err(e) => failures.push(format!("U/V closed form at n = {n}: {e}")),
        }
    }

    let phi = QuadraticNumber::phi();
    let mut power = QuadraticNumber::one(Radicand::Five);
    for m in 0..=300u64 {
        let want = Quadratic::new(
            BigRational::new(lucas(m), 2.into()),
            BigRational::new(fib(m), 2.into()),
            Radicand::Five,
        );
        if power != want {
            failures.push(format!("phi^{m} != (L_{m} + F_{m} sqrt 5) / 2"));
        }
        power = &power * &phi;
    }

    let prod = &rho * &QuadraticNumber::rho_conj();
    if prod != QuadraticNumber::one(Radicand::Six) {
        failures.push(format!("rho * (5 + 2 sqrt 6) = {prod}, expected 1"));
    }
    match QuadraticNumber::rho_conj().pow(-1) {
        Ok(inv) if inv == rho => {}
        other => failures.push(format!("(5 + 2 sqrt 6)^-1 = {other:?}, expected rho")),
    }
    failures
}

/// `phi^m` read off Fibonacci and Lucas numbers:
/// `phi^k = (L_k + F_k sqrt 5)/2` and `phi^-k = (-1)^k (L_k - F_k sqrt 5)/2`.
pub fn phi_pow(m: i64) -> QuadraticNumber {
    let k = m.unsigned_abs();
    let (mut l, mut f) = (lucas(k), fib(k));
    if m < 0 {
        if k % 2 == 1 {
            l = -l;
        } else {
            f = -f;
        }
    }
    Quadratic::new(BigRational::new(l, 2.into()), BigRational::new(f, 2.into()), Radicand::Five)
}
