//! Arithmetic in `Z/p^K` for odd primes `p`.
//!
//! [`Residue`] is a canonical representative in `[0, p^K)`. [`PadicScaled`]
//! keeps a value as `p^v * u` with `u` a unit, so that division by integers
//! divisible by `p` stays exact as long as the net valuation is non-negative.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{KernelCarrier, SumScalar};

/// Trial division; the harness only ever deals with small primes.
pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// All odd primes `<= bound`, ascending (sieve of Eratosthenes).
pub fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 3 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        if i > 2 {
            out.push(i as u64);
        }
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// The ring `Z/p^K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingDescriptor {
    p: u64,
    k: u32,
    modulus: BigUint,
}

/// Shared handle; every residue keeps one.
pub type Ring = Arc<RingDescriptor>;

impl RingDescriptor {
    pub fn new(p: u64, k: u32) -> Result<Ring> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroExponent);
        }
        Ok(Arc::new(RingDescriptor {
            p,
            k,
            modulus: BigUint::from(p).pow(k),
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// `"p^K"`, the form used in reports and accepted by [`FromStr`].
    pub fn label(&self) -> String {
        format!("{}^{}", self.p, self.k)
    }

    fn reduce(&self, n: &BigInt) -> BigUint {
        let m = BigInt::from(self.modulus.clone());
        n.mod_floor(&m)
            .to_biguint()
            .expect("mod_floor by a positive modulus is non-negative")
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.k)
    }
}

/// Parses `"p^K"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulusSpec(pub Ring);

impl FromStr for ModulusSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let malformed = || Error::MalformedModulus(s.to_string());
        let (p, k) = s.trim().split_once('^').ok_or_else(malformed)?;
        let p: u64 = p.trim().parse().map_err(|_| malformed())?;
        let k: u32 = k.trim().parse().map_err(|_| malformed())?;
        RingDescriptor::new(p, k).map(ModulusSpec)
    }
}

/// Canonical representative of a class in `Z/p^K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residue {
    ring: Ring,
    rep: BigUint,
}

impl Residue {
    pub fn new(value: &BigInt, ring: &Ring) -> Self {
        Residue {
            rep: ring.reduce(value),
            ring: ring.clone(),
        }
    }

    pub fn from_u64(value: u64, ring: &Ring) -> Self {
        Residue {
            rep: BigUint::from(value) % ring.modulus(),
            ring: ring.clone(),
        }
    }

    pub fn zero(ring: &Ring) -> Self {
        Residue {
            rep: BigUint::zero(),
            ring: ring.clone(),
        }
    }

    /// Reduces `num/den`; fails when `p` divides the reduced denominator.
    pub fn from_rational(r: &BigRational, ring: &Ring) -> Result<Self> {
        let inv = inv_mod(r.denom(), ring)?;
        Ok(Residue::new(r.numer(), ring).mul(&inv))
    }

    pub fn rep(&self) -> &BigUint {
        &self.rep
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    /// `p`-adic valuation of the representative, capped at `K` (zero maps to `K`).
    pub fn valuation(&self) -> u32 {
        if self.rep.is_zero() {
            return self.ring.k;
        }
        let p = BigUint::from(self.ring.p);
        let mut x = self.rep.clone();
        let mut v = 0;
        loop {
            let (q, r) = x.div_rem(&p);
            if !r.is_zero() {
                return v;
            }
            x = q;
            v += 1;
        }
    }

    fn check_ring(&self, other: &Residue) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring,
            "{}",
            Error::RingMismatch
        );
    }

    pub fn add(&self, other: &Residue) -> Residue {
        self.check_ring(other);
        let mut rep = &self.rep + &other.rep;
        if &rep >= self.ring.modulus() {
            rep -= self.ring.modulus();
        }
        Residue {
            rep,
            ring: self.ring.clone(),
        }
    }

    pub fn sub(&self, other: &Residue) -> Residue {
        self.check_ring(other);
        let rep = if self.rep >= other.rep {
            &self.rep - &other.rep
        } else {
            self.ring.modulus() - &other.rep + &self.rep
        };
        Residue {
            rep,
            ring: self.ring.clone(),
        }
    }

    pub fn mul(&self, other: &Residue) -> Residue {
        self.check_ring(other);
        Residue {
            rep: (&self.rep * &other.rep) % self.ring.modulus(),
            ring: self.ring.clone(),
        }
    }

    pub fn neg(&self) -> Residue {
        if self.rep.is_zero() {
            return self.clone();
        }
        Residue {
            rep: self.ring.modulus() - &self.rep,
            ring: self.ring.clone(),
        }
    }

    pub fn pow(&self, e: u64) -> Residue {
        Residue {
            rep: self.rep.modpow(&BigUint::from(e), self.ring.modulus()),
            ring: self.ring.clone(),
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

impl SumScalar for Residue {
    type Ctx = Ring;

    fn zero_in(ring: &Ring) -> Self {
        Residue::zero(ring)
    }
    fn from_bigint(n: &BigInt, ring: &Ring) -> Self {
        Residue::new(n, ring)
    }
    fn from_int(n: i64, ring: &Ring) -> Self {
        let m = ring.modulus();
        let rep = if n >= 0 {
            BigUint::from(n as u64) % m
        } else {
            let r = BigUint::from(n.unsigned_abs()) % m;
            if r.is_zero() {
                r
            } else {
                m - r
            }
        };
        Residue {
            rep,
            ring: ring.clone(),
        }
    }
    fn add(&self, rhs: &Self) -> Self {
        Residue::add(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Residue::mul(self, rhs)
    }
}

/// Legendre symbol `(m/p)` by Euler's criterion.
pub fn legendre(m: i64, p: u64) -> Result<i8> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let pb = BigUint::from(p);
    let r = BigInt::from(m)
        .mod_floor(&BigInt::from(p))
        .to_biguint()
        .expect("non-negative");
    if r.is_zero() {
        return Ok(0);
    }
    let e = r.modpow(&BigUint::from((p - 1) / 2), &pb);
    Ok(if e.is_one() { 1 } else { -1 })
}

/// Inverse of `u` modulo `p^K` by the extended Euclidean algorithm.
pub fn inv_mod(u: &BigInt, ring: &Ring) -> Result<Residue> {
    let m = BigInt::from(ring.modulus().clone());
    let a = u.mod_floor(&m);
    let eg = a.extended_gcd(&m);
    if !eg.gcd.is_one() {
        return Err(Error::NotUnit {
            value: u.to_string(),
            p: ring.p,
            k: ring.k,
        });
    }
    Ok(Residue::new(&eg.x, ring))
}

/// `n = p^v * u` with `p` not dividing `u`; the sign stays in `u`.
/// Returns `None` for `n = 0`.
pub fn split_padic(n: &BigInt, p: u64) -> Option<(u32, BigInt)> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut u = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = u.div_rem(&pb);
        if !r.is_zero() {
            return Some((v, u));
        }
        u = q;
        v += 1;
    }
}

/// Machine-word variant of [`split_padic`].
pub fn split_padic_i64(n: i64, p: u64) -> Option<(u32, i64)> {
    if n == 0 {
        return None;
    }
    let p = p as i64;
    let (mut v, mut u) = (0, n);
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    Some((v, u))
}

/// `p^v * u` with `u` a unit modulo `p^K`, or exact zero.
///
/// The unit is kept to exactly `K` digits, so the represented value is known
/// modulo `p^(K+v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicScaled {
    ring: Ring,
    repr: Option<(u32, BigUint)>,
}

impl PadicScaled {
    pub fn zero(ring: &Ring) -> Self {
        PadicScaled {
            ring: ring.clone(),
            repr: None,
        }
    }

    pub fn one(ring: &Ring) -> Self {
        PadicScaled {
            ring: ring.clone(),
            repr: Some((0, BigUint::one())),
        }
    }

    pub fn from_bigint(n: &BigInt, ring: &Ring) -> Self {
        PadicScaled {
            repr: split_padic(n, ring.p).map(|(v, u)| (v, ring.reduce(&u))),
            ring: ring.clone(),
        }
    }

    /// Builds `p^v * u`; `u` must be a unit.
    pub fn from_parts(v: u32, u: &BigInt, ring: &Ring) -> Result<Self> {
        let u = ring.reduce(u);
        if (&u % ring.p).is_zero() {
            return Err(Error::NotUnit {
                value: u.to_string(),
                p: ring.p,
                k: ring.k,
            });
        }
        Ok(PadicScaled {
            ring: ring.clone(),
            repr: Some((v, u)),
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_none()
    }

    pub fn valuation(&self) -> Option<u32> {
        self.repr.as_ref().map(|(v, _)| *v)
    }

    pub fn unit(&self) -> Option<&BigUint> {
        self.repr.as_ref().map(|(_, u)| u)
    }

    pub fn mul(&self, other: &PadicScaled) -> PadicScaled {
        let repr = match (&self.repr, &other.repr) {
            (Some((va, ua)), Some((vb, ub))) => Some((va + vb, (ua * ub) % self.ring.modulus())),
            _ => None,
        };
        PadicScaled {
            ring: self.ring.clone(),
            repr,
        }
    }

    pub fn div(&self, other: &PadicScaled) -> Result<PadicScaled> {
        let (vb, ub) = other.repr.as_ref().ok_or(Error::DivisionByZero)?;
        let Some((va, ua)) = &self.repr else {
            return Ok(self.clone());
        };
        if va < vb {
            return Err(Error::NegativeValuation(*va as i64 - *vb as i64));
        }
        let inv = inv_mod(&BigInt::from(ub.clone()), &self.ring)?;
        Ok(PadicScaled {
            ring: self.ring.clone(),
            repr: Some((va - vb, (ua * inv.rep()) % self.ring.modulus())),
        })
    }

    /// `p^v * u mod p^K`; zero once `v >= K`.
    pub fn to_residue(&self) -> Residue {
        match &self.repr {
            Some((v, u)) if *v < self.ring.k => Residue {
                rep: (u * BigUint::from(self.ring.p).pow(*v)) % self.ring.modulus(),
                ring: self.ring.clone(),
            },
            _ => Residue::zero(&self.ring),
        }
    }
}

impl KernelCarrier for PadicScaled {
    type Scalar = Residue;

    fn one_in(ring: &Ring) -> Self {
        PadicScaled::one(ring)
    }

    fn from_bigint(n: &BigInt, ring: &Ring) -> Self {
        PadicScaled::from_bigint(n, ring)
    }

    fn mul_ratio(&mut self, num: &[i64], den: &[i64]) -> Result<()> {
        let Some((v, u)) = &self.repr else {
            return if den.contains(&0) {
                Err(Error::DivisionByZero)
            } else {
                Ok(())
            };
        };
        let p = self.ring.p;
        let m = self.ring.modulus();
        let mut val = *v as i64;
        let mut top = u.clone();
        let mut bottom = BigInt::one();
        for &x in num {
            let Some((vx, ux)) = split_padic_i64(x, p) else {
                self.repr = None;
                return Ok(());
            };
            val += vx as i64;
            top = (top * self.ring.reduce(&BigInt::from(ux))) % m;
        }
        for &x in den {
            let (vx, ux) = split_padic_i64(x, p).ok_or(Error::DivisionByZero)?;
            val -= vx as i64;
            bottom *= ux;
        }
        if val < 0 {
            return Err(Error::NegativeValuation(val));
        }
        let inv = inv_mod(&bottom, &self.ring)?;
        self.repr = Some((val as u32, (top * inv.rep()) % m));
        Ok(())
    }

    fn to_scalar(&self) -> Result<Residue> {
        Ok(self.to_residue())
    }
}

/// `None` for zero.
pub fn valuation_of(n: &BigInt, p: u64) -> Option<u32> {
    split_padic(n, p).map(|(v, _)| v)
}
