//! Integer sequences behind the sums: Fibonacci and Lucas numbers, their
//! rarefied companions, the `U_n`/`V_n` pair, Apéry numbers, and the
//! streaming hypergeometric kernels.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::scalar::{KernelCarrier, SumScalar};

/// `(F_n, F_{n+1})` by fast doubling.
pub fn fib_pair(n: u64) -> (BigInt, BigInt) {
    if n == 0 {
        return (BigInt::zero(), BigInt::one());
    }
    let (a, b) = fib_pair(n / 2);
    // F(2k) = F(k) (2F(k+1) - F(k)), F(2k+1) = F(k)^2 + F(k+1)^2
    let c = &a * (&b * 2 - &a);
    let d = &a * &a + &b * &b;
    if n % 2 == 0 {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

pub fn fib(n: u64) -> BigInt {
    fib_pair(n).0
}

pub fn lucas(n: u64) -> BigInt {
    let (f, g) = fib_pair(n);
    g * 2 - f
}

/// `a_{n+1} = c1 a_n + c0 a_{n-1}` with initial terms `a0`, `a1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondOrderSpec {
    pub a0: BigInt,
    pub a1: BigInt,
    pub c1: BigInt,
    pub c0: BigInt,
}

impl SecondOrderSpec {
    pub fn new(a0: i64, a1: i64, c1: i64, c0: i64) -> Self {
        SecondOrderSpec {
            a0: a0.into(),
            a1: a1.into(),
            c1: c1.into(),
            c0: c0.into(),
        }
    }

    pub fn stream<S: SumScalar>(&self, ctx: &S::Ctx) -> SecondOrderStream<S> {
        SecondOrderStream {
            cur: S::from_bigint(&self.a0, ctx),
            next: S::from_bigint(&self.a1, ctx),
            c1: S::from_bigint(&self.c1, ctx),
            c0: S::from_bigint(&self.c0, ctx),
        }
    }

    /// Exact integer stream.
    pub fn integers(&self) -> SecondOrderStream<BigInt> {
        self.stream(&())
    }
}

/// Iterator over a second-order sequence in any [`SumScalar`]; reducing
/// the recurrence into `Z/p^K` commutes with reducing the exact terms.
#[derive(Clone, Debug)]
pub struct SecondOrderStream<S> {
    cur: S,
    next: S,
    c1: S,
    c0: S,
}

impl<S: SumScalar> Iterator for SecondOrderStream<S> {
    type Item = S;

    fn next(&mut self) -> Option<S> {
        let after = self.c1.mul(&self.next).add(&self.c0.mul(&self.cur));
        let out = std::mem::replace(&mut self.cur, std::mem::replace(&mut self.next, after));
        Some(out)
    }
}

/// The companion sequences weighting the sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Companion {
    /// `F_{8n}`
    F8,
    /// `L_{8n}`
    L8,
    /// `F_{15n}`
    F15,
    /// `L_{15n}`
    L15,
    U,
    V,
}

impl Companion {
    pub const ALL: [Companion; 6] = [
        Companion::F8,
        Companion::L8,
        Companion::F15,
        Companion::L15,
        Companion::U,
        Companion::V,
    ];

    /// Recurrences read off the generating-function denominators
    /// `1 - 47t + t^2`, `1 - 1364t - t^2` and `1 - 98t + t^2`.
    pub fn spec(self) -> SecondOrderSpec {
        match self {
            Companion::F8 => SecondOrderSpec::new(0, 21, 47, -1),
            Companion::L8 => SecondOrderSpec::new(2, 47, 47, -1),
            Companion::F15 => SecondOrderSpec::new(0, 610, 1364, 1),
            Companion::L15 => SecondOrderSpec::new(2, 1364, 1364, 1),
            Companion::U => SecondOrderSpec::new(0, 1, 98, -1),
            Companion::V => SecondOrderSpec::new(1, 49, 98, -1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Companion::F8 => "f8",
            Companion::L8 => "l8",
            Companion::F15 => "f15",
            Companion::L15 => "l15",
            Companion::U => "u",
            Companion::V => "v",
        }
    }
}

impl fmt::Display for Companion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Companion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Companion::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown companion sequence {s:?}"))
    }
}

/// Binomial coefficient; zero when `k > n`.
pub fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Apéry numbers via
/// `(n+1)^3 A_{n+1} = (34n^3 + 51n^2 + 27n + 5) A_n - n^3 A_{n-1}`.
#[derive(Clone, Debug)]
pub struct AperyStream {
    n: u64,
    cur: BigInt,
    prev: BigInt,
}

impl AperyStream {
    pub fn new() -> Self {
        AperyStream {
            n: 0,
            cur: BigInt::one(),
            prev: BigInt::zero(),
        }
    }
}

impl Default for AperyStream {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for AperyStream {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let n = BigInt::from(self.n);
        let n3 = &n * &n * &n;
        let poly = &n3 * 34 + &n * &n * 51 + &n * 27 + 5;
        let n1 = &n + 1;
        let num: BigInt = poly * &self.cur - n3 * &self.prev;
        let (q, r) = num.div_rem(&(&n1 * &n1 * &n1));
        debug_assert!(r.is_zero(), "Apéry recurrence must divide exactly");
        let out = std::mem::replace(&mut self.cur, q);
        self.prev = out.clone();
        self.n += 1;
        Some(out)
    }
}

pub fn apery(n: u64) -> BigInt {
    AperyStream::new()
        .nth(n as usize)
        .expect("stream is infinite")
}

/// `A_n = sum_k C(n,k)^2 C(n+k,k)^2`, straight from the definition.
pub fn apery_double_sum(n: u64) -> BigInt {
    (0..=n)
        .map(|k| {
            let t = binom(n, k) * binom(n + k, k);
            &t * &t
        })
        .sum()
}

/// Hypergeometric inputs of the truncated sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// `C(2n,n)^3 / 2^(12n)`
    K1,
    /// `(-1)^n C(2n,n)^4 C(3n,n) / 2^(6n)`
    K2,
    /// Apéry numbers `A_n`
    K3,
}

impl Kernel {
    /// Factors of `kernel(n+1) / kernel(n)` as `(numerators, denominators)`.
    /// `None` for `K3`, which has no first-order ratio.
    pub fn step_ratio(self, n: u64) -> Option<(Vec<i64>, Vec<i64>)> {
        let n = n as i64;
        let c = 2 * (2 * n + 1);
        match self {
            Kernel::K1 => Some((vec![c, c, c], vec![n + 1, n + 1, n + 1, 4096])),
            Kernel::K2 => Some((
                vec![-c, c, c, c, 3 * n + 1, 3 * n + 2, 3 * n + 3],
                vec![n + 1, n + 1, n + 1, n + 1, n + 1, 2 * n + 1, 2 * n + 2, 64],
            )),
            Kernel::K3 => None,
        }
    }

    /// Closed form from binomials (or the Apéry double sum); independent of
    /// the streaming path.
    pub fn exact(self, n: u64) -> BigRational {
        match self {
            Kernel::K1 => {
                let c = binom(2 * n, n);
                BigRational::new(&c * &c * &c, BigInt::one() << (12 * n))
            }
            Kernel::K2 => {
                let c = binom(2 * n, n);
                let c2 = &c * &c;
                let num = &c2 * &c2 * binom(3 * n, n);
                let num = if n % 2 == 1 { -num } else { num };
                BigRational::new(num, BigInt::one() << (6 * n))
            }
            Kernel::K3 => BigRational::from_integer(apery_double_sum(n)),
        }
    }
}

/// `kernel(n) = numerator / 2^shift` with exact integer numerators.
#[derive(Clone, Debug)]
pub struct KernelIntegers {
    kernel: Kernel,
    n: u64,
    /// `C(2n, n)`
    central: BigInt,
    /// `C(3n, n)`
    trinomial: BigInt,
    apery: AperyStream,
}

impl Kernel {
    pub fn integers(self) -> KernelIntegers {
        KernelIntegers {
            kernel: self,
            n: 0,
            central: BigInt::one(),
            trinomial: BigInt::one(),
            apery: AperyStream::new(),
        }
    }
}

impl Iterator for KernelIntegers {
    type Item = (BigInt, u64);

    fn next(&mut self) -> Option<(BigInt, u64)> {
        let n = self.n;
        let out = match self.kernel {
            Kernel::K1 => (&self.central * &self.central * &self.central, 12 * n),
            Kernel::K2 => {
                let c2 = &self.central * &self.central;
                let v = &c2 * &c2 * &self.trinomial;
                (if n % 2 == 1 { -v } else { v }, 6 * n)
            }
            Kernel::K3 => (self.apery.next().expect("infinite"), 0),
        };
        if self.kernel != Kernel::K3 {
            self.central = &self.central * (2 * (2 * n + 1)) / (n + 1);
            self.trinomial = &self.trinomial * ((3 * n + 1) * (3 * n + 2) * (3 * n + 3))
                / ((n + 1) * (2 * n + 1) * (2 * n + 2));
        }
        self.n += 1;
        Some(out)
    }
}

/// A kernel advanced term by term in some carrier.
#[derive(Clone, Debug)]
pub struct KernelStream<C: KernelCarrier> {
    kernel: Kernel,
    n: u64,
    value: C,
    apery: Option<AperyStream>,
    ctx: <C::Scalar as SumScalar>::Ctx,
}

impl<C: KernelCarrier> KernelStream<C> {
    pub fn new(kernel: Kernel, ctx: &<C::Scalar as SumScalar>::Ctx) -> Self {
        let mut apery = (kernel == Kernel::K3).then(AperyStream::new);
        let value = match apery.as_mut() {
            Some(s) => C::from_bigint(&s.next().expect("infinite"), ctx),
            None => C::one_in(ctx),
        };
        KernelStream {
            kernel,
            n: 0,
            value,
            apery,
            ctx: ctx.clone(),
        }
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn index(&self) -> u64 {
        self.n
    }

    pub fn value(&self) -> &C {
        &self.value
    }

    /// Moves from `n` to `n + 1`.
    pub fn advance(&mut self) -> Result<()> {
        match self.apery.as_mut() {
            Some(s) => {
                self.value = C::from_bigint(&s.next().expect("infinite"), &self.ctx);
            }
            None => {
                let (num, den) = self
                    .kernel
                    .step_ratio(self.n)
                    .expect("first-order kernel");
                self.value.mul_ratio(&num, &den)?;
            }
        }
        self.n += 1;
        Ok(())
    }
}

/// Sequence invariants: rarefied streams against fast doubling (`n <= 500`),
/// `L_m^2 - 5 F_m^2 = 4(-1)^m` (`m <= 10^4`), `V_n^2 - 2400 U_n^2 = 1`
/// (`n <= 500`) and the Apéry recurrence against its double sum (`n <= 100`).
/// Returns the failures (expected none).
pub fn check_sequence_invariants() -> Vec<String> {
    let mut failures = Vec::new();
    let rarefied = [
        (Companion::F8, 8, false),
        (Companion::L8, 8, true),
        (Companion::F15, 15, false),
        (Companion::L15, 15, true),
    ];
    for (c, step, is_lucas) in rarefied {
        for (n, x) in c.spec().integers().take(501).enumerate() {
            let m = step * n as u64;
            let want = if is_lucas { lucas(m) } else { fib(m) };
            if x != want {
                failures.push(format!("{c}[{n}] != closed form"));
                break;
            }
        }
    }

    let fibs = SecondOrderSpec::new(0, 1, 1, 1).integers();
    let lucs = SecondOrderSpec::new(2, 1, 1, 1).integers();
    for (m, (f, l)) in fibs.zip(lucs).take(10_001).enumerate() {
        let want = BigInt::from(if m % 2 == 0 { 4 } else { -4 });
        if &l * &l - &f * &f * 5 != want {
            failures.push(format!("L_{m}^2 - 5 F_{m}^2 != 4(-1)^{m}"));
            break;
        }
    }

    let us = Companion::U.spec().integers();
    let vs = Companion::V.spec().integers();
    for (n, (u, v)) in us.zip(vs).take(501).enumerate() {
        if &v * &v - &u * &u * 2400 != BigInt::one() {
            failures.push(format!("V_{n}^2 - 2400 U_{n}^2 != 1"));
            break;
        }
    }

    for (n, a) in AperyStream::new().take(101).enumerate() {
        if a != apery_double_sum(n as u64) {
            failures.push(format!("A_{n}: recurrence disagrees with double sum"));
            break;
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::{PadicScaled, Residue, RingDescriptor};
    use num_bigint::BigUint;

    fn nth(c: Companion, n: usize) -> BigInt {
        c.spec().integers().nth(n).unwrap()
    }

    #[test]
    fn fib_lucas_examples() {
        assert_eq!(fib(8), 21.into());
        assert_eq!(fib(15), 610.into());
        assert_eq!(lucas(0), 2.into());
        assert_eq!(lucas(1), 1.into());
        assert_eq!(lucas(2), 3.into());
        assert_eq!(lucas(8), 47.into());
        assert_eq!(lucas(15), 1364.into());
    }

    #[test]
    fn fast_doubling_matches_iteration() {
        let (mut a, mut b) = (BigInt::zero(), BigInt::one());
        for n in 0..400 {
            assert_eq!(fib(n), a, "F_{n}");
            let c = &a + &b;
            a = std::mem::replace(&mut b, c);
        }
    }

    #[test]
    fn companion_examples() {
        assert_eq!(nth(Companion::F8, 2), 987.into());
        assert_eq!(nth(Companion::L15, 2), 1860498.into());
        assert_eq!(nth(Companion::V, 2), 4801.into());
        assert_eq!(nth(Companion::U, 1), 1.into());
        assert_eq!(nth(Companion::V, 1), 49.into());
    }

    #[test]
    fn rarefied_consistency() {
        let streams: Vec<Vec<BigInt>> = [Companion::F8, Companion::L8, Companion::F15, Companion::L15]
            .iter()
            .map(|c| c.spec().integers().take(501).collect())
            .collect();
        for n in 0..=500u64 {
            let i = n as usize;
            assert_eq!(streams[0][i], fib(8 * n));
            assert_eq!(streams[1][i], lucas(8 * n));
            assert_eq!(streams[2][i], fib(15 * n));
            assert_eq!(streams[3][i], lucas(15 * n));
        }
    }

    #[test]
    fn cassini_type_identity() {
        // stream F_m, L_m jointly to keep this linear
        let fibs = SecondOrderSpec::new(0, 1, 1, 1).integers();
        let lucs = SecondOrderSpec::new(2, 1, 1, 1).integers();
        for (m, (f, l)) in fibs.zip(lucs).take(10_001).enumerate() {
            let rhs = if m % 2 == 0 { 4 } else { -4 };
            assert_eq!(&l * &l - &f * &f * 5, BigInt::from(rhs), "m = {m}");
        }
    }

    #[test]
    fn integer_kernels_match_closed_forms() {
        for kernel in [Kernel::K1, Kernel::K2, Kernel::K3] {
            for (n, (num, shift)) in kernel.integers().take(120).enumerate() {
                let want = kernel.exact(n as u64);
                assert_eq!(BigRational::new(num, BigInt::one() << shift), want, "{kernel:?} n={n}");
            }
        }
    }

    #[test]
    fn invariant_suite_is_clean() {
        assert!(check_sequence_invariants().is_empty());
    }

    #[test]
    fn pell_norm_of_u_v() {
        let us = Companion::U.spec().integers();
        let vs = Companion::V.spec().integers();
        for (u, v) in us.zip(vs).take(501) {
            assert_eq!(&v * &v - &u * &u * 2400, BigInt::one());
        }
    }

    #[test]
    fn modular_stream_matches_reduced_integers() {
        let ring = RingDescriptor::new(7, 4).unwrap();
        for c in Companion::ALL {
            let exact = c.spec().integers();
            let modular = c.spec().stream::<Residue>(&ring);
            for (e, m) in exact.zip(modular).take(200) {
                assert_eq!(Residue::new(&e, &ring), m);
            }
        }
    }

    #[test]
    fn apery_examples_and_oracle() {
        assert_eq!(apery(0), 1.into());
        assert_eq!(apery(1), 5.into());
        assert_eq!(apery(2), 73.into());
        assert_eq!(apery(3), 1445.into());
        for (n, a) in AperyStream::new().take(201).enumerate() {
            assert_eq!(a, apery_double_sum(n as u64), "A_{n}");
        }
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(2, 1), 2.into());
        assert_eq!(binom(6, 2), 15.into());
        assert_eq!(binom(3, 4), BigInt::zero());
        assert_eq!(binom(0, 0), BigInt::one());
        for n in 0..40u64 {
            let row_sum: BigInt = (0..=n).map(|k| binom(n, k)).sum();
            assert_eq!(row_sum, BigInt::one() << n);
        }
    }

    #[test]
    fn kernel_examples() {
        let mut k1 = KernelStream::<BigRational>::new(Kernel::K1, &());
        assert!(k1.value().is_one());
        k1.advance().unwrap();
        assert_eq!(k1.value(), &BigRational::new(1.into(), 512.into()));

        let ring = RingDescriptor::new(3, 3).unwrap();
        let mut k1m = KernelStream::<PadicScaled>::new(Kernel::K1, &ring);
        k1m.advance().unwrap();
        assert_eq!(k1m.value().valuation(), Some(0));
        assert_eq!(k1m.value().to_residue().rep(), &BigUint::from(26u32));

        let k2 = KernelStream::<BigRational>::new(Kernel::K2, &());
        assert!(k2.value().is_one());
    }

    #[test]
    fn streaming_kernels_match_closed_forms() {
        for kernel in [Kernel::K1, Kernel::K2, Kernel::K3] {
            let mut s = KernelStream::<BigRational>::new(kernel, &());
            for n in 0..60 {
                assert_eq!(s.value(), &kernel.exact(n), "{kernel:?} at {n}");
                s.advance().unwrap();
            }
        }
    }

    #[test]
    fn modular_kernels_match_exact() {
        for (p, k) in [(3u64, 6u32), (5, 6), (7, 4), (11, 3)] {
            let ring = RingDescriptor::new(p, k).unwrap();
            for kernel in [Kernel::K1, Kernel::K2, Kernel::K3] {
                let mut exact = KernelStream::<BigRational>::new(kernel, &());
                let mut modular = KernelStream::<PadicScaled>::new(kernel, &ring);
                for n in 0..=300 {
                    let want = Residue::from_rational(exact.value(), &ring).unwrap();
                    assert_eq!(modular.value().to_residue(), want, "{kernel:?} n={n} ring {p}^{k}");
                    exact.advance().unwrap();
                    modular.advance().unwrap();
                }
            }
        }
    }
}
