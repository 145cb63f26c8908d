//! The six truncated sums `S_1(N) .. S_6(N)`, exactly and modulo `p^K`.
//!
//! Each sum is `sum_{n<N} kernel(n) * w(n)` where `w(n)` is a polynomial in
//! `n` whose coefficients are integer combinations `f*X_n + l*Y_n` of a
//! companion pair `(X, Y)`. Both evaluation paths share [`TermStream`]:
//! the exact path runs it over [`BigRational`], the modular path over
//! [`PadicScaled`] kernels accumulating into [`Residue`]s.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Result;
use crate::quadratic::u_v_closed_form;
use crate::residue::{PadicScaled, Residue, Ring, RingDescriptor};
use crate::scalar::{KernelCarrier, SumScalar};
use crate::sequences::{fib, lucas, Companion, Kernel, KernelStream, SecondOrderStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SumId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl SumId {
    pub const ALL: [SumId; 6] = [SumId::S1, SumId::S2, SumId::S3, SumId::S4, SumId::S5, SumId::S6];

    pub fn name(self) -> &'static str {
        match self {
            SumId::S1 => "S1",
            SumId::S2 => "S2",
            SumId::S3 => "S3",
            SumId::S4 => "S4",
            SumId::S5 => "S5",
            SumId::S6 => "S6",
        }
    }
}

impl fmt::Display for SumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SumId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SumId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown sum {s:?}"))
    }
}

/// Declarative description of one truncated sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumSpec {
    pub id: SumId,
    pub kernel: Kernel,
    pub companions: (Companion, Companion),
    /// `weights[j] = (f, l)` contributes `n^j (f X_n + l Y_n)`.
    pub weights: Vec<(i64, i64)>,
}

impl SumSpec {
    pub fn builtin(id: SumId) -> SumSpec {
        use Companion::*;
        let (kernel, companions, weights) = match id {
            SumId::S1 => (Kernel::K1, (F8, L8), vec![(1, 5), (-30, 42)]),
            SumId::S2 => (Kernel::K1, (F8, L8), vec![(25, 1), (210, -30)]),
            SumId::S3 => (Kernel::K2, (F15, L15), vec![(336, 150), (1818, 810), (2440, 1080)]),
            SumId::S4 => (Kernel::K2, (F15, L15), vec![(750, 336), (4050, 1818), (5400, 2440)]),
            SumId::S5 => (Kernel::K3, (U, V), vec![(640, 13), (800, 16)]),
            SumId::S6 => (Kernel::K3, (U, V), vec![(1560, 32), (1920, 40)]),
        };
        SumSpec {
            id,
            kernel,
            companions,
            weights,
        }
    }

    pub fn all() -> Vec<SumSpec> {
        SumId::ALL.into_iter().map(SumSpec::builtin).collect()
    }

    /// `w(n)` from exact companion values.
    pub fn weight_exact(&self, n: u64, x: &BigInt, y: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut power = BigInt::from(1);
        for &(f, l) in &self.weights {
            acc += &power * (x * f + y * l);
            power *= n;
        }
        acc
    }

    /// Companion values `(X_n, Y_n)` from closed forms rather than streams.
    pub fn companions_exact(&self, n: u64) -> (BigInt, BigInt) {
        match self.companions.0 {
            Companion::F8 | Companion::L8 => (fib(8 * n), lucas(8 * n)),
            Companion::F15 | Companion::L15 => (fib(15 * n), lucas(15 * n)),
            Companion::U | Companion::V => {
                let (u, v) = u_v_closed_form(n).expect("5 + 2 sqrt 6 is invertible");
                let int = |x: &crate::quadratic::QuadraticNumber| {
                    debug_assert!(x.is_rational() && x.a().is_integer());
                    x.a().to_integer()
                };
                (int(&u), int(&v))
            }
        }
    }
}

/// Streams the summands `kernel(n) * w(n)` in a chosen carrier.
pub struct TermStream<C: KernelCarrier> {
    kernel: KernelStream<C>,
    xs: SecondOrderStream<C::Scalar>,
    ys: SecondOrderStream<C::Scalar>,
    coeffs: Vec<(C::Scalar, C::Scalar)>,
    ctx: <C::Scalar as SumScalar>::Ctx,
    started: bool,
}

impl<C: KernelCarrier> TermStream<C> {
    pub fn new(spec: &SumSpec, ctx: &<C::Scalar as SumScalar>::Ctx) -> Self {
        TermStream {
            kernel: KernelStream::new(spec.kernel, ctx),
            xs: spec.companions.0.spec().stream(ctx),
            ys: spec.companions.1.spec().stream(ctx),
            coeffs: spec
                .weights
                .iter()
                .map(|&(f, l)| (C::Scalar::from_int(f, ctx), C::Scalar::from_int(l, ctx)))
                .collect(),
            ctx: ctx.clone(),
            started: false,
        }
    }

    fn next_term(&mut self) -> Result<C::Scalar> {
        if self.started {
            self.kernel.advance()?;
        }
        self.started = true;
        let n = self.kernel.index();
        let x = self.xs.next().expect("infinite");
        let y = self.ys.next().expect("infinite");
        let n_s = C::Scalar::from_int(n as i64, &self.ctx);
        let mut w = C::Scalar::zero_in(&self.ctx);
        let mut power = C::Scalar::from_int(1, &self.ctx);
        for (j, (f, l)) in self.coeffs.iter().enumerate() {
            if j > 0 {
                power = power.mul(&n_s);
            }
            w = w.add(&power.mul(&f.mul(&x).add(&l.mul(&y))));
        }
        Ok(self.kernel.value().to_scalar()?.mul(&w))
    }
}

impl<C: KernelCarrier> Iterator for TermStream<C> {
    type Item = Result<C::Scalar>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_term())
    }
}

/// Partial sums at several truncation lengths in one pass; output order
/// follows `lengths`.
pub fn partial_sums<C: KernelCarrier>(
    spec: &SumSpec,
    lengths: &[u64],
    ctx: &<C::Scalar as SumScalar>::Ctx,
) -> Result<Vec<C::Scalar>> {
    let max = lengths.iter().copied().max().unwrap_or(0);
    let mut out: Vec<Option<C::Scalar>> = vec![None; lengths.len()];
    let mut acc = C::Scalar::zero_in(ctx);
    let mut terms = TermStream::<C>::new(spec, ctx);
    for n in 0..=max {
        for (slot, &len) in out.iter_mut().zip(lengths) {
            if len == n {
                *slot = Some(acc.clone());
            }
        }
        if n == max {
            break;
        }
        acc = acc.add(&terms.next().expect("infinite")?);
    }
    Ok(out.into_iter().map(|s| s.expect("every length visited")).collect())
}

/// `S(N)` as an exact rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSum {
    pub value: BigRational,
    pub len: u64,
}

pub fn sum_exact(spec: &SumSpec, len: u64) -> ExactSum {
    let value = partial_sums::<BigRational>(spec, &[len], &())
        .expect("exact arithmetic only fails on division by zero")
        .remove(0);
    ExactSum { value, len }
}

/// `S(N) mod p^K`, streaming `p`-adically scaled kernel terms.
pub fn sum_mod(spec: &SumSpec, len: u64, ring: &Ring) -> Result<Residue> {
    Ok(partial_sums::<PadicScaled>(spec, &[len], ring)?.remove(0))
}

/// [`sum_mod`] at several lengths sharing one pass.
pub fn sum_mod_at(spec: &SumSpec, lengths: &[u64], ring: &Ring) -> Result<Vec<Residue>> {
    partial_sums::<PadicScaled>(spec, lengths, ring)
}

/// The `n`-th summand from closed forms (binomials, Fibonacci/Lucas by fast
/// doubling, `U`/`V` from powers of `5 + 2 sqrt 6`).
pub fn term_exact(spec: &SumSpec, n: u64) -> BigRational {
    let (x, y) = spec.companions_exact(n);
    spec.kernel.exact(n) * BigRational::from_integer(spec.weight_exact(n, &x, &y))
}

/// Rings used for the exact-versus-modular comparison.
pub const ORACLE_RINGS: [(u64, u32); 5] = [(3, 6), (5, 5), (7, 4), (11, 3), (13, 3)];

/// Compares `sum_mod(spec, N)` with the reduction of `sum_exact(spec, N)` for
/// every `N <= n_max` and every ring; returns the mismatches.
pub fn check_oracle_equivalence(specs: &[SumSpec], n_max: u64, rings: &[(u64, u32)]) -> Vec<String> {
    let lengths: Vec<u64> = (0..=n_max).collect();
    let mut failures = Vec::new();
    for spec in specs {
        let exact = partial_sums::<BigRational>(spec, &lengths, &()).expect("exact arithmetic");
        for &(p, k) in rings {
            let ring = match RingDescriptor::new(p, k) {
                Ok(r) => r,
                Err(e) => {
                    failures.push(format!("ring {p}^{k}: {e}"));
                    continue;
                }
            };
            let modular = match sum_mod_at(spec, &lengths, &ring) {
                Ok(m) => m,
                Err(e) => {
                    failures.push(format!("{} mod {p}^{k}: {e}", spec.id));
                    continue;
                }
            };
            for (n, (e, m)) in exact.iter().zip(&modular).enumerate() {
                match Residue::from_rational(e, &ring) {
                    Ok(r) if r.rep().to_bytes_le() == m.rep().to_bytes_le() => {}
                    Ok(r) => {
                        failures.push(format!("{}({n}) mod {p}^{k}: exact {r}, modular {m}", spec.id));
                    }
                    Err(err) => failures.push(format!("{}({n}) mod {p}^{k}: {err}", spec.id)),
                }
            }
        }
    }
    failures
}
