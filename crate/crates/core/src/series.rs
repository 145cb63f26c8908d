//! Convergent series for `1/pi` and `1/pi^2`, summed with a certified tail.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::bigfloat::{bits_for_digits, BigFloat};
use crate::error::{Error, Result};
use crate::quadratic::{phi_pow, QuadraticNumber, Radicand};
use crate::scalar::Real;
use crate::sequences::{apery, Kernel, KernelIntegers, SecondOrderStream};
use crate::sums::{term_exact, SumId, SumSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SeriesId {
    E1,
    E2,
    E3,
    E4,
    E8,
    #[serde(rename = "ECZ")]
    Ecz,
}

impl SeriesId {
    pub const ALL: [SeriesId; 6] = [
        SeriesId::E1,
        SeriesId::E2,
        SeriesId::E3,
        SeriesId::E4,
        SeriesId::E8,
        SeriesId::Ecz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesId::E1 => "E1",
            SeriesId::E2 => "E2",
            SeriesId::E3 => "E3",
            SeriesId::E4 => "E4",
            SeriesId::E8 => "E8",
            SeriesId::Ecz => "ECZ",
        }
    }
}

impl fmt::Display for SeriesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SeriesId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown series {s:?}"))
    }
}

/// Shape of the `n`-th term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Summand {
    /// `kernel(n) * w(n) * x^n`; the kernel already carries its power of two.
    Geometric {
        kernel: Kernel,
        weight: Vec<QuadraticNumber>,
        base: QuadraticNumber,
    },
    /// `A_n * w(n) * rho^(2n+1)`.
    AperyRho { weight: Vec<QuadraticNumber> },
    /// Terms of a truncated sum, continued to infinity.
    Sum(SumSpec),
}

/// `scalar / (pi^pi_power * sqrt(root))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimedLimit {
    pub scalar: BigRational,
    pub pi_power: u32,
    pub root: Option<u32>,
}

impl ClaimedLimit {
    fn new(scalar: i64, pi_power: u32, root: Option<u32>) -> Self {
        ClaimedLimit {
            scalar: BigRational::from_integer(scalar.into()),
            pi_power,
            root,
        }
    }

    pub fn value<R: Real>(&self, ctx: R::Ctx) -> R {
        let pi = R::pi(ctx);
        let mut den = R::from_i64(1, ctx);
        for _ in 0..self.pi_power {
            den = den * pi.clone();
        }
        if let Some(d) = self.root {
            den = den * R::sqrt_of(d, ctx);
        }
        R::from_ratio(&self.scalar, ctx) / den
    }
}

impl fmt::Display for ClaimedLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pi = if self.pi_power == 1 {
            "pi".to_string()
        } else {
            format!("pi^{}", self.pi_power)
        };
        match self.root {
            Some(d) => write!(f, "{}/({pi} sqrt{d})", self.scalar),
            None => write!(f, "{}/{pi}", self.scalar),
        }
    }
}

/// Upper bound `kernel * base * ((n+1)/n)^degree` on `|t(n+1)/t(n)|`, valid
/// for `n >= from`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioBound {
    pub kernel: f64,
    pub base: f64,
    pub degree: u32,
    pub from: u64,
}

const SAFETY: f64 = 1.0 + 1e-6;

impl RatioBound {
    pub fn asymptotic(&self) -> f64 {
        self.kernel * self.base
    }

    pub fn at(&self, n: u64) -> Option<f64> {
        if n < self.from || n == 0 {
            return None;
        }
        let growth = ((n + 1) as f64 / n as f64).powi(self.degree as i32);
        Some(self.asymptotic() * growth * SAFETY)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSpec {
    pub id: SeriesId,
    pub summand: Summand,
    pub limit: ClaimedLimit,
    pub ratio: RatioBound,
    /// The identity is numerically observed, not proven.
    pub conjectural: bool,
}

fn qn(a: i64, b: i64, d: Radicand) -> QuadraticNumber {
    QuadraticNumber::from_ints(a, b, d)
}

fn abs_f64(q: &QuadraticNumber) -> f64 {
    embed::<f64>(q, ()).abs()
}

impl SeriesSpec {
    pub fn builtin(id: SeriesId) -> SeriesSpec {
        use Radicand::*;
        let k1 = 1.0 / 64.0;
        let k2 = 27.0;
        match id {
            SeriesId::E1 | SeriesId::E2 => {
                let (sign, scalar, base) = if id == SeriesId::E1 {
                    (1, 32, phi_pow(-8))
                } else {
                    (-1, -96, phi_pow(8))
                };
                let beta = abs_f64(&base);
                SeriesSpec {
                    id,
                    summand: Summand::Geometric {
                        kernel: Kernel::K1,
                        weight: vec![qn(-1, 5 * sign, Five), qn(30, 42 * sign, Five)],
                        base,
                    },
                    limit: ClaimedLimit::new(scalar, 1, None),
                    ratio: RatioBound { kernel: k1, base: beta, degree: 1, from: 1 },
                    conjectural: false,
                }
            }
            SeriesId::E3 | SeriesId::E4 => {
                let (sum, limit) = if id == SeriesId::E3 {
                    (SumId::S1, ClaimedLimit::new(128, 1, Some(5)))
                } else {
                    (SumId::S2, ClaimedLimit::new(64, 1, None))
                };
                SeriesSpec {
                    id,
                    summand: Summand::Sum(SumSpec::builtin(sum)),
                    limit,
                    // companions grow by at most 47 per step once both
                    // weight coefficients are positive
                    ratio: RatioBound { kernel: k1, base: 47.0, degree: 1, from: 2 },
                    conjectural: false,
                }
            }
            SeriesId::E8 => {
                // (-1)^n phi^(-15n) = psi^(15n), psi = -1/phi
                let base = -&phi_pow(-15);
                let beta = abs_f64(&base);
                SeriesSpec {
                    id,
                    summand: Summand::Geometric {
                        kernel: Kernel::K2,
                        weight: vec![
                            qn(3 * 56, -3 * 25, Five),
                            qn(9 * 101, -9 * 45, Five),
                            qn(20 * 61, -20 * 27, Five),
                        ],
                        base,
                    },
                    limit: ClaimedLimit::new(3, 2, None),
                    ratio: RatioBound { kernel: k2, base: beta, degree: 2, from: 1 },
                    conjectural: true,
                }
            }
            SeriesId::Ecz => {
                let rho = QuadraticNumber::rho();
                let beta = abs_f64(&(&rho * &rho));
                SeriesSpec {
                    id,
                    summand: Summand::AperyRho {
                        weight: vec![qn(4, -1, Six), qn(8, 0, Six)],
                    },
                    limit: ClaimedLimit::new(1, 1, Some(2)),
                    ratio: RatioBound { kernel: 34.0, base: beta, degree: 1, from: 1 },
                    conjectural: false,
                }
            }
        }
    }

    pub fn all() -> Vec<SeriesSpec> {
        SeriesId::ALL.into_iter().map(SeriesSpec::builtin).collect()
    }

    /// Exact `n`-th term in `Q(sqrt d)`.
    pub fn term_exact(&self, n: u64) -> Result<QuadraticNumber> {
        let poly = |weight: &[QuadraticNumber]| {
            let mut acc = QuadraticNumber::from_ints(0, 0, weight[0].radicand());
            for c in weight.iter().rev() {
                acc = &acc.scale(&BigRational::from_integer(n.into())) + c;
            }
            acc
        };
        Ok(match &self.summand {
            Summand::Geometric { kernel, weight, base } => {
                let x = base.pow(n as i64)?;
                (&poly(weight) * &x).scale(&kernel.exact(n))
            }
            Summand::AperyRho { weight } => {
                let r = QuadraticNumber::rho().pow(2 * n as i64 + 1)?;
                (&poly(weight) * &r).scale(&BigRational::from_integer(apery(n)))
            }
            Summand::Sum(spec) => QuadraticNumber::from_rational(term_exact(spec, n), Radicand::Five),
        })
    }

    /// Term count at which the tail should drop below `10^-(digits+5)`.
    pub fn estimated_terms(&self, digits: u32) -> u64 {
        let r = self.ratio.asymptotic();
        ((digits as f64 + 5.0) * std::f64::consts::LN_10 / -r.ln()).ceil() as u64 + 20
    }
}

/// Real value of `a + b sqrt d` without cancelling leading digits: when `a`
/// and `b` differ in sign the value is taken as `norm / conjugate`.
pub fn embed<R: Real>(q: &QuadraticNumber, ctx: R::Ctx) -> R {
    if q.a().is_zero() || q.b().is_zero() || q.a().is_positive() == q.b().is_positive() {
        q.to_real(ctx)
    } else {
        R::from_ratio(&q.norm(), ctx) / q.conj().to_real(ctx)
    }
}

fn horner<R: Real>(coeffs: &[R], n: u64) -> R {
    let mut it = coeffs.iter().rev();
    let mut acc = it.next().expect("non-empty weight").clone();
    for c in it {
        acc = acc.mul_i64(n as i64) + c.clone();
    }
    acc
}

enum TermState<R: Real> {
    Geometric {
        kernel: Kernel,
        weight: Vec<R>,
        base: R,
        /// `kernel(n) * base^n`
        scaled: R,
    },
    AperyRho {
        weight: Vec<R>,
        rho: R,
        rho2: R,
        rho4: R,
        /// `B_n = A_n rho^(2n)` and `B_(n-1)`
        cur: R,
        prev: R,
    },
    Sum {
        spec: SumSpec,
        kernel: KernelIntegers,
        x: SecondOrderStream<BigInt>,
        y: SecondOrderStream<BigInt>,
    },
}

/// Terms of a series evaluated in `R`, with the running product of kernel and
/// geometric factor kept in `R` so nothing overflows.
pub struct SeriesTerms<R: Real> {
    n: u64,
    state: TermState<R>,
    ctx: R::Ctx,
}

impl<R: Real> SeriesTerms<R> {
    pub fn new(spec: &SeriesSpec, ctx: R::Ctx) -> Self {
        let embed_all = |w: &[QuadraticNumber]| w.iter().map(|c| embed::<R>(c, ctx)).collect::<Vec<R>>();
        let state = match &spec.summand {
            Summand::Geometric { kernel, weight, base } => TermState::Geometric {
                kernel: *kernel,
                weight: embed_all(weight),
                base: embed(base, ctx),
                scaled: R::from_i64(1, ctx),
            },
            Summand::AperyRho { weight } => {
                let rho = embed::<R>(&QuadraticNumber::rho(), ctx);
                let rho2 = rho.clone() * rho.clone();
                TermState::AperyRho {
                    weight: embed_all(weight),
                    rho4: rho2.clone() * rho2.clone(),
                    rho2,
                    rho,
                    cur: R::from_i64(1, ctx),
                    prev: R::from_i64(0, ctx),
                }
            }
            Summand::Sum(s) => TermState::Sum {
                spec: s.clone(),
                kernel: s.kernel.integers(),
                x: s.companions.0.spec().integers(),
                y: s.companions.1.spec().integers(),
            },
        };
        SeriesTerms { n: 0, state, ctx }
    }
}

impl<R: Real> Iterator for SeriesTerms<R> {
    type Item = R;

    fn next(&mut self) -> Option<R> {
        let n = self.n;
        let term = match &mut self.state {
            TermState::Geometric { kernel, weight, base, scaled } => {
                let t = scaled.clone() * horner(weight, n);
                let (num, den) = kernel.step_ratio(n).expect("first-order kernel");
                let mut next = scaled.clone();
                for k in num {
                    next = next.mul_i64(k);
                }
                for k in den {
                    next = next.div_i64(k);
                }
                *scaled = next * base.clone();
                t
            }
            TermState::AperyRho { weight, rho, rho2, rho4, cur, prev } => {
                let t = cur.clone() * rho.clone() * horner(weight, n);
                // (n+1)^3 A_(n+1) = (34n^3 + 51n^2 + 27n + 5) A_n - n^3 A_(n-1)
                let ni = n as i64;
                let a = 34 * ni.pow(3) + 51 * ni * ni + 27 * ni + 5;
                let b = ni.pow(3);
                let next = (cur.mul_i64(a) * rho2.clone() - prev.mul_i64(b) * rho4.clone()).div_i64((ni + 1).pow(3));
                *prev = std::mem::replace(cur, next);
                t
            }
            TermState::Sum { spec, kernel, x, y } => {
                let (num, shift) = kernel.next()?;
                let w = spec.weight_exact(n, &x.next()?, &y.next()?);
                R::from_dyadic(&(num * w), shift, self.ctx)
            }
        };
        self.n += 1;
        Some(term)
    }
}

/// Sum of the first `terms` terms.
pub fn partial_value<R: Real>(spec: &SeriesSpec, terms: u64, ctx: R::Ctx) -> R {
    SeriesTerms::<R>::new(spec, ctx)
        .take(terms as usize)
        .fold(R::from_i64(0, ctx), |acc, t| acc + t)
}

/// Running sum with a certified geometric tail.
#[derive(Clone, Debug)]
pub struct Summation<R> {
    pub value: R,
    pub terms_used: u64,
    /// Bound on the omitted tail `sum_{m >= terms_used} |t_m|`.
    pub tail: R,
}

/// Sums until `|t_n| r/(1-r) < threshold`, checking every observed term ratio
/// against the hard-coded bound.
pub fn sum_to_threshold<R: Real>(
    spec: &SeriesSpec,
    threshold: &R,
    max_terms: u64,
    ctx: R::Ctx,
) -> Result<Summation<R>> {
    let zero = R::from_i64(0, ctx);
    let mut sum = zero.clone();
    let mut last: Option<R> = None;
    for (n, t) in SeriesTerms::<R>::new(spec, ctx).enumerate() {
        let n = n as u64;
        if n >= max_terms {
            break;
        }
        let abs = t.abs();
        if let (Some(prev), Some(r)) = (&last, n.checked_sub(1).and_then(|m| spec.ratio.at(m))) {
            let bound = prev.clone() * R::from_ratio(&ratio_to_rational(r), ctx);
            if abs > bound && prev > &zero {
                return Err(Error::TailBoundViolated {
                    id: spec.id.name(),
                    n: (n - 1) as usize,
                    observed: (abs.clone() / prev.clone()).to_f64(),
                    bound: r,
                });
            }
        }
        sum = sum + t;
        if let Some(r) = spec.ratio.at(n).filter(|&r| r < 1.0) {
            let rr = ratio_to_rational(r);
            let factor = &rr / (BigRational::from_integer(1.into()) - &rr);
            let tail = abs.clone() * R::from_ratio(&factor, ctx);
            if tail < *threshold {
                return Ok(Summation {
                    value: sum,
                    terms_used: n + 1,
                    tail,
                });
            }
        }
        last = Some(abs);
    }
    Err(Error::NoConvergence {
        id: spec.id.name(),
        terms: max_terms as usize,
    })
}

fn ratio_to_rational(r: f64) -> BigRational {
    BigRational::from_float(r).expect("finite ratio")
}

fn pow10_inv(e: u32) -> BigRational {
    BigRational::new(1.into(), BigInt::from(10u32).pow(e))
}

#[derive(Clone, Debug)]
pub struct SeriesEvaluation {
    pub value: BigFloat,
    pub terms_used: u64,
    /// Geometric tail plus an allowance for rounding in the working precision.
    pub tail_bound: BigFloat,
    pub bits: u32,
}

/// Working resolution for `digits` decimals: 64 guard bits plus room for the
/// rounding error of the expected number of terms.
pub fn working_bits(spec: &SeriesSpec, digits: u32) -> u32 {
    let terms = spec.estimated_terms(digits).max(2);
    let log_terms = 64 - (terms - 1).leading_zeros();
    bits_for_digits(digits, 64) + 3 * log_terms
}

pub fn eval_series(spec: &SeriesSpec, digits: u32) -> Result<SeriesEvaluation> {
    assert!(digits >= 10, "at least 10 digits");
    let bits = working_bits(spec, digits);
    let threshold = BigFloat::from_ratio(&pow10_inv(digits + 5), bits);
    let max_terms = 4 * spec.estimated_terms(digits) + 1000;
    let s = sum_to_threshold::<BigFloat>(spec, &threshold, max_terms, bits)?;
    let t = s.terms_used as i64 + 1;
    let rounding = BigFloat::from_raw(BigInt::from(t * t * t) << 16u32, bits);
    Ok(SeriesEvaluation {
        value: s.value,
        terms_used: s.terms_used,
        tail_bound: s.tail + rounding,
        bits,
    })
}

/// Double-precision estimate of the series value.
pub fn approximate(spec: &SeriesSpec) -> Result<f64> {
    let s = sum_to_threshold::<f64>(spec, &1e-18, 10_000, ())?;
    Ok(s.value)
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub series: SeriesId,
    pub digits: u32,
    pub value: String,
    pub claimed_limit: String,
    pub limit_value: String,
    pub abs_error: String,
    pub digits_matched: u32,
    pub terms_used: u64,
    pub tail_bound: String,
    pub pass: bool,
    pub conjectural: bool,
}

/// Compares the series with its claimed closed form computed from the
/// independent pi and square-root oracles.
pub fn verify_limit(spec: &SeriesSpec, digits: u32) -> Result<LimitReport> {
    let eval = eval_series(spec, digits)?;
    let limit = spec.limit.value::<BigFloat>(eval.bits);
    let err = (eval.value.clone() - limit.clone()).abs();
    let cap = (eval.bits as f64 / std::f64::consts::LOG2_10).floor() as u32;
    Ok(LimitReport {
        series: spec.id,
        digits,
        value: eval.value.to_decimal(digits),
        claimed_limit: spec.limit.to_string(),
        limit_value: limit.to_decimal(digits),
        abs_error: err.to_scientific(3),
        digits_matched: err.decimal_exponent_below(cap),
        terms_used: eval.terms_used,
        tail_bound: eval.tail_bound.to_scientific(3),
        pass: err.abs_below_pow10(digits - 2),
        conjectural: spec.conjectural,
    })
}

/// Exact term-by-term links between the series and the truncated sums:
/// `E1 - E2 = sqrt5 S1`, `E1 + E2 = -S2`, `4 E8 = S4 - sqrt5 S3` and
/// `ECZ = S6 - sqrt6 S5`. Returns the failures (expected none).
pub fn check_term_identities(series: &[SeriesSpec], sums: &[SumSpec], n_max: u64) -> Vec<String> {
    let mut failures = Vec::new();
    let ser = |id| series.iter().find(|s| s.id == id);
    let sum = |id| sums.iter().find(|s| s.id == id);
    let (Some(e1), Some(e2), Some(e8), Some(ecz)) =
        (ser(SeriesId::E1), ser(SeriesId::E2), ser(SeriesId::E8), ser(SeriesId::Ecz))
    else {
        return vec!["series registry incomplete".into()];
    };
    let (Some(s1), Some(s2), Some(s3), Some(s4), Some(s5), Some(s6)) = (
        sum(SumId::S1),
        sum(SumId::S2),
        sum(SumId::S3),
        sum(SumId::S4),
        sum(SumId::S5),
        sum(SumId::S6),
    ) else {
        return vec!["sum registry incomplete".into()];
    };
    let r5 = qn(0, 1, Radicand::Five);
    let r6 = qn(0, 1, Radicand::Six);
    let lift = |r: BigRational, d| QuadraticNumber::from_rational(r, d);
    for n in 0..n_max {
        let term = |s: &SeriesSpec| s.term_exact(n).expect("invertible bases");
        let (t1, t2, t8, tc) = (term(e1), term(e2), term(e8), term(ecz));
        let five = |s| lift(term_exact(s, n), Radicand::Five);
        let six = |s| lift(term_exact(s, n), Radicand::Six);
        if &t1 - &t2 != &r5 * &five(s1) {
            failures.push(format!("E1 - E2 != sqrt5 S1 at n = {n}"));
        }
        if &t1 + &t2 != -&five(s2) {
            failures.push(format!("E1 + E2 != -S2 at n = {n}"));
        }
        if t8.scale(&BigRational::from_integer(4.into())) != &five(s4) - &(&r5 * &five(s3)) {
            failures.push(format!("4 E8 != S4 - sqrt5 S3 at n = {n}"));
        }
        if tc != &six(s6) - &(&r6 * &six(s5)) {
            failures.push(format!("ECZ != S6 - sqrt6 S5 at n = {n}"));
        }
    }
    failures
}
