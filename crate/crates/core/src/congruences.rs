//! Supercongruence harness.
//!
//! A family asserts `S(N(p, s)) == eps(p) * p^e * S(N(p, s-1)) (mod p^(c s))`
//! where `N` is either `p^s` or `(p^s + 1)/2` and `eps` a Legendre symbol
//! (or `1`). Every case is evaluated, including those where the symbol
//! vanishes; the outcome records how far the congruence actually holds.

use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::residue::{legendre, odd_primes_up_to, Residue, RingDescriptor};
use crate::scalar::SumScalar;
use crate::sums::{sum_exact, sum_mod_at, SumId, SumSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    /// `N = p^s`
    Full,
    /// `N = (p^s + 1) / 2`
    Half,
}

impl Truncation {
    /// Both modes give `1` at `s = 0`.
    pub fn length(self, p: u64, s: u32) -> u64 {
        let q = p.pow(s);
        match self {
            Truncation::Full => q,
            Truncation::Half => q.div_ceil(2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Truncation::Full => "full",
            Truncation::Half => "half",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceFamily {
    pub id: String,
    pub sum: SumSpec,
    /// Legendre argument `m`; `None` means no symbol.
    pub symbol: Option<i64>,
    pub p_power: u32,
    /// The modulus is `p^(modulus_multiplier * s)`.
    pub modulus_multiplier: u32,
    pub truncation: Truncation,
    pub exceptions: Vec<(u64, u32)>,
}

impl CongruenceFamily {
    fn new(
        sum: SumId,
        symbol: Option<i64>,
        p_power: u32,
        modulus_multiplier: u32,
        truncation: Truncation,
        exceptions: Vec<(u64, u32)>,
    ) -> Self {
        CongruenceFamily {
            id: format!("F{}-{}", &sum.name()[1..], truncation.name()),
            sum: SumSpec::builtin(sum),
            symbol,
            p_power,
            modulus_multiplier,
            truncation,
            exceptions,
        }
    }

    /// The ten built-in families, in report order.
    pub fn builtin() -> Vec<CongruenceFamily> {
        use SumId::*;
        use Truncation::*;
        vec![
            Self::new(S1, Some(-5), 1, 3, Full, vec![]),
            Self::new(S1, Some(-5), 1, 3, Half, vec![]),
            Self::new(S2, Some(-1), 1, 3, Full, vec![]),
            Self::new(S2, Some(-1), 1, 3, Half, vec![]),
            Self::new(S3, Some(5), 2, 5, Full, vec![]),
            Self::new(S3, Some(5), 2, 4, Half, vec![]),
            Self::new(S4, None, 2, 5, Full, vec![]),
            Self::new(S4, None, 2, 4, Half, vec![]),
            Self::new(S5, Some(-3), 1, 3, Full, vec![]),
            Self::new(S6, Some(-2), 1, 3, Full, vec![(3, 1)]),
        ]
    }

    pub fn find(id: &str) -> Option<CongruenceFamily> {
        Self::builtin().into_iter().find(|f| f.id.eq_ignore_ascii_case(id))
    }

    /// Same family over a different weight table (used for mutation checks).
    pub fn with_sum(mut self, sum: SumSpec) -> Self {
        self.sum = sum;
        self
    }

    pub fn is_expected_exception(&self, p: u64, s: u32) -> bool {
        self.exceptions.contains(&(p, s))
    }

    pub fn modulus_exponent(&self, s: u32) -> u32 {
        self.modulus_multiplier * s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Holds,
    Fails,
    /// Listed exception that indeed fails.
    ExpectedException,
    /// Listed exception that holds after all.
    UnexpectedlyHolds,
    /// Failure in a case whose Legendre symbol vanishes.
    Anomaly,
}

impl CaseStatus {
    pub fn is_acceptable(self) -> bool {
        matches!(
            self,
            CaseStatus::Holds | CaseStatus::ExpectedException | CaseStatus::Anomaly
        )
    }
}

impl fmt::Display for CaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseStatus::Holds => "holds",
            CaseStatus::Fails => "FAILS",
            CaseStatus::ExpectedException => "expected exception",
            CaseStatus::UnexpectedlyHolds => "exception UNEXPECTEDLY HOLDS",
            CaseStatus::Anomaly => "anomaly (symbol zero)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceOutcome {
    pub family: String,
    pub p: u64,
    pub s: u32,
    pub n_lhs: u64,
    pub n_rhs: u64,
    pub modulus_exponent: u32,
    pub lhs: Residue,
    pub rhs: Residue,
    pub holds: bool,
    /// Valuation of `lhs - rhs`, capped at the modulus exponent.
    pub excess: u32,
    pub expected_exception: bool,
    pub symbol_zero: bool,
}

impl CongruenceOutcome {
    pub fn modulus_label(&self) -> String {
        format!("{}^{}", self.p, self.modulus_exponent)
    }

    pub fn status(&self) -> CaseStatus {
        match (self.expected_exception, self.holds) {
            (true, false) => CaseStatus::ExpectedException,
            (true, true) => CaseStatus::UnexpectedlyHolds,
            (false, true) => CaseStatus::Holds,
            (false, false) if self.symbol_zero => CaseStatus::Anomaly,
            (false, false) => CaseStatus::Fails,
        }
    }
}

/// Checks one case at the family's modulus `p^(c s)`.
pub fn check_case(family: &CongruenceFamily, p: u64, s: u32) -> Result<CongruenceOutcome> {
    check_case_at(family, p, s, family.modulus_exponent(s))
}

/// Checks one case at an explicit modulus exponent `k`.
pub fn check_case_at(family: &CongruenceFamily, p: u64, s: u32, k: u32) -> Result<CongruenceOutcome> {
    assert!(s >= 1, "s starts at 1");
    let ring = RingDescriptor::new(p, k)?;
    let n_lhs = family.truncation.length(p, s);
    let n_rhs = family.truncation.length(p, s - 1);
    let sums = sum_mod_at(&family.sum, &[n_lhs, n_rhs], &ring)?;
    let symbol = match family.symbol {
        Some(m) => legendre(m, p)?,
        None => 1,
    };
    let factor = Residue::from_int(symbol as i64, &ring)
        .mul(&Residue::new(&BigUint::from(p).pow(family.p_power).into(), &ring));
    let lhs = sums[0].clone();
    let rhs = factor.mul(&sums[1]);
    let excess = lhs.sub(&rhs).valuation();
    Ok(CongruenceOutcome {
        family: family.id.clone(),
        p,
        s,
        n_lhs,
        n_rhs,
        modulus_exponent: k,
        holds: excess == k,
        excess,
        expected_exception: family.is_expected_exception(p, s),
        symbol_zero: symbol == 0,
        lhs,
        rhs,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct Case<'a> {
    pub family: &'a CongruenceFamily,
    pub p: u64,
    pub s: u32,
}

/// Cases `(family, p, s)` for odd primes `p <= p_max` and `1 <= s <= s_max`,
/// ordered by family, then `p`, then `s`.
pub fn sweep_cases(families: &[CongruenceFamily], p_max: u64, s_max: u32) -> Vec<Case<'_>> {
    let primes = odd_primes_up_to(p_max);
    families
        .iter()
        .flat_map(|family| {
            primes
                .iter()
                .flat_map(move |&p| (1..=s_max).map(move |s| Case { family, p, s }))
        })
        .collect()
}

/// Evaluates cases on `jobs` worker threads (all cores when `None`); the
/// output order always matches the input order.
pub fn run_cases(cases: &[Case<'_>], jobs: Option<usize>) -> Result<Vec<CongruenceOutcome>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .expect("thread pool");
    pool.install(|| {
        cases
            .par_iter()
            .map(|c| check_case(c.family, c.p, c.s))
            .collect()
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub total: usize,
    pub holds: usize,
    pub fails: usize,
    pub expected_exceptions: usize,
    pub unexpectedly_holding_exceptions: usize,
    pub anomalies: usize,
    pub symbol_zero_cases: usize,
    pub verdict: bool,
}

impl SweepSummary {
    pub fn of(outcomes: &[CongruenceOutcome]) -> Self {
        let mut s = SweepSummary {
            total: outcomes.len(),
            ..Default::default()
        };
        for o in outcomes {
            match o.status() {
                CaseStatus::Holds => s.holds += 1,
                CaseStatus::Fails => s.fails += 1,
                CaseStatus::ExpectedException => s.expected_exceptions += 1,
                CaseStatus::UnexpectedlyHolds => s.unexpectedly_holding_exceptions += 1,
                CaseStatus::Anomaly => s.anomalies += 1,
            }
            s.symbol_zero_cases += o.symbol_zero as usize;
        }
        s.verdict = outcomes.iter().all(|o| o.status().is_acceptable());
        s
    }
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub outcomes: Vec<CongruenceOutcome>,
    pub summary: SweepSummary,
}

pub fn run_sweep(
    families: &[CongruenceFamily],
    p_max: u64,
    s_max: u32,
    jobs: Option<usize>,
) -> Result<SweepReport> {
    let outcomes = run_cases(&sweep_cases(families, p_max, s_max), jobs)?;
    let summary = SweepSummary::of(&outcomes);
    Ok(SweepReport { outcomes, summary })
}

/// `S_i(1)` fixtures; `S_1(1) = 10` and `S_2(1) = 2` are the constants that
/// make the `s = 1` congruences read `S(p) == 10 (-5/p) p` and `2 (-1/p) p`.
pub const BASE_VALUES: [(SumId, i64); 6] = [
    (SumId::S1, 10),
    (SumId::S2, 2),
    (SumId::S3, 300),
    (SumId::S4, 672),
    (SumId::S5, 13),
    (SumId::S6, 32),
];

/// Mismatches between `S(1)` and [`BASE_VALUES`] (expected none).
pub fn base_consistency(specs: &[SumSpec]) -> Vec<String> {
    BASE_VALUES
        .iter()
        .filter_map(|&(id, want)| {
            let spec = specs.iter().find(|s| s.id == id)?;
            let got = sum_exact(spec, 1).value;
            (got != num_rational::BigRational::from_integer(want.into()))
                .then(|| format!("{id}(1) = {got}, expected {want}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::RingDescriptor;
    use num_rational::BigRational;

    fn fam(id: &str) -> CongruenceFamily {
        CongruenceFamily::find(id).unwrap()
    }

    #[test]
    fn registry_shape() {
        let ids: Vec<String> = CongruenceFamily::builtin().into_iter().map(|f| f.id).collect();
        assert_eq!(
            ids,
            ["F1-full", "F1-half", "F2-full", "F2-half", "F3-full", "F3-half", "F4-full", "F4-half", "F5-full", "F6-full"]
        );
        assert_eq!(fam("F3-half").modulus_multiplier, 4);
        assert_eq!(fam("F3-full").modulus_multiplier, 5);
        assert_eq!(fam("F6-full").exceptions, vec![(3, 1)]);
    }

    #[test]
    fn truncation_lengths() {
        assert_eq!(Truncation::Full.length(7, 0), 1);
        assert_eq!(Truncation::Half.length(7, 0), 1);
        assert_eq!(Truncation::Full.length(7, 2), 49);
        assert_eq!(Truncation::Half.length(7, 2), 25);
    }

    #[test]
    fn f1_full_at_three() {
        let o = check_case(&fam("F1-full"), 3, 1).unwrap();
        assert_eq!(o.rhs.rep(), &BigUint::from(3u32));
        // lhs from the exact oracle
        let ring = RingDescriptor::new(3, 3).unwrap();
        let s = sum_exact(&SumSpec::builtin(SumId::S1), 3).value;
        assert_eq!(o.lhs, Residue::from_rational(&s, &ring).unwrap());
        assert!(o.holds);
        assert_eq!(o.excess, 3);
    }

    #[test]
    fn f2_half_at_three() {
        let o = check_case(&fam("F2-half"), 3, 1).unwrap();
        assert_eq!(o.n_lhs, 2);
        let ring = RingDescriptor::new(3, 3).unwrap();
        let want = Residue::from_rational(&BigRational::new(1149.into(), 128.into()), &ring).unwrap();
        assert_eq!(o.lhs, want);
        assert_eq!(o.lhs.rep(), &BigUint::from(21u32));
        assert_eq!(o.rhs.rep(), &BigUint::from(21u32));
        assert!(o.holds);
    }

    #[test]
    fn s6_at_three_is_the_exception() {
        let o = check_case(&fam("F6-full"), 3, 1).unwrap();
        assert!(!o.holds);
        assert!(o.expected_exception);
        assert_eq!(o.excess, 2);
        assert_eq!(o.status(), CaseStatus::ExpectedException);
        let r = run_sweep(&[fam("F6-full")], 3, 1, Some(1)).unwrap();
        assert_eq!(r.outcomes.len(), 1);
        assert!(r.summary.verdict);
    }

    #[test]
    fn empty_sweep_passes() {
        let r = run_sweep(&[], 100, 2, None).unwrap();
        assert!(r.outcomes.is_empty());
        assert!(r.summary.verdict);
    }

    #[test]
    fn small_sweep_against_exact_oracle() {
        let f = fam("F1-full");
        let r = run_sweep(std::slice::from_ref(&f), 7, 1, Some(2)).unwrap();
        assert_eq!(r.outcomes.iter().map(|o| o.p).collect::<Vec<_>>(), vec![3, 5, 7]);
        for o in &r.outcomes {
            assert!(o.holds, "{o:?}");
            let ring = RingDescriptor::new(o.p, 3).unwrap();
            let spec = SumSpec::builtin(SumId::S1);
            let lhs = Residue::from_rational(&sum_exact(&spec, o.p).value, &ring).unwrap();
            let sym = legendre(-5, o.p).unwrap() as i64;
            let rhs = Residue::from_rational(&(sum_exact(&spec, 1).value * BigRational::from_integer((sym * o.p as i64).into())), &ring).unwrap();
            assert_eq!(lhs, o.lhs);
            assert_eq!(rhs, o.rhs);
        }
    }

    #[test]
    fn symbol_zero_cases_are_flagged() {
        let o = check_case(&fam("F1-full"), 5, 1).unwrap();
        assert!(o.symbol_zero);
        assert!(o.rhs.is_zero());
        let o = check_case(&fam("F4-full"), 5, 1).unwrap();
        assert!(!o.symbol_zero);
    }

    #[test]
    fn excess_is_monotone_in_the_modulus() {
        for f in CongruenceFamily::builtin() {
            for p in [3u64, 5, 7] {
                let full = check_case(&f, p, 1).unwrap();
                let k = full.modulus_exponent;
                let lower = check_case_at(&f, p, 1, k - 1).unwrap();
                assert_eq!(lower.excess, full.excess.min(k - 1), "{} p={p}", f.id);
                assert!(full.excess <= k);
                assert_eq!(full.holds, full.excess == k);
            }
        }
    }

    #[test]
    fn unexpected_pass_of_exception_fails_verdict() {
        let mut f = fam("F1-full");
        f.exceptions.push((3, 1));
        let r = run_sweep(&[f], 3, 1, Some(1)).unwrap();
        assert_eq!(r.outcomes[0].status(), CaseStatus::UnexpectedlyHolds);
        assert!(!r.summary.verdict);
    }

    #[test]
    fn corrupted_weights_break_the_sweep() {
        let mut spec = SumSpec::builtin(SumId::S1);
        spec.weights[1].0 = -31;
        let f = fam("F1-full").with_sum(spec);
        let r = run_sweep(&[f], 13, 1, Some(1)).unwrap();
        assert!(!r.summary.verdict);
    }

    #[test]
    fn base_consistency_holds_and_detects_mutation() {
        assert!(base_consistency(&SumSpec::all()).is_empty());
        let mut specs = SumSpec::all();
        specs[5].weights[0].1 = 31;
        assert_eq!(base_consistency(&specs).len(), 1);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let fams = CongruenceFamily::builtin();
        let a = run_sweep(&fams, 13, 1, Some(1)).unwrap();
        let b = run_sweep(&fams, 13, 1, Some(4)).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
        assert_eq!(a.summary, b.summary);
    }
}
