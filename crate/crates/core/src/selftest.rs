//! Built-in consistency suite run by `fibcong selftest`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::congruences::{base_consistency, run_sweep, CongruenceFamily};
use crate::quadratic::check_structural_identities;
use crate::residue::{legendre, odd_primes_up_to, PadicScaled, Residue, RingDescriptor};
use crate::sequences::check_sequence_invariants;
use crate::series::{check_term_identities, verify_limit, SeriesSpec, Summand};
use crate::sums::{check_oracle_equivalence, SumId, SumSpec, ORACLE_RINGS};

/// Weight tables under test; normally the built-ins.
#[derive(Clone, Debug, PartialEq)]
pub struct SelftestConfig {
    pub sums: Vec<SumSpec>,
    pub series: Vec<SeriesSpec>,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            sums: SumSpec::all(),
            series: SeriesSpec::all(),
        }
    }
}

impl SelftestConfig {
    /// Built-ins with the linear Fibonacci coefficient of `S1` off by one,
    /// everywhere that table is used.
    pub fn corrupted() -> Self {
        let mut cfg = Self::default();
        let bump = |s: &mut SumSpec| {
            if s.id == SumId::S1 {
                s.weights[1].0 -= 1;
            }
        };
        cfg.sums.iter_mut().for_each(bump);
        for s in &mut cfg.series {
            if let Summand::Sum(spec) = &mut s.summand {
                bump(spec);
            }
        }
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

fn check(name: &'static str, failures: Vec<String>) -> CheckResult {
    CheckResult {
        name,
        passed: failures.is_empty(),
        failures,
    }
}

/// Residue-ring invariants: Euler's criterion against brute-force squares,
/// and p-adically scaled products against plain big-integer products.
pub fn check_residue_invariants() -> Vec<String> {
    let mut failures = Vec::new();
    for p in odd_primes_up_to(100) {
        let squares: Vec<bool> = {
            let mut v = vec![false; p as usize];
            for x in 1..p {
                v[(x * x % p) as usize] = true;
            }
            v
        };
        for m in -(p as i64)..(p as i64) {
            let r = m.rem_euclid(p as i64) as usize;
            let want = if r == 0 { 0 } else if squares[r] { 1 } else { -1 };
            if legendre(m, p) != Ok(want) {
                failures.push(format!("({m}/{p}) != {want}"));
            }
        }
    }
    let samples: Vec<BigInt> = [-1000i64, -81, -7, 0, 1, 3, 25, 45, 343, 3125, 1_000_003, 9_765_625]
        .into_iter()
        .map(BigInt::from)
        .collect();
    for (p, k) in [(3u64, 6u32), (5, 5), (7, 4), (11, 3)] {
        let ring = RingDescriptor::new(p, k).expect("valid ring");
        for a in &samples {
            for b in &samples {
                let scaled = PadicScaled::from_bigint(a, &ring).mul(&PadicScaled::from_bigint(b, &ring));
                if scaled.to_residue() != Residue::new(&(a * b), &ring) {
                    failures.push(format!("{a} * {b} mod {p}^{k}"));
                }
            }
        }
    }
    failures
}

/// Runs every check and collects the outcome.
pub fn run_selftest(cfg: &SelftestConfig) -> SelftestReport {
    let sweep = {
        let families: Vec<CongruenceFamily> = CongruenceFamily::builtin()
            .into_iter()
            .filter_map(|f| {
                let sum = cfg.sums.iter().find(|s| s.id == f.sum.id)?.clone();
                Some(f.with_sum(sum))
            })
            .collect();
        match run_sweep(&families, 13, 1, None) {
            Ok(r) => r
                .outcomes
                .iter()
                .filter(|o| !o.status().is_acceptable())
                .map(|o| format!("{} p={} s={}: {}", o.family, o.p, o.s, o.status()))
                .collect(),
            Err(e) => vec![e.to_string()],
        }
    };
    let limits = cfg
        .series
        .iter()
        .filter_map(|s| match verify_limit(s, 20) {
            Ok(r) if r.pass => None,
            Ok(r) => Some(format!("{} misses {} (error {})", s.id, r.claimed_limit, r.abs_error)),
            Err(e) => Some(format!("{}: {e}", s.id)),
        })
        .collect();

    let checks = vec![
        check("structural identities", check_structural_identities()),
        check("sequence invariants", check_sequence_invariants()),
        check("residue invariants", check_residue_invariants()),
        check("base values", base_consistency(&cfg.sums)),
        check(
            "exact/modular oracle equivalence",
            check_oracle_equivalence(&cfg.sums, 120, &ORACLE_RINGS),
        ),
        check("series/sum term identities", check_term_identities(&cfg.series, &cfg.sums, 25)),
        check("congruence sweep (p <= 13, s = 1)", sweep),
        check("series limits (20 digits)", limits),
    ];
    let passed = checks.iter().all(|c| c.passed);
    SelftestReport { checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let r = run_selftest(&SelftestConfig::default());
        assert!(r.passed, "{r:#?}");
        assert_eq!(r.checks.len(), 8);
    }

    #[test]
    fn corrupted_weights_fail() {
        let r = run_selftest(&SelftestConfig::corrupted());
        assert!(!r.passed);
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert!(failed.contains(&"congruence sweep (p <= 13, s = 1)"));
        assert!(failed.contains(&"series/sum term identities"));
        assert!(failed.contains(&"series limits (20 digits)"));
    }

    #[test]
    fn deterministic() {
        assert_eq!(run_selftest(&SelftestConfig::default()), run_selftest(&SelftestConfig::default()));
    }
}
