//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fibcong::congruences::{run_cases, Case, CaseStatus, CongruenceFamily, CongruenceOutcome, SweepSummary, BASE_VALUES};
use fibcong::quadratic::check_structural_identities;
use fibcong::residue::odd_primes_up_to;
use fibcong::sequences::check_sequence_invariants;
use fibcong::series::{verify_limit, SeriesId, SeriesSpec};
use fibcong::sums::{check_oracle_equivalence, sum_exact, SumSpec, ORACLE_RINGS};
use fibcong::Rational;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn family(id: &str) -> CongruenceFamily {
    CongruenceFamily::find(id).expect("built-in family")
}

/// Cases with `p < bound` at a single exponent `s`.
fn cases<'a>(families: &'a [CongruenceFamily], below: u64, s: u32) -> Vec<Case<'a>> {
    let primes = odd_primes_up_to(below - 1);
    families
        .iter()
        .flat_map(|f| primes.iter().map(move |&p| Case { family: f, p, s }))
        .collect()
}

fn sweep(families: &[CongruenceFamily], bounds: &[(u64, u32)]) -> Vec<CongruenceOutcome> {
    let all: Vec<Case> = bounds.iter().flat_map(|&(below, s)| cases(families, below, s)).collect();
    run_cases(&all, None).expect("sweep runs")
}

fn all_hold(outcomes: &[CongruenceOutcome]) -> Verdict {
    let bad: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.holds)
        .map(|o| format!("{} p={} s={} excess {}/{}", o.family, o.p, o.s, o.excess, o.modulus_exponent))
        .collect();
    verdict(bad.is_empty(), format!("{} cases, {} fail {:?}", outcomes.len(), bad.len(), bad))
}

fn criterion_1() -> Verdict {
    let specs = SumSpec::all();
    let mut bad = Vec::new();
    for (id, want) in BASE_VALUES {
        let spec = specs.iter().find(|s| s.id == id).unwrap();
        let got = sum_exact(spec, 1).value;
        if got != Rational::from_integer(want.into()) {
            bad.push(format!("{id}(1) = {got}"));
        }
    }
    let want = [10, 2, 300, 672, 13, 32];
    let fixtures_ok = BASE_VALUES.iter().map(|&(_, v)| v).eq(want);
    verdict(bad.is_empty() && fixtures_ok, format!("S1..S6(1) = {want:?} {bad:?}"))
}

fn criterion_2() -> Verdict {
    all_hold(&sweep(&[family("F1-full"), family("F2-full")], &[(200, 1), (100, 2)]))
}

fn criterion_3() -> Verdict {
    all_hold(&sweep(&[family("F1-half"), family("F2-half")], &[(200, 1), (100, 2)]))
}

fn criterion_4() -> Verdict {
    let fams = ["F3-full", "F3-half", "F4-full", "F4-half"].map(family);
    let outcomes = sweep(&fams, &[(60, 1), (60, 2)]);
    let moduli_ok = outcomes.iter().all(|o| {
        let c = if o.family.ends_with("full") { 5 } else { 4 };
        o.modulus_exponent == c * o.s
    });
    let v = all_hold(&outcomes);
    verdict(v.pass && moduli_ok, v.detail)
}

fn criterion_5() -> Verdict {
    let fams = [family("F5-full"), family("F6-full")];
    let outcomes = sweep(&fams, &[(100, 1), (30, 2)]);
    let mut bad = Vec::new();
    let mut exceptions = 0;
    for o in &outcomes {
        let is_s6_3_1 = o.family == "F6-full" && o.p == 3 && o.s == 1;
        if is_s6_3_1 {
            exceptions += 1;
            if o.holds || !o.expected_exception || o.status() != CaseStatus::ExpectedException {
                bad.push(format!("S6(3^1) not reported as expected exception: {:?}", o.status()));
            }
        } else if !o.holds {
            bad.push(format!("{} p={} s={} fails", o.family, o.p, o.s));
        }
    }
    let summary = SweepSummary::of(&outcomes);
    verdict(
        bad.is_empty() && exceptions == 1 && summary.verdict,
        format!("{} cases, expected exceptions {}, verdict {} {bad:?}", outcomes.len(), summary.expected_exceptions, summary.verdict),
    )
}

fn criterion_6() -> Verdict {
    let failures = check_oracle_equivalence(&SumSpec::all(), 120, &ORACLE_RINGS);
    verdict(
        failures.is_empty(),
        format!("6 sums x N <= 120 x rings {ORACLE_RINGS:?}: {} mismatches", failures.len()),
    )
}

fn criterion_7() -> Verdict {
    let targets = [
        (SeriesId::E1, 50),
        (SeriesId::E2, 30),
        (SeriesId::E3, 30),
        (SeriesId::E4, 30),
        (SeriesId::E8, 50),
        (SeriesId::Ecz, 30),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (id, digits) in targets {
        match verify_limit(&SeriesSpec::builtin(id), digits) {
            Ok(r) => {
                pass &= r.pass && r.digits_matched >= digits;
                parts.push(format!("{id}@{digits}: {} digits, err {}", r.digits_matched, r.abs_error));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{id}: {e}"));
            }
        }
    }
    verdict(pass, parts.join("; "))
}

fn criterion_8() -> Verdict {
    let mut failures = check_structural_identities();
    failures.extend(check_sequence_invariants());
    verdict(failures.is_empty(), format!("{} failures {failures:?}", failures.len()))
}

fn run_check_json() -> Result<serde_json::Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fibcong"))
        .args(["check", "all", "--p-max", "50", "--s-max", "1", "--jobs", "8", "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!("exit {:?}", out.status.code()));
    }
    let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("not an object")?.remove("timestamp");
    Ok(v)
}

fn criterion_9() -> Verdict {
    match (run_check_json(), run_check_json()) {
        (Ok(a), Ok(b)) => {
            let n = a["outcomes"].as_array().map_or(0, |v| v.len());
            verdict(a == b && n > 0, format!("{n} records, payloads identical: {}", a == b))
        }
        (a, b) => verdict(false, format!("{:?} {:?}", a.err(), b.err())),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Verdict); 9] = [
        ("base values", Duration::from_secs(1), criterion_1),
        ("F1/F2 full sweep", Duration::from_secs(300), criterion_2),
        ("F1/F2 half sweep", Duration::from_secs(300), criterion_3),
        ("F3/F4 sweep", Duration::from_secs(600), criterion_4),
        ("F5/F6 sweep with S6(3^1) exception", Duration::from_secs(300), criterion_5),
        ("exact/modular oracle equivalence", Duration::from_secs(60), criterion_6),
        ("series limits", Duration::from_secs(120), criterion_7),
        ("structural identities", Duration::from_secs(30), criterion_8),
        ("CLI determinism", Duration::from_secs(300), criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let pass = v.pass && elapsed <= *budget;
        failed += usize::from(!pass);
        println!(
            "acceptance {}: {} {name} ({:.2?}, budget {:?}) {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed,
            budget,
            v.detail
        );
    }
    println!("acceptance: {}/9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
