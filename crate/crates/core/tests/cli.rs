use std::process::{Command, Output};

use serde_json::Value;

fn fibcong(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibcong"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    fibcong(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(fibcong(args).stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = fibcong(args);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

const RECORD_KEYS: [&str; 11] = [
    "family",
    "p",
    "s",
    "truncation",
    "modulus",
    "lhs",
    "rhs",
    "valuation_excess",
    "holds",
    "expected_exception",
    "symbol_zero",
];

fn assert_record_schema(r: &Value) {
    let obj = r.as_object().expect("record object");
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    let mut want = RECORD_KEYS.to_vec();
    keys.sort_unstable();
    want.sort_unstable();
    assert_eq!(keys, want);
    assert!(obj["family"].is_string());
    for k in ["p", "s", "truncation", "valuation_excess"] {
        assert!(obj[k].is_u64(), "{k}");
    }
    for k in ["holds", "expected_exception", "symbol_zero"] {
        assert!(obj[k].is_boolean(), "{k}");
    }
    let modulus = obj["modulus"].as_str().unwrap();
    let (p, k) = modulus.split_once('^').expect("p^K");
    assert_eq!(p.parse::<u64>().unwrap(), obj["p"].as_u64().unwrap());
    assert!(k.parse::<u32>().unwrap() >= 1);
    for k in ["lhs", "rhs"] {
        let s = obj[k].as_str().unwrap();
        assert!(!s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()), "{k} = {s}");
    }
}

fn assert_manifest(v: &Value, command: &str) {
    assert_eq!(v["command"], command);
    assert!(v["parameters"].is_object());
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(v["timestamp"].is_u64());
    assert!(v["outcomes"].is_array());
    assert!(v.get("summary").is_some());
}

fn without_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn exit_code_matrix() {
    let cases: &[(&[&str], i32)] = &[
        (&["check", "s1", "--p-max", "50", "--s-max", "1", "--mode", "both"], 0),
        (&["check", "s6", "--p-max", "3", "--s-max", "1"], 0),
        (&["check", "bogus"], 2),
        (&["check"], 2),
        (&["check", "s1", "--mode", "sideways"], 2),
        (&["check", "s1", "--s-max", "0"], 2),
        (&["series", "e1", "--digits", "50"], 0),
        (&["series", "ecz", "--digits", "30"], 0),
        (&["series", "e1", "--digits", "9"], 2),
        (&["series", "e1", "--digits", "10001"], 2),
        (&["series", "e9"], 2),
        (&["selftest"], 0),
        (&["selftest", "--corrupt-weights"], 1),
        (&["dump", "f8", "--count", "3"], 0),
        (&["dump", "fib", "--mod", "6^2"], 2),
        (&["dump", "fib", "--mod", "seven"], 2),
        (&["dump", "fib", "--count", "0"], 2),
        (&["frobnicate"], 2),
    ];
    for (args, want) in cases {
        assert_eq!(code(args), *want, "{args:?}");
    }
}

#[test]
fn check_reports_follow_the_schema() {
    let v = json(&["check", "all", "--p-max", "13", "--s-max", "2", "--format", "json"]);
    assert_manifest(&v, "check");
    let records = v["outcomes"].as_array().unwrap();
    // 5 odd primes, 2 exponents, 10 families
    assert_eq!(records.len(), 100);
    records.iter().for_each(assert_record_schema);
    assert_eq!(v["summary"]["verdict"], true);
}

#[test]
fn s6_exception_record() {
    let v = json(&["check", "s6", "--p-max", "3", "--s-max", "1", "--format", "json"]);
    let records = v["outcomes"].as_array().unwrap();
    assert_eq!(records.len(), 1);
    let r = &records[0];
    assert_eq!(r["family"], "F6-full");
    assert_eq!(r["holds"], false);
    assert_eq!(r["expected_exception"], true);
    assert_eq!(r["modulus"], "3^3");
    assert_eq!(r["valuation_excess"], 2);
    assert_eq!(v["summary"]["expected_exceptions"], 1);
}

#[test]
fn csv_columns_mirror_json_keys() {
    let text = stdout(&["check", "s2", "--p-max", "7", "--mode", "half", "--format", "csv"]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), RECORD_KEYS.join(","));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("F2-half,3,1,2,3^3,21,21,3,true,false,false"));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("fibcong-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = fibcong(&["check", "s1", "--p-max", "11", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_manifest(&v, "check");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn dump_examples() {
    assert_eq!(stdout(&["dump", "f8", "--count", "3"]), "0\n21\n987\n");
    assert_eq!(stdout(&["dump", "apery", "--count", "3"]), "1\n5\n73\n");
    assert_eq!(stdout(&["dump", "v", "--count", "3"]), "1\n49\n4801\n");
    assert_eq!(stdout(&["dump", "u", "--count", "3", "--mod", "7^2"]), "0\n1\n0\n");
    let v = json(&["dump", "l15", "--count", "2", "--format", "json"]);
    assert_manifest(&v, "dump");
    assert_eq!(v["outcomes"][1]["value"], "1364");
}

#[test]
fn series_reports() {
    let v = json(&["series", "e1", "e8", "--digits", "50", "--format", "json"]);
    assert_manifest(&v, "series");
    let rows = v["outcomes"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r["pass"], true);
        assert!(r["digits_matched"].as_u64().unwrap() >= 50);
        for k in ["value", "claimed_limit", "abs_error", "tail_bound"] {
            assert!(r[k].is_string(), "{k}");
        }
    }
    assert_eq!(rows[1]["conjectural"], true);
    assert!(rows[0]["value"].as_str().unwrap().starts_with("10.185916357881"));

    let table = stdout(&["series", "e2", "--digits", "30"]);
    for label in ["value", "claimed limit", "abs error", "digits matched", "terms used", "tail bound", "PASS"] {
        assert!(table.contains(label), "{label}");
    }
}

#[test]
fn e8_at_two_hundred_digits() {
    let v = json(&["series", "e8", "--digits", "200", "--format", "json"]);
    assert_eq!(v["outcomes"][0]["pass"], true);
}

#[test]
fn selftest_reports() {
    let a = json(&["selftest", "--format", "json"]);
    assert_manifest(&a, "selftest");
    assert_eq!(a["summary"]["passed"], true);
    let b = json(&["selftest", "--format", "json"]);
    assert_eq!(without_timestamp(a), without_timestamp(b));

    let bad = json(&["selftest", "--corrupt-weights", "--format", "json"]);
    assert_eq!(bad["summary"]["passed"], false);
}

#[test]
fn worker_count_does_not_change_payload() {
    let args = |jobs| {
        without_timestamp(json(&["check", "all", "--p-max", "31", "--s-max", "2", "--jobs", jobs, "--format", "json"]))
    };
    assert_eq!(args("1"), args("3"));
}
