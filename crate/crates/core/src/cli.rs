//! Command-line front end: `check`, `series`, `selftest` and `dump`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::congruences::{run_sweep, CongruenceFamily, CongruenceOutcome, SweepSummary, Truncation};
use crate::residue::{ModulusSpec, Residue};
use crate::selftest::{run_selftest, SelftestConfig, SelftestReport};
use crate::sequences::{AperyStream, Companion, SecondOrderSpec};
use crate::series::{verify_limit, LimitReport, SeriesId, SeriesSpec};
use crate::sums::SumId;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "fibcong", version, about = "Fibonacci/Lucas/Apéry-weighted sums: supercongruences and 1/pi series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep congruence families over odd primes and exponents.
    Check(CheckArgs),
    /// Evaluate series and compare with their closed forms.
    Series(SeriesArgs),
    /// Run the built-in consistency suite.
    Selftest(SelftestArgs),
    /// Print terms of an integer sequence, exactly or modulo p^K.
    Dump(DumpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilySelector {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    All,
}

impl FamilySelector {
    fn sum(self) -> Option<SumId> {
        Some(match self {
            FamilySelector::S1 => SumId::S1,
            FamilySelector::S2 => SumId::S2,
            FamilySelector::S3 => SumId::S3,
            FamilySelector::S4 => SumId::S4,
            FamilySelector::S5 => SumId::S5,
            FamilySelector::S6 => SumId::S6,
            FamilySelector::All => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Full,
    Half,
    Both,
}

impl Mode {
    fn admits(self, t: Truncation) -> bool {
        matches!(
            (self, t),
            (Mode::Both, _) | (Mode::Full, Truncation::Full) | (Mode::Half, Truncation::Half)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Sums whose families to check.
    #[arg(required = true, value_enum)]
    pub selectors: Vec<FamilySelector>,
    /// Largest prime tested.
    #[arg(long, default_value_t = 50)]
    pub p_max: u64,
    /// Largest exponent s.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=8))]
    pub s_max: u32,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub jobs: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesSelector {
    E1,
    E2,
    E3,
    E4,
    E8,
    Ecz,
    All,
}

impl SeriesSelector {
    fn id(self) -> Option<SeriesId> {
        Some(match self {
            SeriesSelector::E1 => SeriesId::E1,
            SeriesSelector::E2 => SeriesId::E2,
            SeriesSelector::E3 => SeriesId::E3,
            SeriesSelector::E4 => SeriesId::E4,
            SeriesSelector::E8 => SeriesId::E8,
            SeriesSelector::Ecz => SeriesId::Ecz,
            SeriesSelector::All => return None,
        })
    }
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(required = true, value_enum)]
    pub selectors: Vec<SeriesSelector>,
    /// Decimal digits to certify.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(10..=10_000))]
    pub digits: u32,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub jobs: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run against a deliberately broken weight table.
    #[arg(long, hide = true)]
    pub corrupt_weights: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SequenceSelector {
    Fib,
    Lucas,
    F8,
    L8,
    F15,
    L15,
    U,
    V,
    Apery,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(value_enum)]
    pub sequence: SequenceSelector,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Reduce modulo `p^K`, e.g. `7^3`.
    #[arg(long = "mod")]
    pub modulus: Option<ModulusSpec>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One congruence case as reported in JSON and CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseRecord {
    pub family: String,
    pub p: u64,
    pub s: u32,
    pub truncation: u64,
    pub modulus: String,
    pub lhs: String,
    pub rhs: String,
    pub valuation_excess: u32,
    pub holds: bool,
    pub expected_exception: bool,
    pub symbol_zero: bool,
}

impl From<&CongruenceOutcome> for CaseRecord {
    fn from(o: &CongruenceOutcome) -> Self {
        CaseRecord {
            family: o.family.clone(),
            p: o.p,
            s: o.s,
            truncation: o.n_lhs,
            modulus: o.modulus_label(),
            lhs: o.lhs.rep().to_string(),
            rhs: o.rhs.rep().to_string(),
            valuation_excess: o.excess,
            holds: o.holds,
            expected_exception: o.expected_exception,
            symbol_zero: o.symbol_zero,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DumpRecord {
    pub n: u64,
    pub value: String,
}

/// Envelope around every JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest<O: Serialize, S: Serialize> {
    pub command: &'static str,
    pub parameters: serde_json::Value,
    pub tool_version: &'static str,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub outcomes: Vec<O>,
    pub summary: S,
}

impl<O: Serialize, S: Serialize> RunManifest<O, S> {
    fn new(command: &'static str, parameters: serde_json::Value, outcomes: Vec<O>, summary: S) -> Self {
        RunManifest {
            command,
            parameters,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outcomes,
            summary,
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Core(#[from] crate::error::Error),
    #[error("{0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Check(a) => cmd_check(&a),
        Command::Series(a) => cmd_series(&a),
        Command::Selftest(a) => cmd_selftest(&a),
        Command::Dump(a) => cmd_dump(&a),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Families picked by the selectors, in registry order, without duplicates.
pub fn select_families(selectors: &[FamilySelector], mode: Mode) -> Vec<CongruenceFamily> {
    CongruenceFamily::builtin()
        .into_iter()
        .filter(|f| mode.admits(f.truncation))
        .filter(|f| selectors.iter().any(|s| s.sum().is_none_or(|id| id == f.sum.id)))
        .collect()
}

fn cmd_check(a: &CheckArgs) -> Result<u8, CliError> {
    let families = select_families(&a.selectors, a.mode);
    let report = run_sweep(&families, a.p_max, a.s_max, a.jobs.map(|j| j as usize))?;
    let records: Vec<CaseRecord> = report.outcomes.iter().map(CaseRecord::from).collect();
    let text = match a.format {
        Format::Json => {
            let params = serde_json::json!({
                "families": families.iter().map(|f| f.id.clone()).collect::<Vec<_>>(),
                "p_max": a.p_max,
                "s_max": a.s_max,
                "mode": format!("{:?}", a.mode).to_lowercase(),
            });
            to_json(&RunManifest::new("check", params, records, &report.summary))?
        }
        Format::Csv => to_csv(&records)?,
        Format::Table => check_table(&report.outcomes, &report.summary),
    };
    emit(&a.out, &text)?;
    if a.out.is_some() {
        eprintln!("{}", summary_line(&report.summary));
    }
    Ok(if report.summary.verdict { EXIT_PASS } else { EXIT_FAIL })
}

fn summary_line(s: &SweepSummary) -> String {
    format!(
        "{} cases: {} hold, {} fail, {} expected exceptions, {} exceptions holding, {} anomalies at symbol-zero primes -> {}",
        s.total,
        s.holds,
        s.fails,
        s.expected_exceptions,
        s.unexpectedly_holding_exceptions,
        s.anomalies,
        if s.verdict { "PASS" } else { "FAIL" }
    )
}

fn check_table(outcomes: &[CongruenceOutcome], summary: &SweepSummary) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "{:<8} {:>5} {:>2} {:>8} {:>7} {:>6}  status", "family", "p", "s", "N", "modulus", "excess");
    for o in outcomes {
        let _ = writeln!(
            t,
            "{:<8} {:>5} {:>2} {:>8} {:>7} {:>6}  {}",
            o.family,
            o.p,
            o.s,
            o.n_lhs,
            o.modulus_label(),
            o.excess,
            o.status()
        );
    }
    let _ = writeln!(t, "{}", summary_line(summary));
    t
}

#[derive(Clone, Debug, Serialize)]
struct SeriesSummary {
    total: usize,
    passed: usize,
    verdict: bool,
}

fn cmd_series(a: &SeriesArgs) -> Result<u8, CliError> {
    let mut ids: Vec<SeriesId> = Vec::new();
    for s in &a.selectors {
        match s.id() {
            Some(id) => ids.push(id),
            None => ids.extend(SeriesId::ALL),
        }
    }
    ids.sort();
    ids.dedup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0) as usize)
        .build()?;
    let reports: Vec<LimitReport> = pool.install(|| {
        ids.par_iter()
            .map(|&id| verify_limit(&SeriesSpec::builtin(id), a.digits))
            .collect::<Result<_, _>>()
    })?;
    let summary = SeriesSummary {
        total: reports.len(),
        passed: reports.iter().filter(|r| r.pass).count(),
        verdict: reports.iter().all(|r| r.pass),
    };
    let text = match a.format {
        Format::Json => {
            let params = serde_json::json!({
                "series": ids.iter().map(|i| i.name()).collect::<Vec<_>>(),
                "digits": a.digits,
            });
            to_json(&RunManifest::new("series", params, reports, &summary))?
        }
        Format::Csv => to_csv(&reports)?,
        Format::Table => {
            let mut t = String::new();
            for r in &reports {
                let _ = writeln!(t, "{}{}", r.series, if r.conjectural { " (conjectural)" } else { "" });
                let _ = writeln!(t, "  value          {}", r.value);
                let _ = writeln!(t, "  claimed limit  {} = {}", r.claimed_limit, r.limit_value);
                let _ = writeln!(t, "  abs error      {}", r.abs_error);
                let _ = writeln!(t, "  digits matched {}", r.digits_matched);
                let _ = writeln!(t, "  terms used     {}", r.terms_used);
                let _ = writeln!(t, "  tail bound     {}", r.tail_bound);
                let _ = writeln!(t, "  {}", if r.pass { "PASS" } else { "FAIL" });
            }
            t
        }
    };
    emit(&a.out, &text)?;
    Ok(if summary.verdict { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_selftest(a: &SelftestArgs) -> Result<u8, CliError> {
    let cfg = if a.corrupt_weights {
        SelftestConfig::corrupted()
    } else {
        SelftestConfig::default()
    };
    let report: SelftestReport = run_selftest(&cfg);
    let text = match a.format {
        Format::Json => to_json(&RunManifest::new(
            "selftest",
            serde_json::json!({}),
            report.checks.clone(),
            serde_json::json!({ "passed": report.passed }),
        ))?,
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                check: &'a str,
                passed: bool,
                failures: usize,
            }
            let rows: Vec<Row> = report
                .checks
                .iter()
                .map(|c| Row {
                    check: c.name,
                    passed: c.passed,
                    failures: c.failures.len(),
                })
                .collect();
            to_csv(&rows)?
        }
        Format::Table => {
            let mut t = String::new();
            for c in &report.checks {
                let _ = writeln!(t, "{:<4} {}", if c.passed { "ok" } else { "FAIL" }, c.name);
                for f in c.failures.iter().take(10) {
                    let _ = writeln!(t, "       {f}");
                }
                if c.failures.len() > 10 {
                    let _ = writeln!(t, "       ... {} more", c.failures.len() - 10);
                }
            }
            let _ = writeln!(t, "{}", if report.passed { "selftest passed" } else { "selftest FAILED" });
            t
        }
    };
    emit(&a.out, &text)?;
    Ok(if report.passed { EXIT_PASS } else { EXIT_FAIL })
}

/// First `count` terms of a sequence as integers.
pub fn sequence_terms(seq: SequenceSelector, count: u64) -> Vec<BigInt> {
    let n = count as usize;
    let second = |s: SecondOrderSpec| s.integers().take(n).collect();
    match seq {
        SequenceSelector::Fib => second(SecondOrderSpec::new(0, 1, 1, 1)),
        SequenceSelector::Lucas => second(SecondOrderSpec::new(2, 1, 1, 1)),
        SequenceSelector::F8 => second(Companion::F8.spec()),
        SequenceSelector::L8 => second(Companion::L8.spec()),
        SequenceSelector::F15 => second(Companion::F15.spec()),
        SequenceSelector::L15 => second(Companion::L15.spec()),
        SequenceSelector::U => second(Companion::U.spec()),
        SequenceSelector::V => second(Companion::V.spec()),
        SequenceSelector::Apery => AperyStream::new().take(n).collect(),
    }
}

fn cmd_dump(a: &DumpArgs) -> Result<u8, CliError> {
    let records: Vec<DumpRecord> = sequence_terms(a.sequence, a.count)
        .iter()
        .enumerate()
        .map(|(n, x)| DumpRecord {
            n: n as u64,
            value: match &a.modulus {
                Some(m) => Residue::new(x, &m.0).to_string(),
                None => x.to_string(),
            },
        })
        .collect();
    let text = match a.format {
        Format::Json => {
            let params = serde_json::json!({
                "sequence": format!("{:?}", a.sequence).to_lowercase(),
                "count": a.count,
                "modulus": a.modulus.as_ref().map(|m| m.0.label()),
            });
            to_json(&RunManifest::new("dump", params, records, serde_json::json!({})))?
        }
        Format::Csv => to_csv(&records)?,
        Format::Table => records.iter().map(|r| format!("{}\n", r.value)).collect(),
    };
    emit(&a.out, &text)?;
    Ok(EXIT_PASS)
}
