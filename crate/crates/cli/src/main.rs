//! `padic-elim`: run verifications, audits, eliminations and predictions.
//!
//! Exit codes: 0 when every check passes, 1 when a verification or audit
//! fails, 2 for invalid input.

mod render;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use padic_elim::congruence::{
    make_params, master_terms, star_full, star_mod_p2, CongruenceError, Mode,
};
use padic_elim::eliminator::{
    irreducibility, predict, run_elimination, theorem_range, ElimError, KillTrace, Prediction,
    Status,
};
use padic_elim::exactnum::{format_rational, is_prime, parse_rational, residue, vp, Rational};
use padic_elim::lambda_solver::{lambda_closed, solve_lambda, verify_lambda, BulletOutcome};

use render::{list, Report, Table};
use verify::Lemma;

#[derive(Parser)]
#[command(name = "padic-elim", version, about = "Exact p-adic elimination engine")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Emit::Table, global = true)]
    emit: Emit,
    /// Worker threads (defaults to one per core).
    #[arg(long, env = "PADIC_ELIM_JOBS", global = true,
          value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Table,
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive check of one lemma over its default primes.
    Verify {
        lemma: Lemma,
        /// Check a single prime instead of the defaults.
        #[arg(long, conflicts_with = "p_range")]
        p: Option<u64>,
        /// Primes to check: "a..b" (inclusive) or "5,7,11".
        #[arg(long)]
        p_range: Option<String>,
    },
    /// Solve for the coefficient vector at (p, b, n) and check its properties.
    Lambda {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        n: u64,
    },
    /// Terms of the master congruence for (p, r, n) under a given v_p(L).
    Congruence {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        n: u64,
        /// Exact rational, e.g. "-9/2".
        #[arg(long = "vL", allow_hyphen_values = true)]
        vl: String,
        /// Allow equality in the bound on v_p(L).
        #[arg(long)]
        weak: bool,
    },
    /// Run the elimination and print the kill trace.
    Eliminate {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u64,
        /// Exact rational below -r/2; defaults to -(r+1)/2.
        #[arg(long = "vL", allow_hyphen_values = true)]
        vl: Option<String>,
    },
    /// Predicted reduction label for (p, r).
    Predict {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u64,
    },
    /// Predictions over every theorem-range r for a set of primes.
    Sweep {
        /// Primes: "a..b" (inclusive) or "5,7,11".
        #[arg(long)]
        p_range: String,
        /// Restrict r: "a..b" (inclusive) or a list.
        #[arg(long)]
        r_range: Option<String>,
    },
}

enum Failure {
    /// Exit 2.
    Invalid(String),
    /// Exit 1.
    Check(String),
}

impl From<ElimError> for Failure {
    fn from(e: ElimError) -> Self {
        match e {
            ElimError::Incomplete { .. } => Failure::Check(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<CongruenceError> for Failure {
    fn from(e: CongruenceError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn number(text: &str) -> Result<u64, Failure> {
    text.trim()
        .parse()
        .map_err(|_| invalid(format!("not a non-negative integer: {text:?}")))
}

/// `a..b`, `a..=b` (both inclusive) or a comma-separated list.
fn parse_range(text: &str) -> Result<Vec<u64>, Failure> {
    let mut out: Vec<u64> = match text.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (number(a)?..=number(b)?).collect()
        }
        None => text.split(',').map(number).collect::<Result<_, _>>()?,
    };
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn check_p(p: u64) -> Result<u64, Failure> {
    if p >= 5 && is_prime(p) {
        Ok(p)
    } else {
        Err(invalid(format!("p = {p} must be a prime >= 5")))
    }
}

/// Primes >= 5 named by a range; an explicit list must name only such primes.
fn parse_primes(text: &str) -> Result<Vec<u64>, Failure> {
    let ps = if text.contains("..") {
        parse_range(text)?
            .into_iter()
            .filter(|&p| p >= 5 && is_prime(p))
            .collect()
    } else {
        parse_range(text)?
            .into_iter()
            .map(check_p)
            .collect::<Result<Vec<_>, _>>()?
    };
    if ps.is_empty() {
        return Err(invalid(format!("no primes >= 5 in {text:?}")));
    }
    Ok(ps)
}

fn parse_vl(text: &str) -> Result<Rational, Failure> {
    parse_rational(text).map_err(|e| invalid(e.to_string()))
}

fn cmd_verify(lemma: Lemma, p: Option<u64>, p_range: Option<String>) -> Result<Report, Failure> {
    let primes = match (p, p_range) {
        (Some(p), _) => vec![check_p(p)?],
        (None, Some(text)) => parse_primes(&text)?,
        (None, None) => lemma.default_primes(),
    };
    let rows: Vec<verify::VerifyRow> = primes.par_iter().map(|&p| verify::run(lemma, p)).collect();
    let mut report = Report::new(json!({ "lemma": lemma.name(), "results": rows }));
    let mut table = Table::new(
        format!("verify {}", lemma.name()),
        vec!["p", "cases", "failures", "result"],
    );
    for row in &rows {
        let result = if row.failures.is_empty() { "pass" } else { "FAIL" };
        table.push(vec![
            row.p.to_string(),
            row.cases.to_string(),
            row.failures.len().to_string(),
            result.into(),
        ]);
        report
            .notes
            .extend(row.notes.iter().map(|n| format!("p = {}: {n}", row.p)));
        report
            .failures
            .extend(row.failures.iter().map(|f| format!("p = {}: {f}", row.p)));
    }
    report.tables.push(table);
    Ok(report)
}

fn outcome(o: BulletOutcome) -> String {
    match o {
        BulletOutcome::Pass => "pass".into(),
        BulletOutcome::Fail => "FAIL".into(),
        BulletOutcome::Observed(true) => "observed: holds".into(),
        BulletOutcome::Observed(false) => "observed: fails".into(),
    }
}

fn cmd_lambda(p: u64, b: u64, n: u64) -> Result<Report, Failure> {
    let v = solve_lambda(p, b, n).map_err(|e| invalid(e.to_string()))?;
    let bullets = verify_lambda(&v);
    let mut table = Table::new(
        format!("lambda vector for p = {p}, b = {b}, n = {n}"),
        vec!["i", "lambda_i", "closed form", "v_p", "mod p^2"],
    );
    let mut matches = true;
    for (i, l) in v.entries() {
        let closed = if i <= n {
            let c = lambda_closed(p, b, n, i).map_err(|e| invalid(e.to_string()))?;
            matches &= &c == l;
            format_rational(&c)
        } else {
            "-".into()
        };
        table.push(vec![
            i.to_string(),
            format_rational(l),
            closed,
            vp(l, p).map_or("inf".into(), |e| e.to_string()),
            residue(l, p * p).map_or("-".into(), |r| r.to_string()),
        ]);
    }
    let mut report = Report::new(json!({
        "vector": v,
        "matches_closed_form": matches,
        "bullets": bullets,
    }));
    let mut checks = Table::new("", vec!["property", "outcome"]);
    checks.push(vec!["matches closed form".into(), if matches { "pass" } else { "FAIL" }.into()]);
    checks.push(vec!["integral".into(), outcome(bullets.integral)]);
    checks.push(vec!["power sums vanish".into(), outcome(bullets.exact_vanishing)]);
    checks.push(vec!["class sums mod p^2".into(), outcome(bullets.class_sums)]);
    checks.push(vec!["multiples of p".into(), outcome(bullets.multiples_of_p)]);
    checks.push(vec!["non-multiples of p".into(), outcome(bullets.non_multiples)]);
    if let Some(w) = bullets.class_sum_witnesses.first() {
        report.notes.push(format!(
            "class sum a = {}, j = {} is {} mod {} ({} nonzero class sums)",
            w.a,
            w.j,
            w.residue_mod_p2,
            p * p,
            bullets.class_sum_witnesses.len()
        ));
    }
    if !matches {
        report.failures.push("solve differs from the closed form".into());
    }
    if !bullets.passed() {
        report.failures.push("a required property fails".into());
    }
    report.tables.push(table);
    report.tables.push(checks);
    Ok(report)
}

fn cmd_congruence(p: u64, r: u64, n: u64, vl: &str, weak: bool) -> Result<Report, Failure> {
    let mode = if weak { Mode::Weak } else { Mode::Strict };
    let q = make_params(p, r, n, parse_vl(vl)?, mode)?;
    let terms = master_terms(&q)?;
    let mut stars = Vec::new();
    let mut failures = Vec::new();
    for j in q.lowest_degree()..n {
        let full = star_full(&q, j)?;
        let short = star_mod_p2(&q, j)?;
        if residue(&full, p * p) != Some(short) {
            failures.push(format!("*_{j}: mod p^2 shortcut {short} disagrees with {}", format_rational(&full)));
        }
        stars.push((j, full, short));
    }

    let mut report = Report::new(json!({
        "params": q,
        "terms": terms,
        "star": stars.iter().map(|(j, full, short)| json!({
            "j": j, "value": format_rational(full), "mod_p2": short,
        })).collect::<Vec<_>>(),
    }));
    report.notes.push(format!(
        "p = {p}, r = {r}, n = {n}, b = {}, eps = {}, vL = {}, x = {}, v_fall = {} ({} bound)",
        q.b,
        q.eps,
        format_rational(&q.vl),
        format_rational(&q.x),
        q.v_fall,
        q.mode
    ));
    let mut tt = Table::new(
        "master congruence terms",
        vec!["line", "a", "j", "coefficient", "total val", "slack", "unit mod p^2"],
    );
    for t in &terms {
        tt.push(vec![
            format!("{:?}", t.line).to_lowercase(),
            t.a.to_string(),
            t.j.to_string(),
            format_rational(&t.coefficient),
            t.total_val.to_string(),
            t.slack.to_string(),
            t.unit_residue.map_or("-".into(), |u| u.to_string()),
        ]);
    }
    let mut st = Table::new("star coefficients", vec!["j", "*_j", "mod p^2"]);
    for (j, full, short) in &stars {
        st.push(vec![j.to_string(), format_rational(full), short.to_string()]);
    }
    report.tables.push(tt);
    report.tables.push(st);
    report.failures = failures;
    Ok(report)
}

#[derive(Serialize)]
struct TraceDocument<'a> {
    #[serde(flatten)]
    trace: &'a KillTrace,
    prediction: Option<&'a Prediction>,
}

fn trace_report(trace: &KillTrace, prediction: Option<&Prediction>) -> Report {
    let doc = TraceDocument { trace, prediction };
    let mut report = Report::new(serde_json::to_value(&doc).expect("trace serializes"));
    report.notes.push(format!(
        "p = {}, r = {}, c = {}, vL = {}",
        trace.p,
        trace.r,
        trace.c,
        format_rational(&trace.vl)
    ));
    let mut table = Table::new(
        "",
        vec!["i", "j", "status", "method", "witness n", "slack rows", "min slack"],
    );
    for s in &trace.subquotients {
        let min = s.slack_table.iter().map(|row| &row.slack).min();
        table.push(vec![
            s.i.to_string(),
            s.j.to_string(),
            format!("{:?}", s.status).to_lowercase(),
            s.method.clone(),
            list(&s.witness_n),
            s.slack_table.len().to_string(),
            min.map_or("-".into(), |m| m.to_string()),
        ]);
    }
    report.tables.push(table);
    if trace.duplicates.is_empty() {
        report.notes.push("duplicate kills: none".into());
    } else {
        let d: Vec<String> = trace
            .duplicates
            .iter()
            .map(|d| format!("i = {} also by {}", d.i, d.method))
            .collect();
        report.notes.push(format!("duplicate kills: {}", d.join("; ")));
    }
    match trace.survivor() {
        Some(i) => report.notes.push(format!("survivor: i = {i}")),
        None => report.failures.push("no unique survivor".into()),
    }
    if let Some(pred) = prediction {
        report.notes.push(format!(
            "prediction: ind ω₂^{} (r - 2c mod p - 1 = {}, avoiding 1 and p - 2)",
            pred.exponent, pred.irreducibility.residue
        ));
    }
    report
}

fn cmd_eliminate(p: u64, r: u64, vl: Option<String>) -> Result<Report, Failure> {
    let vl = vl.as_deref().map(parse_vl).transpose()?;
    let trace = run_elimination(p, r, vl)?;
    let prediction = match irreducibility(p, r) {
        Ok(irr) if trace.survivor() == Some(trace.c) => Some(Prediction {
            label: format!("ind omega2^{}", r + 1),
            exponent: r + 1,
            weight: r + 2,
            survivor: trace.c,
            irreducibility: irr,
        }),
        _ => None,
    };
    Ok(trace_report(&trace, prediction.as_ref()))
}

fn cmd_predict(p: u64, r: u64) -> Result<Report, Failure> {
    let red = predict(p, r)?;
    Ok(trace_report(&red.trace, Some(&red.prediction)))
}

#[derive(Serialize)]
struct SweepRow {
    p: u64,
    r: u64,
    c: u64,
    survivor: Option<u64>,
    exponent: Option<u64>,
    label: Option<String>,
    shallow: usize,
    good: usize,
    bad: usize,
    ugly: usize,
    trivial: usize,
    duplicates: usize,
    error: Option<String>,
}

fn sweep_row(p: u64, r: u64) -> SweepRow {
    let mut row = SweepRow {
        p,
        r,
        c: r / p,
        survivor: None,
        exponent: None,
        label: None,
        shallow: 0,
        good: 0,
        bad: 0,
        ugly: 0,
        trivial: 0,
        duplicates: 0,
        error: None,
    };
    match predict(p, r) {
        Ok(red) => {
            let count = |s: Status| red.trace.subquotients.iter().filter(|q| q.status == s).count();
            row.survivor = red.trace.survivor();
            row.exponent = Some(red.prediction.exponent);
            row.shallow = count(Status::Shallow);
            row.good = count(Status::Good);
            row.bad = count(Status::Bad);
            row.ugly = count(Status::Ugly);
            row.trivial = count(Status::Trivial);
            row.duplicates = red.trace.duplicates.len();
            row.label = Some(red.prediction.label);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn cmd_sweep(p_range: &str, r_range: Option<String>) -> Result<Report, Failure> {
    let primes = parse_primes(p_range)?;
    let r_filter = r_range.as_deref().map(parse_range).transpose()?;
    let work: Vec<(u64, u64)> = primes
        .iter()
        .flat_map(|&p| theorem_range(p).into_iter().map(move |r| (p, r)))
        .filter(|(_, r)| r_filter.as_ref().is_none_or(|f| f.contains(r)))
        .collect();
    if work.is_empty() {
        return Err(invalid("sweep range contains no theorem-range (p, r)"));
    }
    // Collecting an indexed parallel iterator keeps (p, r) order.
    let rows: Vec<SweepRow> = work.par_iter().map(|&(p, r)| sweep_row(p, r)).collect();
    let mut table = Table::new(
        "",
        vec![
            "p", "r", "c", "survivor", "exponent", "label", "shallow", "good", "bad", "ugly",
            "trivial", "duplicates",
        ],
    );
    let mut failures = Vec::new();
    for row in &rows {
        let opt = |v: Option<u64>| v.map_or("-".into(), |v| v.to_string());
        table.push(vec![
            row.p.to_string(),
            row.r.to_string(),
            row.c.to_string(),
            opt(row.survivor),
            opt(row.exponent),
            row.label.clone().unwrap_or_else(|| "-".into()),
            row.shallow.to_string(),
            row.good.to_string(),
            row.bad.to_string(),
            row.ugly.to_string(),
            row.trivial.to_string(),
            row.duplicates.to_string(),
        ]);
        if let Some(e) = &row.error {
            failures.push(format!("p = {}, r = {}: {e}", row.p, row.r));
        }
    }
    let mut report = Report::new(json!({ "rows": rows }));
    report.notes.push(format!("{} (p, r) pairs", rows.len()));
    report.tables.push(table);
    report.failures = failures;
    Ok(report)
}

fn print(report: &Report, emit: Emit) {
    match emit {
        Emit::Json => {
            println!("{}", serde_json::to_string_pretty(&report.json).expect("json"));
        }
        Emit::Tsv => {
            let parts: Vec<String> = report.tables.iter().map(Table::tsv).collect();
            print!("{}", parts.join("\n"));
        }
        Emit::Table => {
            for note in &report.notes {
                println!("{note}");
            }
            for t in &report.tables {
                println!();
                print!("{}", t.aligned());
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.into())
            .build_global();
    }
    let result = match cli.command {
        Command::Verify { lemma, p, p_range } => cmd_verify(lemma, p, p_range),
        Command::Lambda { p, b, n } => cmd_lambda(p, b, n),
        Command::Congruence { p, r, n, vl, weak } => cmd_congruence(p, r, n, &vl, weak),
        Command::Eliminate { p, r, vl } => cmd_eliminate(p, r, vl),
        Command::Predict { p, r } => cmd_predict(p, r),
        Command::Sweep { p_range, r_range } => cmd_sweep(&p_range, r_range),
    };
    match result {
        Ok(report) => {
            print(&report, cli.emit);
            for f in &report.failures {
                eprintln!("failure: {f}");
            }
            if report.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive() {
        assert!(matches!(parse_range("5..7"), Ok(v) if v == [5, 6, 7]));
        assert!(matches!(parse_range("5..=7"), Ok(v) if v == [5, 6, 7]));
        assert!(matches!(parse_range("7,5,7"), Ok(v) if v == [5, 7]));
        assert!(parse_range("x..7").is_err());
    }

    #[test]
    fn prime_ranges_filter_but_lists_reject() {
        assert!(matches!(parse_primes("2..13"), Ok(v) if v == [5, 7, 11, 13]));
        assert!(parse_primes("5,9").is_err());
        assert!(parse_primes("14..16").is_err());
    }
}
