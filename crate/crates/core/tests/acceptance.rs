//! Acceptance gate. Runs each criterion, prints one line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use padic_elim::combinat::{binom_mod_p2, stirling_lucas_check, LucasRoute};
use padic_elim::congruence::{
    admissible_n, inequality_suite, make_params, master_terms, star_full, star_mod_p2,
    star_table_residue, Mode,
};
use padic_elim::eliminator::{predict, theorem_range, Status};
use padic_elim::exactnum::{rat, rat_frac, residue, Rational};
use padic_elim::fp_poly::{pure_y_check, shallow_sweep};
use padic_elim::lambda_solver::{self, BulletOutcome};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main_theorem() -> Outcome {
    let primes = [5u64, 7, 11, 13, 17, 19, 23, 29, 31];
    let cases: Vec<(u64, u64)> = primes
        .iter()
        .flat_map(|&p| theorem_range(p).into_iter().map(move |r| (p, r)))
        .collect();
    cases.par_iter().try_for_each(|&(p, r)| {
        let red = predict(p, r).map_err(|e| format!("p={p} r={r}: {e}"))?;
        let c = r / p;
        ensure(red.prediction.label == format!("ind omega2^{}", r + 1), || {
            format!("p={p} r={r}: label {}", red.prediction.label)
        })?;
        ensure(red.prediction.exponent == r + 1, || format!("p={p} r={r}: exponent"))?;
        ensure(red.trace.survivor() == Some(c), || format!("p={p} r={r}: survivor"))?;
        ensure(red.trace.subquotients.len() as u64 == r + 1, || {
            format!("p={p} r={r}: trace length")
        })?;
        for s in &red.trace.subquotients {
            let expected_trivial = s.i > r / 2;
            let ok = match s.status {
                Status::Trivial => expected_trivial,
                Status::Survivor => s.i == c,
                Status::Shallow => s.i < c,
                Status::Good | Status::Bad | Status::Ugly => !expected_trivial && s.i > c,
            };
            ensure(ok, || format!("p={p} r={r}: index {} has status {:?}", s.i, s.status))?;
        }
        Ok::<(), String>(())
    })?;
    Ok(format!("{} (p, r) pairs predicted ind omega2^(r+1)", cases.len()))
}

fn lucas_p2() -> Outcome {
    let mut checked = 0usize;
    let mut via_lemma = 0usize;
    for p in [5u64, 7, 11] {
        let m = p * p;
        // Pascal's triangle mod p^2 as the oracle.
        let mut row: Vec<u64> = vec![1];
        for n in 0..m {
            for (k, &expected) in row.iter().enumerate() {
                let got = binom_mod_p2(n, k as u64, p).map_err(|e| e.to_string())?;
                ensure(got.residue == expected, || {
                    format!("C({n}, {k}) mod {m}: got {}, expected {expected}", got.residue)
                })?;
                checked += 1;
                via_lemma += usize::from(got.route == LucasRoute::Lemma);
            }
            let mut next = vec![1u64; row.len() + 1];
            for k in 1..row.len() {
                next[k] = (row[k - 1] + row[k]) % m;
            }
            row = next;
        }
    }
    Ok(format!("{checked} binomials ({via_lemma} via the digit formula)"))
}

fn stirling_lucas() -> Outcome {
    let mut checked = 0usize;
    for p in [5u64, 7] {
        for i in [1u32, 2] {
            for y in 0..=2 * p {
                for x in 0..=y + p.pow(i) {
                    let (lhs, rhs) = stirling_lucas_check(y, x, i, p).map_err(|e| e.to_string())?;
                    ensure(lhs == rhs, || format!("p={p} i={i} y={y} x={x}: {lhs} != {rhs}"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} congruences"))
}

fn lambda_lemma() -> Outcome {
    let mut cases = 0usize;
    let mut b0_deviations = 0usize;
    for p in [5u64, 7, 11, 13] {
        let sweep = lambda_solver::sweep(p).map_err(|e| e.to_string())?;
        for case in &sweep {
            let rep = &case.report;
            let tag = format!("p={p} b={} n={}", rep.b, rep.n);
            ensure(case.matches_closed_form, || format!("{tag}: closed form differs"))?;
            ensure(rep.passed(), || format!("{tag}: {rep:?}"))?;
            if rep.b >= 1 {
                ensure(rep.class_sums == BulletOutcome::Pass, || format!("{tag}: class sums"))?;
            } else if rep.class_sums == BulletOutcome::Observed(false) {
                b0_deviations += 1;
            }
            cases += 1;
        }
    }
    let v = lambda_solver::solve_lambda(5, 0, 3).map_err(|e| e.to_string())?;
    let rep = lambda_solver::verify_lambda(&v);
    ensure(v.interior[1] == rat(15), || format!("lambda_1 = {}", v.interior[1]))?;
    ensure(rep.class_sums == BulletOutcome::Observed(false), || "b = 0 clause".into())?;
    ensure(
        rep.class_sum_witnesses
            .iter()
            .any(|w| w.a == 1 && w.j == 0 && w.residue_mod_p2 == 15),
        || "missing witness lambda_1 = 15 mod 25".into(),
    )?;
    Ok(format!(
        "{cases} vectors; class-sum clause fails at b = 0 in {b0_deviations} cases (reported, e.g. p=5 n=3 lambda_1 = 15)"
    ))
}

fn star_consistency() -> Outcome {
    let q = make_params(5, 8, 7, rat(-5), Mode::Strict).map_err(|e| e.to_string())?;
    let s5 = star_full(&q, 5).map_err(|e| e.to_string())?;
    let s6 = star_full(&q, 6).map_err(|e| e.to_string())?;
    ensure(s5 == rat(608) && s6 == rat(610), || format!("*_5 = {s5}, *_6 = {s6}"))?;
    ensure(
        star_mod_p2(&q, 5) == Ok(8) && star_mod_p2(&q, 6) == Ok(10),
        || "worked residues mod 25".into(),
    )?;

    let mut checked = 0usize;
    for p in [5u64, 7] {
        for r in p..=p * p - p - 1 {
            for n in admissible_n(p, r) {
                let vl = rat_frac(r as i64, 2) - rat(n as i64) - rat(1);
                let q = make_params(p, r, n, vl, Mode::Strict).map_err(|e| e.to_string())?;
                for j in q.lowest_degree()..n {
                    let tag = format!("p={p} r={r} n={n} j={j}");
                    let full = star_full(&q, j).map_err(|e| e.to_string())?;
                    let short = star_mod_p2(&q, j).map_err(|e| e.to_string())?;
                    ensure(residue(&full, p * p) == Some(short), || format!("{tag}: mod p^2"))?;
                    for (m, expected) in star_table_residue(&q, j).map_err(|e| e.to_string())? {
                        ensure(residue(&full, m) == Some(expected), || {
                            format!("{tag}: case table mod {m}")
                        })?;
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} coefficients; *_5 = 608, *_6 = 610 at (5, 8, 7)"))
}

fn shallow_kills() -> Outcome {
    let mut checked = 0usize;
    for p in [5u64, 7, 11] {
        let reports = shallow_sweep(p).map_err(|e| e.to_string())?;
        for rep in &reports {
            ensure(rep.passed, || format!("p={p} r={} i={}", rep.r, rep.i))?;
        }
        checked += reports.len();
        let neg = pure_y_check(p, p - 1).map_err(|e| e.to_string())?;
        ensure(neg.failing_lambdas == vec![0], || {
            format!("p={p}: r = p - 1 failures {:?}", neg.failing_lambdas)
        })?;
    }
    Ok(format!("{checked} kills; r = p - 1 fails exactly at lambda = 0"))
}

fn inequality_suites() -> Outcome {
    let mut cases = Vec::new();
    for p in [5u64, 7, 11] {
        for r in p..=p * p - p - 1 {
            cases.extend(admissible_n(p, r).into_iter().map(|n| (p, r, n)));
        }
    }
    let shortcut_gaps: usize = cases
        .par_iter()
        .map(|&(p, r, n)| {
            let rep = inequality_suite(p, r, n).map_err(|e| e.to_string())?;
            let failed: Vec<_> = rep
                .families
                .iter()
                .filter(|f| !f.shortcut && !f.holds)
                .map(|f| f.name.clone())
                .collect();
            ensure(failed.is_empty(), || format!("p={p} r={r} n={n}: {failed:?}"))?;
            let gaps = rep.failed_shortcuts().count();
            ensure(gaps == 0 || (rep.b == 0 && n == p - 1), || {
                format!("p={p} r={r} n={n}: unexpected shortcut failure")
            })?;
            Ok(gaps)
        })
        .sum::<Result<usize, String>>()?;
    Ok(format!(
        "{} (p, r, n) triples; shortcut 2b+1 > n/(p-1) fails only at b = 0, n = p - 1 ({shortcut_gaps} cases)",
        cases.len()
    ))
}

fn vl_independence() -> Outcome {
    let mut checked = 0usize;
    for p in [5u64, 7] {
        for r in p..=p * p - p - 1 {
            for n in admissible_n(p, r) {
                let edge = rat_frac(r as i64, 2) - rat(n as i64);
                let choices: [Rational; 2] = [&edge - rat(1), &edge - rat_frac(7, 3)];
                let vals: Vec<Vec<_>> = choices
                    .iter()
                    .map(|vl| {
                        let q = make_params(p, r, n, vl.clone(), Mode::Strict)
                            .map_err(|e| e.to_string())?;
                        Ok(master_terms(&q)
                            .map_err(|e| e.to_string())?
                            .into_iter()
                            .map(|t| (t.a, t.j, t.total_val))
                            .collect())
                    })
                    .collect::<Result<_, String>>()?;
                ensure(vals[0] == vals[1], || format!("p={p} r={r} n={n}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (p, r, n) term lists"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("main theorem reproduction", main_theorem, 60),
        ("Lucas mod p^2", lucas_p2, 10),
        ("Stirling-Lucas", stirling_lucas, 10),
        ("lambda-vector lemma", lambda_lemma, 30),
        ("*_j consistency", star_consistency, 30),
        ("shallow kills", shallow_kills, 60),
        ("inequality suites", inequality_suites, 30),
        ("vL-independence", vl_independence, 10),
    ];
    let mut all = true;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let timing = if elapsed <= Duration::from_secs(*budget) {
            format!("{:.2}s", elapsed.as_secs_f64())
        } else {
            format!("{:.2}s, over the {budget}s budget", elapsed.as_secs_f64())
        };
        match outcome {
            Ok(summary) => println!("criterion {} PASS  {name}: {summary} [{timing}]", k + 1),
            Err(reason) => {
                all = false;
                println!("criterion {} FAIL  {name}: {reason} [{timing}]", k + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
