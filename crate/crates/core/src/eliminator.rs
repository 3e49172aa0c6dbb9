//! The full elimination over sub-quotients `F_{2i, 2i+1}`, `0 <= i <= r`, and
//! the resulting reduction label.
//!
//! Sub-quotient `i` is generated by `z^(r - i)` on `pZ_p`. Indices above
//! `⌊r/2⌋` vanish outright, indices below `c = ⌊r/p⌋` fall to the polynomial
//! argument, and the rest are killed by congruence audits. Index `c` is the
//! survivor, certified by exhaustion.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::{
    admissible_n, audit_bad, audit_good, audit_ugly, v_falling, CongruenceError, KillAudit,
    KillMethod,
};
use crate::exactnum::{check_prime, format_rational, rat_frac, NumError, Rational, ValP};
use crate::fp_poly::{shallow_kill_check, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElimError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("v_p(L) = {0} must be below -r/2")]
    VlBound(String),
    #[error("elimination incomplete at index {index}: {reason}")]
    Incomplete { index: u64, reason: String },
    #[error("prediction unavailable: {0}")]
    PredictionUnavailable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Trivial,
    Shallow,
    Good,
    Bad,
    Ugly,
    Survivor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackRow {
    pub n: u64,
    pub a: u64,
    pub j: u64,
    pub slack: ValP,
    pub disposition: crate::congruence::Disposition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subquotient {
    pub i: u64,
    pub j: u64,
    pub status: Status,
    pub method: String,
    pub witness_n: Vec<u64>,
    pub slack_table: Vec<SlackRow>,
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateKill {
    pub i: u64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillTrace {
    pub p: u64,
    pub r: u64,
    pub c: u64,
    #[serde(rename = "vL", with = "crate::exactnum::rational_text")]
    pub vl: Rational,
    pub subquotients: Vec<Subquotient>,
    pub duplicates: Vec<DuplicateKill>,
}

impl KillTrace {
    pub fn survivor(&self) -> Option<u64> {
        let mut it = self
            .subquotients
            .iter()
            .filter(|s| s.status == Status::Survivor);
        let first = it.next()?;
        it.next().is_none().then_some(first.i)
    }

    pub fn status(&self, i: u64) -> Option<Status> {
        self.subquotients.get(i as usize).map(|s| s.status)
    }
}

/// One row `d` of the degrees `n - b - 1` coming from `v_p([n]_{b+1}) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub d: u64,
    pub degrees: Vec<u64>,
    /// Degrees also reachable from some `n` with `v_p([n]_{b+1}) = 0`.
    pub flagged: Vec<u64>,
}

pub fn bad_candidate_table(p: u64, c: u64) -> Result<Vec<CandidateRow>, ElimError> {
    check_prime(p)?;
    if c == 0 || c + 3 > p {
        return Err(ElimError::InvalidRange(format!(
            "need 1 <= c <= p - 3, got p = {p}, c = {c}"
        )));
    }
    Ok((1..=c)
        .rev()
        .map(|d| CandidateRow {
            d,
            degrees: (d * p - d - 1..=d * p - 1).collect(),
            flagged: vec![d * p - d - 1],
        })
        .collect())
}

/// Accepted elimination ranges: `c = 1` with `p + 3 <= r <= 2p - 1`, `c = 2` with `2p + 4 <= r <= 3p - 1`.
fn check_window(p: u64, r: u64) -> Result<u64, ElimError> {
    check_prime(p)?;
    if p < 5 {
        return Err(ElimError::InvalidRange(format!("need p >= 5, got {p}")));
    }
    let ok = (p + 3..=2 * p - 1).contains(&r) || (2 * p + 4..=3 * p - 1).contains(&r);
    if !ok {
        return Err(ElimError::InvalidRange(format!(
            "r = {r} is outside [p+3, 2p-1] and [2p+4, 3p-1] for p = {p}"
        )));
    }
    Ok(r / p)
}

/// `-(r+1)/2`.
pub fn default_vl(r: u64) -> Rational {
    rat_frac(-(r as i64) - 1, 2)
}

fn audit_entry(audit: &KillAudit) -> Subquotient {
    let (status, witness_n) = match audit.method {
        KillMethod::Good { n } => (Status::Good, vec![n]),
        KillMethod::Bad { n } => (Status::Bad, vec![n]),
        KillMethod::Ugly { n, n_prime } => (Status::Ugly, vec![n, n_prime]),
    };
    let slack_table = audit
        .phases
        .iter()
        .flat_map(|ph| {
            ph.entries.iter().map(move |e| SlackRow {
                n: ph.n,
                a: e.a,
                j: e.j,
                slack: e.slack.clone(),
                disposition: e.disposition,
            })
        })
        .collect();
    let evidence = audit
        .witnesses
        .iter()
        .map(|w| format!("{} [{}]", w.claim, w.value))
        .collect();
    Subquotient {
        i: audit.target_index,
        j: audit.target_degree,
        status,
        method: audit.method.to_string(),
        witness_n,
        slack_table,
        evidence,
    }
}

enum Job {
    Good(u64),
    Bad,
    Ugly(u64),
}

pub fn run_elimination(p: u64, r: u64, vl: Option<Rational>) -> Result<KillTrace, ElimError> {
    let c = check_window(p, r)?;
    let vl = vl.unwrap_or_else(|| default_vl(r));
    if vl >= -rat_frac(r as i64, 2) {
        return Err(ElimError::VlBound(format_rational(&vl)));
    }
    let half = r / 2;
    let ceil_half = r.div_ceil(2);

    let mut kills: BTreeMap<u64, Vec<Subquotient>> = BTreeMap::new();

    for i in 0..c {
        let rep = shallow_kill_check(p, r, i + 1)?;
        if !rep.passed {
            return Err(ElimError::Incomplete {
                index: i,
                reason: "shallow kill check failed".into(),
            });
        }
        let mut evidence = vec![
            format!("f_{} has coefficient {} at X^{}", i + 1, rep.generator_coefficient, i),
            format!("summands have X-degree >= {}", rep.summand_min_x_degree),
        ];
        if let Some(py) = &rep.pure_y {
            evidence.push(format!(
                "pure Y^r coefficient cancels for all lambda: {}",
                py.failing_lambdas.is_empty()
            ));
        }
        kills.entry(i).or_default().push(Subquotient {
            i,
            j: r - i,
            status: Status::Shallow,
            method: "shallow".into(),
            witness_n: Vec::new(),
            slack_table: Vec::new(),
            evidence,
        });
    }

    let mut jobs: Vec<Job> = admissible_n(p, r)
        .into_iter()
        .filter(|&n| v_falling(n, n / p + 1, p) == Ok(0))
        .map(Job::Good)
        .collect();
    if c == 2 {
        jobs.push(Job::Bad);
    }
    // At r = 2p - 1 the ugly target cp - 1 lies below range and is already trivial.
    if c * p > ceil_half {
        jobs.push(Job::Ugly(c));
    }
    let audits: Vec<KillAudit> = jobs
        .par_iter()
        .map(|job| match job {
            Job::Good(n) => audit_good(p, r, *n, vl.clone()),
            Job::Bad => audit_bad(p, r, vl.clone()),
            Job::Ugly(c) => audit_ugly(p, r, vl.clone(), *c),
        })
        .collect::<Result<_, _>>()?;
    for audit in &audits {
        if !audit.passed {
            return Err(ElimError::Incomplete {
                index: audit.target_index,
                reason: format!("{} audit failed", audit.method),
            });
        }
        kills
            .entry(audit.target_index)
            .or_default()
            .push(audit_entry(audit));
    }

    let mut subquotients = Vec::with_capacity(r as usize + 1);
    let mut duplicates = Vec::new();
    for i in 0..=r {
        let j = r - i;
        if i > half {
            subquotients.push(Subquotient {
                i,
                j,
                status: Status::Trivial,
                method: "trivial".into(),
                witness_n: Vec::new(),
                slack_table: Vec::new(),
                evidence: vec![format!("j = {j} < ceil(r/2) = {ceil_half}")],
            });
            continue;
        }
        let found = kills.remove(&i).unwrap_or_default();
        if i == c {
            if let Some(k) = found.first() {
                return Err(ElimError::Incomplete {
                    index: i,
                    reason: format!("expected survivor was killed by {}", k.method),
                });
            }
            subquotients.push(Subquotient {
                i,
                j,
                status: Status::Survivor,
                method: "survivor".into(),
                witness_n: Vec::new(),
                slack_table: Vec::new(),
                evidence: vec!["every other index carries a passing kill".into()],
            });
            continue;
        }
        let mut found = found.into_iter();
        let Some(first) = found.next() else {
            return Err(ElimError::Incomplete {
                index: i,
                reason: "no method kills this sub-quotient".into(),
            });
        };
        duplicates.extend(found.map(|k| DuplicateKill { i, method: k.method }));
        subquotients.push(first);
    }
    if let Some((&i, _)) = kills.iter().next() {
        return Err(ElimError::Incomplete {
            index: i,
            reason: "kill recorded outside [0, r]".into(),
        });
    }
    Ok(KillTrace {
        p,
        r,
        c,
        vl,
        subquotients,
        duplicates,
    })
}

/// `(residue, "p-2")`-style pair listing the forbidden residues `1` and `p - 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Irreducibility {
    /// `(r - 2c) mod (p - 1)`.
    pub residue: u64,
    pub excluded: (u64, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    pub exponent: u64,
    pub weight: u64,
    pub survivor: u64,
    pub irreducibility: Irreducibility,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub trace: KillTrace,
    pub prediction: Prediction,
}

/// Checks `r - 2c` avoids `1` and `p - 2` mod `p - 1`.
pub fn irreducibility(p: u64, r: u64) -> Result<Irreducibility, ElimError> {
    let c = check_window(p, r)?;
    let residue = (r - 2 * c) % (p - 1);
    if residue == 1 || residue == p - 2 {
        let why = if r == 2 * p - 1 {
            "r = 2p-1".to_string()
        } else {
            format!("r - 2c = {} is {residue} mod p - 1", r - 2 * c)
        };
        return Err(ElimError::PredictionUnavailable(why));
    }
    Ok(Irreducibility {
        residue,
        excluded: (1, "p-2".into()),
    })
}

pub fn predict(p: u64, r: u64) -> Result<Reduction, ElimError> {
    let irreducibility = irreducibility(p, r)?;
    let trace = run_elimination(p, r, None)?;
    let c = r / p;
    if trace.survivor() != Some(c) {
        return Err(ElimError::Incomplete {
            index: c,
            reason: "survivor is not c".into(),
        });
    }
    let prediction = Prediction {
        label: format!("ind omega2^{}", r + 1),
        exponent: r + 1,
        weight: r + 2,
        survivor: c,
        irreducibility,
    };
    Ok(Reduction { trace, prediction })
}

/// Theorem range: `[p+3, 2p-2] ∪ [2p+4, 3p-1]`.
pub fn theorem_range(p: u64) -> Vec<u64> {
    (p + 3..=2 * p - 2).chain(2 * p + 4..=3 * p - 1).collect()
}
