//! Kill audits: classify every congruence term relative to a target degree.
//!
//! Disposition rules, in order:
//!
//! - `j < ⌈r/2⌉`: below range, needs `slack >= 0`;
//! - the `a = 0` term at the generator degree needs `slack = 0` and a unit residue;
//! - terms at the residual degree need `slack >= 0`;
//! - terms at or above the target degree must be dead (`slack > 0`);
//! - deeper terms must be integral (`slack >= 0`).

use serde::{Deserialize, Serialize};

use super::star::star_full;
use super::terms::{master_terms, CongruenceTerm, Line};
use super::{make_params, CongruenceError, CongruenceParams, Mode};
use crate::combinat::stirling_lucas_check;
use crate::exactnum::{binom, factorial, mod_u64, residue, vp_int, Rational, ValP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Disposition {
    Dead,
    DeeperIntegral,
    BelowRange,
    Generator,
    Residual,
    Violation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRule {
    pub target_degree: u64,
    pub generator_degree: u64,
    pub residual_degree: Option<u64>,
    pub ceil_half: u64,
}

pub fn classify(term: &CongruenceTerm, rule: &AuditRule, p: u64) -> Disposition {
    let zero = ValP::int(0);
    let ok = |cond: bool, d: Disposition| if cond { d } else { Disposition::Violation };
    if term.j < rule.ceil_half {
        return ok(term.slack >= zero, Disposition::BelowRange);
    }
    if term.a == 0 && term.j == rule.generator_degree {
        let unit = term.unit_residue.is_some_and(|u| u % p != 0);
        return ok(term.slack == zero && unit, Disposition::Generator);
    }
    if Some(term.j) == rule.residual_degree {
        return ok(term.slack >= zero, Disposition::Residual);
    }
    if term.j >= rule.target_degree {
        return ok(term.slack > zero, Disposition::Dead);
    }
    if term.slack > zero {
        Disposition::Dead
    } else {
        ok(term.slack == zero, Disposition::DeeperIntegral)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDisposition {
    pub line: Line,
    pub a: u64,
    pub j: u64,
    pub slack: ValP,
    pub disposition: Disposition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditPhase {
    pub n: u64,
    pub b: u64,
    pub v_fall: u64,
    pub rule: AuditRule,
    pub entries: Vec<TermDisposition>,
    pub generator: Option<CongruenceTerm>,
    pub passed: bool,
}

impl AuditPhase {
    fn run(q: &CongruenceParams, rule: AuditRule) -> Result<Self, CongruenceError> {
        let terms = master_terms(q)?;
        let entries: Vec<TermDisposition> = terms
            .iter()
            .map(|t| TermDisposition {
                line: t.line,
                a: t.a,
                j: t.j,
                slack: t.slack.clone(),
                disposition: classify(t, &rule, q.p),
            })
            .collect();
        let generator = terms
            .iter()
            .zip(&entries)
            .find(|(_, e)| e.disposition == Disposition::Generator)
            .map(|(t, _)| t.clone());
        let passed = generator.is_some()
            && entries.iter().all(|e| e.disposition != Disposition::Violation);
        Ok(AuditPhase {
            n: q.n,
            b: q.b,
            v_fall: q.v_fall,
            rule,
            entries,
            generator,
            passed,
        })
    }

    pub fn violations(&self) -> impl Iterator<Item = &TermDisposition> {
        self.entries
            .iter()
            .filter(|e| e.disposition == Disposition::Violation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub claim: String,
    pub value: String,
    pub holds: bool,
}

impl Witness {
    fn new(claim: impl Into<String>, value: impl ToString, holds: bool) -> Self {
        Witness {
            claim: claim.into(),
            value: value.to_string(),
            holds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KillMethod {
    Good { n: u64 },
    Bad { n: u64 },
    Ugly { n: u64, n_prime: u64 },
}

impl std::fmt::Display for KillMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KillMethod::Good { n } => write!(f, "good({n})"),
            KillMethod::Bad { n } => write!(f, "bad({n})"),
            KillMethod::Ugly { n, n_prime } => write!(f, "ugly({n},{n_prime})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillAudit {
    pub p: u64,
    pub r: u64,
    #[serde(with = "crate::exactnum::rational_text")]
    pub vl: Rational,
    pub method: KillMethod,
    pub target_degree: u64,
    /// `r - target_degree`: the audit kills `F_{2i, 2i+1}` for this `i`.
    pub target_index: u64,
    pub phases: Vec<AuditPhase>,
    pub witnesses: Vec<Witness>,
    pub passed: bool,
}

impl KillAudit {
    fn assemble(
        q: &CongruenceParams,
        method: KillMethod,
        target_degree: u64,
        phases: Vec<AuditPhase>,
        witnesses: Vec<Witness>,
    ) -> Self {
        let passed = phases.iter().all(|ph| ph.passed) && witnesses.iter().all(|w| w.holds);
        KillAudit {
            p: q.p,
            r: q.r,
            vl: q.vl.clone(),
            method,
            target_degree,
            target_index: q.r - target_degree,
            phases,
            witnesses,
            passed,
        }
    }
}

fn star_mod_p(q: &CongruenceParams, j: u64) -> Result<u64, CongruenceError> {
    Ok(residue(&star_full(q, j)?, q.p).expect("p-integral"))
}

fn neg_factorial_mod_p(m: u64, p: u64) -> u64 {
    (p - mod_u64(&factorial(m), p)) % p
}

/// `v_p` of an integer, `i64::MAX` standing in for `v_p(0)`.
fn vp_or_inf(n: &num_bigint::BigInt, p: u64) -> i64 {
    vp_int(n, p).unwrap_or(i64::MAX)
}

/// Kills `F_{2i, 2i+1}` with `i = r - (n - b - 1)` when `v_p([n]_{b+1}) = 0`.
pub fn audit_good(p: u64, r: u64, n: u64, vl: Rational) -> Result<KillAudit, CongruenceError> {
    let q = make_params(p, r, n, vl, Mode::Strict)?;
    if q.v_fall != 0 {
        return Err(CongruenceError::NotGoodCandidate {
            n,
            v_fall: q.v_fall,
        });
    }
    let target = n - q.b - 1;
    let rule = AuditRule {
        target_degree: target,
        generator_degree: target,
        residual_degree: None,
        ceil_half: q.ceil_half(),
    };
    let phase = AuditPhase::run(&q, rule)?;
    let translated_dead = phase
        .entries
        .iter()
        .filter(|e| e.line == Line::Translated)
        .all(|e| e.slack >= ValP::int(1));
    let c = binom(n, target as i64);
    let star = star_mod_p(&q, target)?;
    let expected = neg_factorial_mod_p(q.b + 1, p);
    let witnesses = vec![
        Witness::new(
            "every translated term has slack >= 1",
            translated_dead,
            translated_dead,
        ),
        Witness::new(
            format!("p does not divide C({n}, {target})"),
            mod_u64(&c, p),
            mod_u64(&c, p) != 0,
        ),
        Witness::new(
            format!("*_{target} = -(b+1)! mod p"),
            star,
            star == expected,
        ),
    ];
    Ok(KillAudit::assemble(
        &q,
        KillMethod::Good { n },
        target,
        vec![phase],
        witnesses,
    ))
}

/// Kills `F_{2i, 2i+1}` with `i = r - 2p + 2` using `n = 2p + 1`.
pub fn audit_bad(p: u64, r: u64, vl: Rational) -> Result<KillAudit, CongruenceError> {
    if r < 2 * p + 4 || r + 1 > 3 * p {
        return Err(CongruenceError::InvalidRange(format!(
            "need 2p + 4 <= r <= 3p - 1, got p = {p}, r = {r}"
        )));
    }
    let n = 2 * p + 1;
    let q = make_params(p, r, n, vl, Mode::Strict)?;
    let target = 2 * p - 2;
    let rule = AuditRule {
        target_degree: target,
        generator_degree: target,
        residual_degree: None,
        ceil_half: q.ceil_half(),
    };
    let phase = AuditPhase::run(&q, rule)?;
    let v3 = vp_or_inf(&binom(n, 3), p);
    let mut witnesses = vec![
        Witness::new("v_p([n]_(b+1)) = 1", q.v_fall, q.v_fall == 1),
        Witness::new(format!("v_p(C({n}, 3)) = 1"), v3, v3 == 1),
        Witness::new(
            format!("*_{target} = -(b+1)! mod p"),
            star_mod_p(&q, target)?,
            star_mod_p(&q, target)? == neg_factorial_mod_p(q.b + 1, p),
        ),
    ];
    if r == 2 * p + 4 {
        // Degree p + 1 sits just below range; its Stirling factor vanishes mod p.
        for s in [q.b + 1, q.b] {
            let (lhs, rhs) = stirling_lucas_check(0, s, 1, p)?;
            witnesses.push(Witness::new(
                format!("{{p brace {s}}} = {{1 brace {s}}} = 0 mod p"),
                lhs,
                lhs == 0 && lhs == rhs,
            ));
        }
    }
    Ok(KillAudit::assemble(
        &q,
        KillMethod::Bad { n },
        target,
        vec![phase],
        witnesses,
    ))
}

/// Kills `F_{2i, 2i+1}` with `i = r - cp + 1` in two phases, `n = cp + c` then `n + 1`.
///
/// The second phase shows `p^(r/2 - cp) z^cp` on `pZ_p` reduces to deeper terms.
/// Residual terms on `a + pZ_p` with `a != 0` are translates of it and reduce the same way.
pub fn audit_ugly(p: u64, r: u64, vl: Rational, c: u64) -> Result<KillAudit, CongruenceError> {
    if !(1..=2).contains(&c) {
        return Err(CongruenceError::InvalidRange(format!(
            "need c in {{1, 2}}, got {c}"
        )));
    }
    if r < c * p + c + 2 || r + 1 > (c + 1) * p {
        return Err(CongruenceError::InvalidRange(format!(
            "need cp + c + 2 <= r <= (c+1)p - 1, got p = {p}, r = {r}, c = {c}"
        )));
    }
    let n = c * p + c;
    let n_prime = n + 1;
    let q2 = make_params(p, r, n_prime, vl.clone(), Mode::Strict)?;
    let q1 = make_params(p, r, n, vl, Mode::Strict)?;
    let target = c * p - 1;
    let residual = c * p;

    let first = AuditPhase::run(
        &q1,
        AuditRule {
            target_degree: target,
            generator_degree: target,
            residual_degree: Some(residual),
            ceil_half: q1.ceil_half(),
        },
    )?;
    let second = AuditPhase::run(
        &q2,
        AuditRule {
            target_degree: target,
            generator_degree: residual,
            residual_degree: None,
            ceil_half: q2.ceil_half(),
        },
    )?;
    let v_gen = vp_or_inf(&binom(n, target as i64), p);
    let deeper = mod_u64(&binom(n_prime, target as i64), p);
    let witnesses = vec![
        Witness::new(
            format!("v_p([{n}]_(b+1)) = 1"),
            q1.v_fall,
            q1.v_fall == 1,
        ),
        Witness::new(
            format!("v_p([{n_prime}]_(b+1)) = 0"),
            q2.v_fall,
            q2.v_fall == 0,
        ),
        Witness::new(format!("v_p(C({n}, {target})) = 1"), v_gen, v_gen == 1),
        Witness::new(
            format!("p divides C({n_prime}, {target})"),
            deeper,
            deeper == 0,
        ),
        Witness::new(
            format!("*_{target} = -(b+1)! mod p"),
            star_mod_p(&q1, target)?,
            star_mod_p(&q1, target)? == neg_factorial_mod_p(q1.b + 1, p),
        ),
    ];
    Ok(KillAudit::assemble(
        &q1,
        KillMethod::Ugly { n, n_prime },
        target,
        vec![first, second],
        witnesses,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn good_examples() {
        let a = audit_good(5, 8, 7, rat(-5)).unwrap();
        assert!(a.passed, "{a:#?}");
        assert_eq!((a.target_degree, a.target_index), (5, 3));
        let gen = a.phases[0].generator.as_ref().unwrap();
        assert_eq!((gen.a, gen.j), (0, 5));

        let a = audit_good(5, 8, 8, rat(-5)).unwrap();
        assert!(a.passed);
        assert_eq!(a.target_index, 2);

        assert!(matches!(
            audit_good(5, 8, 6, rat(-5)),
            Err(CongruenceError::NotGoodCandidate { n: 6, v_fall: 1 })
        ));
    }

    #[test]
    fn bad_examples() {
        let a = audit_bad(5, 14, rat(-8)).unwrap();
        assert!(a.passed, "{a:#?}");
        assert_eq!((a.target_degree, a.target_index), (8, 6));
        assert_eq!(a.method, KillMethod::Bad { n: 11 });
        let below = a.phases[0]
            .entries
            .iter()
            .find(|e| e.a == 0 && e.j == 6)
            .unwrap();
        assert_eq!(below.disposition, Disposition::BelowRange);
        assert!(a.witnesses.iter().any(|w| w.claim.contains("brace 3")));

        assert!(matches!(
            audit_bad(5, 9, rat(-8)),
            Err(CongruenceError::InvalidRange(_))
        ));
    }

    #[test]
    fn ugly_examples() {
        let a = audit_ugly(5, 8, rat(-5), 1).unwrap();
        assert!(a.passed, "{a:#?}");
        assert_eq!((a.target_degree, a.target_index), (4, 4));
        assert_eq!(a.method, KillMethod::Ugly { n: 6, n_prime: 7 });

        let a = audit_ugly(5, 14, rat(-8), 2).unwrap();
        assert!(a.passed, "{a:#?}");
        assert_eq!((a.target_degree, a.target_index), (9, 5));
        assert_eq!(a.phases[1].n, 13);

        assert!(matches!(
            audit_ugly(5, 8, rat(-2), 1),
            Err(CongruenceError::VlBound { .. })
        ));
        assert!(audit_ugly(5, 8, rat(-5), 3).is_err());
    }

    #[test]
    fn generator_slack_is_exactly_zero() {
        for a in [
            audit_good(7, 10, 9, rat(-6)).unwrap(),
            audit_ugly(7, 10, rat(-6), 1).unwrap(),
        ] {
            for ph in &a.phases {
                let g = ph.generator.as_ref().unwrap();
                assert_eq!(g.slack, ValP::int(0));
                assert_ne!(g.unit_residue.unwrap() % 7, 0);
            }
        }
    }

    #[test]
    fn classifier_flags_live_terms_above_target() {
        let q = make_params(5, 8, 7, rat(-5), Mode::Strict).unwrap();
        let terms = master_terms(&q).unwrap();
        // Pretend the target were one degree lower: the real generator becomes a violation.
        let rule = AuditRule {
            target_degree: 4,
            generator_degree: 4,
            residual_degree: None,
            ceil_half: 4,
        };
        let t5 = terms.iter().find(|t| t.a == 0 && t.j == 5).unwrap();
        assert_eq!(classify(t5, &rule, 5), Disposition::Violation);
    }
}
