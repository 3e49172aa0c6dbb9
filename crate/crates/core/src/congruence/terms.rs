use serde::{Deserialize, Serialize};

use super::star::star_full;
use super::{CongruenceError, CongruenceParams};
use crate::combinat::stirling2;
use crate::exactnum::{
    big_rat, binom, factorial, rat, rat_frac, residue, sign_pow, unit_part, vp_total, Rational,
    ValP,
};

/// Which line of the congruence a term comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Line {
    /// Supported on `a + pZ_p` with `a != 0`.
    Translated,
    /// Supported on `pZ_p`, carrying `*_j`.
    Origin,
}

/// `p^(x + n - j) C ℒ (z - a)^j` on `a + pZ_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceTerm {
    pub line: Line,
    /// Support residue; `0` means `pZ_p`.
    pub a: u64,
    pub j: u64,
    #[serde(with = "crate::exactnum::rational_text")]
    pub coefficient: Rational,
    /// `x + (n - j) + v_p(ℒ) + v_p(C)`.
    pub total_val: ValP,
    /// `total_val - (r/2 - j)`.
    pub slack: ValP,
    /// Unit part of `C` mod `p^2`; absent when `C = 0`.
    pub unit_residue: Option<u64>,
}

impl CongruenceTerm {
    fn new(q: &CongruenceParams, line: Line, a: u64, j: u64, coefficient: Rational) -> Self {
        let p = q.p;
        let v_c = vp_total(&coefficient, p).expect("prime checked by params");
        let shift = &q.x + rat((q.n - j) as i64) + &q.vl;
        let total_val = v_c.shift(&shift);
        let slack = total_val.shift(&-(q.half_r() - rat(j as i64)));
        let unit_residue = unit_part(&coefficient, p).map(|u| residue(&u, p * p).expect("unit"));
        CongruenceTerm {
            line,
            a,
            j,
            coefficient,
            total_val,
            slack,
            unit_residue,
        }
    }

    pub fn is_dead(&self) -> bool {
        self.slack > ValP::int(0)
    }

    pub fn is_integral(&self) -> bool {
        self.slack >= ValP::int(0)
    }
}

/// Both lines of the congruence, translated terms first, each ordered by `(a, j)`.
pub fn master_terms(q: &CongruenceParams) -> Result<Vec<CongruenceTerm>, CongruenceError> {
    let (p, n, b, eps) = (q.p, q.n, q.b, q.eps);
    let lead = big_rat(binom((b + 1) * p, n as i64 + 1) * (n + 1) * factorial(b));
    let mut out = Vec::new();
    for a in 1..=eps {
        let per_a = &lead * big_rat(binom(eps, a as i64)) * rat_frac(1, a as i64);
        for j in q.ceil_half()..n {
            let sign = rat(sign_pow(-(a as i64) - j as i64 + b as i64 - 1));
            let c = &per_a
                * &sign
                * big_rat(binom(n, j as i64) * stirling2(n - j, b as i64));
            out.push(CongruenceTerm::new(q, Line::Translated, a, j, c));
        }
    }
    for j in q.lowest_degree()..n {
        let c = big_rat(binom(n, j as i64)) * rat(sign_pow((n - j) as i64)) * star_full(q, j)?;
        out.push(CongruenceTerm::new(q, Line::Origin, 0, j, c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{make_params, Mode};
    use super::*;

    fn terms(p: u64, r: u64, n: u64, vl: i64) -> Vec<CongruenceTerm> {
        master_terms(&make_params(p, r, n, rat(vl), Mode::Strict).unwrap()).unwrap()
    }

    fn find(ts: &[CongruenceTerm], a: u64, j: u64) -> &CongruenceTerm {
        ts.iter().find(|t| t.a == a && t.j == j).unwrap()
    }

    #[test]
    fn worked_terms() {
        let ts = terms(5, 8, 7, -5);
        let gen = find(&ts, 0, 5);
        assert_eq!(gen.slack, ValP::int(0));
        assert_eq!(gen.coefficient, rat(21 * 608));
        assert_ne!(gen.unit_residue.unwrap() % 5, 0);
        assert_eq!(find(&ts, 0, 6).slack, ValP::int(1));
        for t in ts.iter().filter(|t| t.a != 0) {
            assert!(t.slack >= ValP::int(1), "{t:?}");
        }
        // ε = 2: supports a = 1, 2 over j = 4..=6, then a = 0 over j = 3..=6.
        assert_eq!(ts.len(), 2 * 3 + 4);
    }

    #[test]
    fn slack_is_coefficient_valuation_minus_falling_valuation() {
        let q = make_params(5, 8, 6, rat(-5), Mode::Strict).unwrap();
        for t in master_terms(&q).unwrap() {
            let v = vp_total(&t.coefficient, 5).unwrap();
            assert_eq!(t.slack, v.shift(&rat(-1)));
        }
    }

    #[test]
    fn zero_stirling_gives_infinite_valuation() {
        // b = 0: {n - j brace 0} = 0 for j < n.
        let ts = terms(5, 5, 4, -3);
        assert!(ts
            .iter()
            .filter(|t| t.line == Line::Translated)
            .all(|t| t.total_val == ValP::Infinite && t.unit_residue.is_none()));
    }
}
