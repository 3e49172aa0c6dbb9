//! The master congruence: parameters, the `a = 0` coefficient `*_j`, the term
//! list with exact valuations, kill audits and the inequality suites.
//!
//! `v_p(ℒ)` is carried as an exact rational; `ℒ` itself never appears.

mod audit;
mod inequality;
mod star;
mod terms;

pub use audit::{
    audit_bad, audit_good, audit_ugly, classify, AuditPhase, AuditRule, Disposition, KillAudit,
    KillMethod, TermDisposition, Witness,
};
pub use inequality::{inequality_suite, FamilyReport, InequalityCheck, InequalityReport};
pub use star::{star_full, star_mod_p2, star_table_residue};
pub use terms::{master_terms, CongruenceTerm, Line};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{check_prime, rat, rat_frac, vp_factorial, NumError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("prime {0} is too small; need p >= 5")]
    SmallPrime(u64),
    #[error("r = {r} is outside p <= r <= p^2 - p - 1 for p = {p}")]
    Range { p: u64, r: u64 },
    #[error("n = {n} is outside the window r/2 + b + 1 <= n <= r (r = {r}, b = {b})")]
    Window { r: u64, n: u64, b: u64 },
    #[error("leading digit b = {b} of n = {n} exceeds p - 2")]
    Digit { n: u64, b: u64 },
    #[error("v_p(L) = {vl} violates the {mode} bound r/2 - n = {bound}")]
    VlBound {
        vl: String,
        bound: String,
        mode: Mode,
    },
    #[error("derived bound failed: {0}")]
    Consequence(String),
    #[error("degree j = {j} outside [{lo}, {hi}]")]
    InvalidDegree { j: u64, lo: u64, hi: u64 },
    #[error("n = {n} is not a good candidate: v_p([n]_(b+1)) = {v_fall}")]
    NotGoodCandidate { n: u64, v_fall: u64 },
    #[error("invalid range: {0}")]
    InvalidRange(String),
}

/// Whether the bound on `v_p(ℒ)` is strict (`<`) or weak (`<=`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Weak,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Weak => "weak",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceParams {
    pub p: u64,
    pub r: u64,
    pub n: u64,
    pub b: u64,
    /// Lowest base-`p` digit of `n`.
    pub eps: u64,
    #[serde(with = "crate::exactnum::rational_text")]
    pub vl: Rational,
    /// Defined by `x + vL = r/2 - n - v_fall`.
    #[serde(with = "crate::exactnum::rational_text")]
    pub x: Rational,
    /// `v_p(n (n-1) ... (n-b))`.
    pub v_fall: u64,
    pub mode: Mode,
}

impl CongruenceParams {
    pub fn half_r(&self) -> Rational {
        rat_frac(self.r as i64, 2)
    }

    /// `⌈r/2⌉`.
    pub fn ceil_half(&self) -> u64 {
        self.r.div_ceil(2)
    }

    /// Lowest degree carried by the `a = 0` line, `⌈r/2⌉ - 1`.
    pub fn lowest_degree(&self) -> u64 {
        self.ceil_half() - 1
    }
}

/// `v_p(n (n-1) ... (n-m+1))`.
pub fn v_falling(n: u64, m: u64, p: u64) -> Result<u64, NumError> {
    Ok(vp_factorial(n, p)? - vp_factorial(n.saturating_sub(m), p)?)
}

/// `r/2 - n - 1`, comfortably inside the strict bound.
pub fn default_vl(r: u64, n: u64) -> Rational {
    rat_frac(r as i64, 2) - rat(n as i64) - rat(1)
}

pub fn make_params(
    p: u64,
    r: u64,
    n: u64,
    vl: Rational,
    mode: Mode,
) -> Result<CongruenceParams, CongruenceError> {
    check_prime(p)?;
    if p < 5 {
        return Err(CongruenceError::SmallPrime(p));
    }
    if r < p || r + p + 1 > p * p {
        return Err(CongruenceError::Range { p, r });
    }
    let b = n / p;
    let eps = n % p;
    if b + 2 > p {
        return Err(CongruenceError::Digit { n, b });
    }
    if 2 * n < r + 2 * b + 2 || n > r {
        return Err(CongruenceError::Window { r, n, b });
    }
    let half_r = rat_frac(r as i64, 2);
    let bound = &half_r - rat(n as i64);
    let ok = match mode {
        Mode::Strict => vl < bound,
        Mode::Weak => vl <= bound,
    };
    if !ok {
        return Err(CongruenceError::VlBound {
            vl: crate::exactnum::format_rational(&vl),
            bound: crate::exactnum::format_rational(&bound),
            mode,
        });
    }
    let v_fall = v_falling(n, b + 1, p)?;
    let x = &bound - rat(v_fall as i64) - &vl;
    if x < -rat(v_fall as i64) || v_fall > 1 {
        return Err(CongruenceError::Consequence(format!(
            "x >= -v_fall >= -1 fails with x = {}, v_fall = {v_fall}",
            crate::exactnum::format_rational(&x)
        )));
    }
    if rat((n - v_fall) as i64) <= half_r {
        return Err(CongruenceError::Consequence(format!(
            "n - v_fall > r/2 fails for n = {n}, r = {r}"
        )));
    }
    debug_assert!((&x + &vl - (&bound - rat(v_fall as i64))).is_zero());
    Ok(CongruenceParams {
        p,
        r,
        n,
        b,
        eps,
        vl,
        x,
        v_fall,
        mode,
    })
}

/// Every `n` admissible for `(p, r)`, ignoring the bound on `v_p(ℒ)`.
pub fn admissible_n(p: u64, r: u64) -> Vec<u64> {
    (r / 2 + 1..=r)
        .filter(|&n| {
            let b = n / p;
            b + 2 <= p && 2 * n >= r + 2 * b + 2
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_examples() {
        let q = make_params(5, 8, 7, rat(-5), Mode::Strict).unwrap();
        assert_eq!((q.b, q.eps, q.v_fall), (1, 2, 0));
        assert_eq!(q.x, rat(2));

        let q = make_params(5, 8, 6, rat(-5), Mode::Strict).unwrap();
        assert_eq!(q.v_fall, 1);
        assert_eq!(q.x, rat(2));

        assert!(matches!(
            make_params(5, 8, 5, rat(-5), Mode::Strict),
            Err(CongruenceError::Window { .. })
        ));
    }

    #[test]
    fn params_errors_are_distinct() {
        assert!(matches!(
            make_params(6, 8, 7, rat(-5), Mode::Strict),
            Err(CongruenceError::Num(NumError::InvalidPrime(6)))
        ));
        assert!(matches!(
            make_params(3, 5, 4, rat(-5), Mode::Strict),
            Err(CongruenceError::SmallPrime(3))
        ));
        assert!(matches!(
            make_params(5, 20, 15, rat(-50), Mode::Strict),
            Err(CongruenceError::Range { .. })
        ));
        assert!(matches!(
            make_params(5, 8, 7, rat(-3), Mode::Strict),
            Err(CongruenceError::VlBound { .. })
        ));
        assert!(make_params(5, 8, 7, rat(-3), Mode::Weak).is_ok());
        // 19 = 3*5 + 4 has leading digit 3 = p - 2, 20 has 4.
        assert!(make_params(5, 19, 19, rat(-20), Mode::Strict).is_ok());
        assert!(matches!(
            make_params(5, 19, 20, rat(-20), Mode::Strict),
            Err(CongruenceError::Digit { b: 4, .. })
        ));
    }

    #[test]
    fn odd_weight_x_is_half_integral() {
        let q = make_params(5, 9, 8, rat(-5), Mode::Strict).unwrap();
        assert_eq!(q.x, rat_frac(3, 2));
        assert_eq!(q.ceil_half(), 5);
    }

    #[test]
    fn consequences_hold_across_weak_sweep() {
        for p in [5u64, 7, 11] {
            for r in p..=p * p - p - 1 {
                for n in admissible_n(p, r) {
                    let vl = rat_frac(r as i64, 2) - rat(n as i64);
                    let q = make_params(p, r, n, vl, Mode::Weak).unwrap();
                    assert_eq!(q.x, -rat(q.v_fall as i64));
                }
            }
        }
    }
}
