//! Exact checks of the power-versus-linear inequalities used to discard
//! Taylor tails.
//!
//! Each family has the shape `p^(e0 + l) > c + l` (or `>=`) for `l >= l0`.
//! Because `p^(e + 1) - p^e >= 1` once `p^e >= 1/(p - 1)`, it suffices to
//! check the base case and the first difference, both exactly.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{make_params, CongruenceError, Mode};
use crate::exactnum::{
    format_rational, harmonic, pow_half_cmp, rat, rat_frac, vp, vp_factorial, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub label: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub name: String,
    /// A shortcut the argument offers in place of a required family.
    pub shortcut: bool,
    pub checks: Vec<InequalityCheck>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub p: u64,
    pub r: u64,
    pub n: u64,
    pub b: u64,
    pub v_fall: u64,
    pub families: Vec<FamilyReport>,
}

impl InequalityReport {
    /// All required families hold; shortcuts are reported separately.
    pub fn passed(&self) -> bool {
        self.families.iter().filter(|f| !f.shortcut).all(|f| f.holds)
    }

    pub fn failed_shortcuts(&self) -> impl Iterator<Item = &FamilyReport> {
        self.families.iter().filter(|f| f.shortcut && !f.holds)
    }

    pub fn family(&self, name: &str) -> Option<&FamilyReport> {
        self.families.iter().find(|f| f.name == name)
    }
}

#[derive(Clone, Copy)]
enum Rel {
    Gt,
    Ge,
}

impl Rel {
    fn holds(self, ord: Ordering) -> bool {
        match self {
            Rel::Gt => ord == Ordering::Greater,
            Rel::Ge => ord != Ordering::Less,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }
}

struct Family {
    name: &'static str,
    shortcut: bool,
    checks: Vec<InequalityCheck>,
}

impl Family {
    fn new(name: &'static str) -> Self {
        Family {
            name,
            shortcut: false,
            checks: Vec::new(),
        }
    }

    fn shortcut(mut self) -> Self {
        self.shortcut = true;
        self
    }

    /// `p^exponent REL rhs`, with `exponent` a half-integer.
    fn power(&mut self, label: String, p: u64, exponent: &Rational, rel: Rel, rhs: &Rational) {
        let twice = exponent * rat(2);
        debug_assert!(twice.is_integer());
        let twice = twice.to_integer().try_into().expect("small exponent");
        let holds = rel.holds(pow_half_cmp(p, twice, rhs));
        self.checks.push(InequalityCheck {
            label,
            lhs: format!("{p}^({})", format_rational(exponent)),
            relation: rel.symbol().into(),
            rhs: format_rational(rhs),
            holds,
        });
    }

    /// `lhs REL rhs` between exact rationals.
    fn plain(&mut self, label: String, lhs: &Rational, rel: Rel, rhs: &Rational) {
        let holds = rel.holds(lhs.cmp(rhs));
        self.checks.push(InequalityCheck {
            label,
            lhs: format_rational(lhs),
            relation: rel.symbol().into(),
            rhs: format_rational(rhs),
            holds,
        });
    }

    /// Base case at `l0` plus the first difference `p^(e+1) - p^e REL 1`,
    /// i.e. `p^e REL 1/(p-1)`.
    fn induction(
        &mut self,
        label: &str,
        p: u64,
        base_exponent: &Rational,
        rel: Rel,
        base_rhs: &Rational,
    ) {
        self.power(format!("{label}: base"), p, base_exponent, rel, base_rhs);
        self.power(
            format!("{label}: step"),
            p,
            base_exponent,
            rel,
            &rat_frac(1, p as i64 - 1),
        );
    }

    fn finish(self) -> FamilyReport {
        let holds = self.checks.iter().all(|c| c.holds);
        FamilyReport {
            name: self.name.into(),
            shortcut: self.shortcut,
            checks: self.checks,
            holds,
        }
    }
}

/// Checks every inequality family for `(p, r, n)` under the weak bound on `v_p(ℒ)`.
pub fn inequality_suite(p: u64, r: u64, n: u64) -> Result<InequalityReport, CongruenceError> {
    let vl_edge = rat_frac(r as i64, 2) - rat(n as i64);
    let q = make_params(p, r, n, vl_edge, Mode::Weak)?;
    let (b, vf) = (q.b, rat(q.v_fall as i64));
    let half_r = q.half_r();
    let nr = rat(n as i64);
    let pm1 = rat(p as i64 - 1);
    let mut families = Vec::new();

    // x >= -v_fall >= -1, n - v_fall > r/2, r >= 2(b + 1), v_p(H_n) >= -1 >= r/2 - n.
    let mut remark = Family::new("remark");
    let x_floor = -&vf;
    remark.plain("x >= -v_fall".into(), &q.x, Rel::Ge, &x_floor);
    remark.plain("-v_fall >= -1".into(), &x_floor, Rel::Ge, &rat(-1));
    remark.plain("n - v_fall > r/2".into(), &(&nr - &vf), Rel::Gt, &half_r);
    remark.plain("r >= 2(b + 1)".into(), &rat(r as i64), Rel::Ge, &rat(2 * (b as i64 + 1)));
    let vh = vp(&harmonic(n), p).map(rat).unwrap_or_else(|_| rat(i64::MAX));
    remark.plain("v_p(H_n) >= -1".into(), &vh, Rel::Ge, &rat(-1));
    remark.plain("-1 >= r/2 - n".into(), &rat(-1), Rel::Ge, &(&half_r - &nr));
    families.push(remark.finish());

    // p^(2(n - r/2) - v_fall + l) > n + l for l >= 1.
    let mut near = Family::new("telescoping-near");
    let e1 = rat(2) * (&nr - &half_r) - &vf + rat(1);
    near.induction("l = 1", p, &e1, Rel::Gt, &(&nr + rat(1)));
    families.push(near.finish());

    // 2(n - 1 - r/2 + l) - v_fall > (n - 1 + l)/(p - 1) for l >= 1: slopes 2 > 1/(p-1).
    let mut far = Family::new("telescoping-far");
    let lhs = rat(2) * (&nr - &half_r) - &vf;
    far.plain("l = 1".into(), &lhs, Rel::Gt, &(&nr / &pm1));
    far.plain("slope".into(), &rat(2), Rel::Gt, &(rat(1) / &pm1));
    families.push(far.finish());

    let mut shortcut = Family::new("telescoping-far-shortcut").shortcut();
    shortcut.plain(
        "2b + 1 > n/(p - 1)".into(),
        &rat(2 * b as i64 + 1),
        Rel::Gt,
        &(&nr / &pm1),
    );
    families.push(shortcut.finish());

    // p^(-1 + r/2 - n + m + l - v_p(j!)) > l for l >= n - m + 1; base exponent
    // r/2 - v_p(j!) is independent of m and the right side is largest at m = 0.
    let mut qp = Family::new("qp-zp");
    for j in 0..n {
        let e = &half_r - rat(vp_factorial(j, p)? as i64);
        qp.induction(&format!("j = {j}"), p, &e, Rel::Gt, &(&nr + rat(1)));
    }
    let chain = &half_r - rat(vp_factorial(r, p)? as i64);
    qp.power(
        "p^(r/2 - v_p(r!)) > r + 1".into(),
        p,
        &chain,
        Rel::Gt,
        &rat(r as i64 + 1),
    );
    families.push(qp.finish());

    // p^(-r/2 + j - v_fall + l) >= l for l >= n - j + 1.
    let mut prop = Family::new("proposition");
    let e = &nr - &half_r + rat(1) - &vf;
    for j in 0..n {
        prop.induction(&format!("j = {j}"), p, &e, Rel::Ge, &rat((n - j + 1) as i64));
    }
    prop.power(
        "p^(b + 2 - v_fall) >= r + 1".into(),
        p,
        &(rat(b as i64 + 2) - &vf),
        Rel::Ge,
        &rat(r as i64 + 1),
    );
    prop.plain(
        "n - r/2 + 1 - v_fall >= b + 2 - v_fall".into(),
        &e,
        Rel::Ge,
        &(rat(b as i64 + 2) - &vf),
    );
    families.push(prop.finish());

    Ok(InequalityReport {
        p,
        r,
        n,
        b,
        v_fall: q.v_fall,
        families,
    })
}

#[cfg(test)]
mod tests {
    use super::super::admissible_n;
    use super::*;

    #[test]
    fn worked_examples() {
        let rep = inequality_suite(5, 8, 6).unwrap();
        assert!(rep.passed());
        let near = rep.family("telescoping-near").unwrap();
        // 2(6 - 4) - 1 + 1 = 4.
        assert_eq!(near.checks[0].lhs, "5^(4)");
        assert_eq!(near.checks[0].rhs, "7");
        let sc = rep.family("telescoping-far-shortcut").unwrap();
        assert!(sc.holds);
        assert_eq!(sc.checks[0].rhs, "3/2");

        let rep = inequality_suite(5, 8, 7).unwrap();
        let chain = rep
            .family("qp-zp")
            .unwrap()
            .checks
            .iter()
            .find(|c| c.label.starts_with("p^(r/2"))
            .unwrap();
        assert_eq!((chain.lhs.as_str(), chain.rhs.as_str()), ("5^(3)", "9"));
        assert!(chain.holds);
    }

    #[test]
    fn shortcut_fails_only_below_p() {
        let rep = inequality_suite(5, 5, 4).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.failed_shortcuts().count(), 1);
    }

    #[test]
    fn odd_weight_uses_half_exponents() {
        let rep = inequality_suite(7, 9, 8).unwrap();
        assert!(rep.passed());
        let near = rep.family("telescoping-near").unwrap();
        // 2(8 - 9/2) - v_7(56) + 1 = 7.
        assert_eq!(near.checks[0].lhs, "7^(7)");
        let qp = rep.family("qp-zp").unwrap();
        assert!(qp.checks.iter().any(|c| c.lhs == "7^(9/2)"));
    }

    #[test]
    fn failing_inequality_is_reported() {
        let mut fam = Family::new("probe");
        fam.power("2^2 > 4".into(), 2, &rat(2), Rel::Gt, &rat(4));
        fam.power("2^2 >= 4".into(), 2, &rat(2), Rel::Ge, &rat(4));
        let rep = fam.finish();
        assert!(!rep.holds);
        assert!(!rep.checks[0].holds && rep.checks[1].holds);
    }

    #[test]
    fn small_sweep_passes() {
        for p in [5u64, 7] {
            for r in p..=p * p - p - 1 {
                for n in admissible_n(p, r) {
                    let rep = inequality_suite(p, r, n).unwrap();
                    assert!(rep.passed(), "p={p} r={r} n={n}");
                    if rep.failed_shortcuts().count() > 0 {
                        assert_eq!((rep.b, n), (0, p - 1));
                    }
                }
            }
        }
    }
}
