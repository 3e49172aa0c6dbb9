//! Interpolation coefficients `λ_i` on the node set `I = {0, 1, ..., n, (b+1)p}`.
//!
//! The coefficients are pinned by `λ_{(b+1)p} = -1` and
//! `sum_{i in I} λ_i i^j = 0` for `0 <= j <= n`. Moving the pinned entry to the
//! right-hand side leaves the moment system `sum_{i=0}^{n} λ_i i^j = ((b+1)p)^j`,
//! which [`solve_lambda`] solves exactly. [`lambda_closed`] is the product
//! formula for the same solution and serves as its cross-check.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{
    big_rat, binom, check_prime, mod_u64, rat, residue, sign_pow, vp, NumError, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("invalid window: need {b}*{p} <= n <= ({b}+1)*{p} - 1, got n = {n}")]
    InvalidWindow { p: u64, b: u64, n: u64 },
    #[error("unsupported digit b = {b}: need b <= p - 2 = {}", p - 2)]
    UnsupportedDigit { p: u64, b: u64 },
    #[error("prime p = {0} is below 5")]
    SmallPrime(u64),
    #[error("index {i} is not an interpolation node in 0..={n}")]
    IndexOutOfRange { i: u64, n: u64 },
}

fn check_window(p: u64, b: u64, n: u64) -> Result<(), LambdaError> {
    check_prime(p)?;
    if p < 5 {
        return Err(LambdaError::SmallPrime(p));
    }
    if b + 2 > p {
        return Err(LambdaError::UnsupportedDigit { p, b });
    }
    if n < b * p || n > (b + 1) * p - 1 {
        return Err(LambdaError::InvalidWindow { p, b, n });
    }
    Ok(())
}

/// The coefficient family `λ_i`, `i ∈ {0, ..., n} ∪ {(b+1)p}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaVector {
    pub p: u64,
    pub b: u64,
    pub n: u64,
    /// `λ_0, ..., λ_n`.
    #[serde(with = "rational_vec")]
    pub interior: Vec<Rational>,
    /// `λ_{(b+1)p}`, always `-1`.
    #[serde(with = "crate::exactnum::rational_text")]
    pub top: Rational,
}

mod rational_vec {
    use crate::exactnum::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl LambdaVector {
    pub fn top_index(&self) -> u64 {
        (self.b + 1) * self.p
    }

    /// `(z_i, λ_i)` over the whole node set, top node last.
    pub fn entries(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.interior
            .iter()
            .enumerate()
            .map(|(i, l)| (i as u64, l))
            .chain(std::iter::once((self.top_index(), &self.top)))
    }

    pub fn get(&self, i: u64) -> Option<&Rational> {
        if i == self.top_index() {
            Some(&self.top)
        } else {
            self.interior.get(i as usize)
        }
    }
}

/// Solves `sum_i x_i^j z_i = rhs_j` (`0 <= j <= n`) for distinct nodes `x_i`.
///
/// Björck–Pereyra elimination for the dual Vandermonde system: Newton
/// divided differences run backwards, `O(n^2)` exact operations.
pub fn solve_dual_vandermonde(nodes: &[Rational], rhs: &[Rational]) -> Vec<Rational> {
    assert_eq!(nodes.len(), rhs.len());
    let mut z = rhs.to_vec();
    let n = nodes.len().saturating_sub(1);
    for k in 0..n {
        for i in (k + 1..=n).rev() {
            let t = &nodes[k] * &z[i - 1];
            z[i] -= t;
        }
    }
    for k in (0..n).rev() {
        for i in k + 1..=n {
            let d = &nodes[i] - &nodes[i - k - 1];
            assert!(!d.is_zero(), "interpolation nodes must be distinct");
            z[i] /= d;
        }
        for i in k..n {
            let t = z[i + 1].clone();
            z[i] -= t;
        }
    }
    z
}

/// [`solve_dual_vandermonde`] specialised to the nodes `0, 1, ..., n` and an
/// integer right side. Every divisor is then `k + 1`, so scaling by `n!` keeps
/// each intermediate integral and all divisions exact.
fn solve_consecutive_nodes(rhs: Vec<BigInt>) -> Vec<Rational> {
    let n = rhs.len().saturating_sub(1);
    let scale: BigInt = (1..=n as u64).map(BigInt::from).product();
    let mut z: Vec<BigInt> = rhs.into_iter().map(|v| v * &scale).collect();
    for k in 1..n {
        for i in (k + 1..=n).rev() {
            let t = &z[i - 1] * k;
            z[i] -= t;
        }
    }
    for k in (0..n).rev() {
        for v in &mut z[k + 1..] {
            debug_assert!((&*v % (k + 1)).is_zero());
            *v /= k + 1;
        }
        for i in k..n {
            let t = z[i + 1].clone();
            z[i] -= t;
        }
    }
    z.into_iter()
        .map(|v| Rational::new(v, scale.clone()))
        .collect()
}

pub fn solve_lambda(p: u64, b: u64, n: u64) -> Result<LambdaVector, LambdaError> {
    check_window(p, b, n)?;
    let top = BigInt::from((b + 1) * p);
    let mut rhs = Vec::with_capacity(n as usize + 1);
    let mut power = BigInt::one();
    for _ in 0..=n {
        rhs.push(power.clone());
        power *= &top;
    }
    let interior = solve_consecutive_nodes(rhs);
    Ok(LambdaVector {
        p,
        b,
        n,
        interior,
        top: rat(-1),
    })
}

/// `λ_i = (-1)^{n-i} ((b+1)p / ((b+1)p - i)) C((b+1)p - 1, n) C(n, i)`.
pub fn lambda_closed(p: u64, b: u64, n: u64, i: u64) -> Result<Rational, LambdaError> {
    check_window(p, b, n)?;
    if i > n {
        return Err(LambdaError::IndexOutOfRange { i, n });
    }
    let top = (b + 1) * p;
    let magnitude = Rational::new(BigInt::from(top), BigInt::from(top - i))
        * big_rat(binom(top - 1, n as i64) * binom(n, i as i64));
    Ok(magnitude * rat(sign_pow((n - i) as i64)))
}

/// Outcome of one lemma clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "outcome", content = "holds")]
pub enum BulletOutcome {
    Pass,
    Fail,
    /// Evaluated but not asserted; `holds` records what was seen.
    Observed(bool),
}

impl BulletOutcome {
    fn asserted(ok: bool) -> Self {
        if ok {
            BulletOutcome::Pass
        } else {
            BulletOutcome::Fail
        }
    }

    pub fn is_failure(self) -> bool {
        self == BulletOutcome::Fail
    }
}

/// A residue class sum `sum_{i ≡ a} λ_i i^j` that is not `0 mod p^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSumWitness {
    pub a: u64,
    pub j: u64,
    pub residue_mod_p2: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BulletReport {
    pub p: u64,
    pub b: u64,
    pub n: u64,
    /// Every `λ_i` is an integer.
    pub integral: BulletOutcome,
    /// `sum_I λ_i i^j = 0` exactly for `0 <= j <= n`.
    pub exact_vanishing: BulletOutcome,
    /// Class sums vanish mod `p^2`; asserted only for `b >= 1`.
    pub class_sums: BulletOutcome,
    pub class_sum_witnesses: Vec<ClassSumWitness>,
    /// `λ_i ≡ (-1)^{b - i/p} C(b+1, i/p) mod p` when `p | i`.
    pub multiples_of_p: BulletOutcome,
    /// `λ_i ≡ 0 mod p` when `p ∤ i`.
    pub non_multiples: BulletOutcome,
}

impl BulletReport {
    pub fn passed(&self) -> bool {
        ![
            self.integral,
            self.exact_vanishing,
            self.class_sums,
            self.multiples_of_p,
            self.non_multiples,
        ]
        .iter()
        .any(|o| o.is_failure())
    }
}

pub fn verify_lambda(v: &LambdaVector) -> BulletReport {
    let p = v.p;
    let p2 = p * p;
    let integral = v.entries().all(|(_, l)| l.is_integer());

    let mut exact_vanishing = true;
    let mut powers: Vec<(BigInt, BigInt)> = v
        .entries()
        .map(|(i, l)| (BigInt::from(i), l.to_integer()))
        .collect();
    let mut current: Vec<BigInt> = vec![BigInt::one(); powers.len()];
    for _ in 0..=v.n {
        let total: BigInt = powers
            .iter()
            .zip(&current)
            .map(|((_, l), z)| l * z)
            .sum();
        if !total.is_zero() || !integral {
            exact_vanishing = false;
        }
        for ((z, _), c) in powers.iter_mut().zip(current.iter_mut()) {
            *c *= &*z;
        }
    }

    let mut witnesses = Vec::new();
    if integral {
        let lam: Vec<(u64, u64)> = v
            .entries()
            .map(|(i, l)| (i, mod_u64(&l.to_integer(), p2)))
            .collect();
        for a in 0..p {
            let class: Vec<(u64, u64)> = lam.iter().copied().filter(|(i, _)| i % p == a).collect();
            let mut pw: Vec<u64> = vec![1; class.len()];
            for j in 0..=v.n {
                let s = class
                    .iter()
                    .zip(&pw)
                    .fold(0u64, |acc, ((_, l), z)| (acc + l * z) % p2);
                if s != 0 {
                    witnesses.push(ClassSumWitness {
                        a,
                        j,
                        residue_mod_p2: s,
                    });
                }
                for ((i, _), z) in class.iter().zip(pw.iter_mut()) {
                    *z = *z * (i % p2) % p2;
                }
            }
        }
    }
    let class_ok = integral && witnesses.is_empty();
    let class_sums = if v.b >= 1 {
        BulletOutcome::asserted(class_ok)
    } else {
        BulletOutcome::Observed(class_ok)
    };

    let mut multiples_ok = integral;
    let mut others_ok = integral;
    if integral {
        for (i, l) in v.entries() {
            let r = mod_u64(&l.to_integer(), p);
            if i % p == 0 {
                let q = i / p;
                let expected = big_rat(binom(v.b + 1, q as i64))
                    * rat(sign_pow(v.b as i64 - q as i64));
                if residue(&expected, p) != Some(r) {
                    multiples_ok = false;
                }
            } else if r != 0 {
                others_ok = false;
            }
        }
    }

    BulletReport {
        p,
        b: v.b,
        n: v.n,
        integral: BulletOutcome::asserted(integral),
        exact_vanishing: BulletOutcome::asserted(exact_vanishing),
        class_sums,
        class_sum_witnesses: witnesses,
        multiples_of_p: BulletOutcome::asserted(multiples_ok),
        non_multiples: BulletOutcome::asserted(others_ok),
    }
}

/// `(-1)^{b - i/p} C(b+1, i/p) ≡ (-1)^{bp - i} C((b+1)p, i) mod p` for `p | i`.
pub fn multiple_residue_forms_agree(p: u64, b: u64, i: u64) -> bool {
    debug_assert_eq!(i % p, 0);
    let q = i / p;
    let lhs = big_rat(binom(b + 1, q as i64)) * rat(sign_pow(b as i64 - q as i64));
    let rhs = big_rat(binom((b + 1) * p, i as i64)) * rat(sign_pow((b * p) as i64 - i as i64));
    residue(&lhs, p) == residue(&rhs, p)
}

/// One admissible `(p, b, n)` with its solve checked against the product formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaCase {
    pub report: BulletReport,
    pub matches_closed_form: bool,
    /// `min_i v_p(λ_i)` over nonzero entries.
    pub min_valuation: i64,
}

/// Every admissible `(b, n)` for `p`, in lexicographic order.
pub fn sweep(p: u64) -> Result<Vec<LambdaCase>, LambdaError> {
    check_prime(p)?;
    if p < 5 {
        return Err(LambdaError::SmallPrime(p));
    }
    let windows: Vec<(u64, u64)> = (0..=p - 2)
        .flat_map(|b| (b * p..(b + 1) * p).map(move |n| (b, n)))
        .collect();
    windows
        .par_iter()
        .map(|&(b, n)| {
            let v = solve_lambda(p, b, n)?;
            let mut matches = true;
            for i in 0..=n {
                if lambda_closed(p, b, n, i)? != v.interior[i as usize] {
                    matches = false;
                }
            }
            let min_valuation = v
                .entries()
                .filter(|(_, l)| !l.is_zero())
                .map(|(_, l)| vp(l, p).expect("prime checked"))
                .min()
                .unwrap_or(0);
            Ok(LambdaCase {
                report: verify_lambda(&v),
                matches_closed_form: matches,
                min_valuation,
            })
        })
        .collect()
}
