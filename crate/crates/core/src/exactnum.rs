//! Exact integer and rational arithmetic with p-adic valuations.
//!
//! Every scalar in the crate is a [`Rational`] (an arbitrary-precision
//! fraction in lowest terms). Valuations of zero are `+∞`, carried by
//! [`ValP::Infinite`] so that threshold comparisons are always defined.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Canonical exact rational: denominator positive, lowest terms, zero is `0/1`.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("invalid prime: {0} is not prime")]
    InvalidPrime(u64),
    #[error("valuation of zero is not finite")]
    ZeroValuation,
    #[error("cannot parse rational literal {0:?}")]
    BadLiteral(String),
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<(), NumError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(NumError::InvalidPrime(p))
    }
}

/// A p-adic valuation: a finite rational or `+∞` (the valuation of zero).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValP {
    Finite(Rational),
    Infinite,
}

impl ValP {
    pub fn int(v: i64) -> Self {
        ValP::Finite(Rational::from_integer(v.into()))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ValP::Infinite)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ValP::Finite(v) => Some(v),
            ValP::Infinite => None,
        }
    }

    /// Shift a valuation by a finite amount; `+∞` absorbs.
    pub fn shift(&self, by: &Rational) -> ValP {
        match self {
            ValP::Finite(v) => ValP::Finite(v + by),
            ValP::Infinite => ValP::Infinite,
        }
    }

    /// Exact integer value, if finite and integral.
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            ValP::Finite(v) if v.is_integer() => v.to_integer().to_i64(),
            _ => None,
        }
    }
}

impl PartialOrd for ValP {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ValP {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ValP::Infinite, ValP::Infinite) => Ordering::Equal,
            (ValP::Infinite, _) => Ordering::Greater,
            (_, ValP::Infinite) => Ordering::Less,
            (ValP::Finite(a), ValP::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ValP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValP::Finite(v) => write!(f, "{}", format_rational(v)),
            ValP::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ValP {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ValP {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        if text == "inf" {
            return Ok(ValP::Infinite);
        }
        parse_rational(&text)
            .map(ValP::Finite)
            .map_err(serde::de::Error::custom)
    }
}

/// `a/b` text form, or just `a` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `a`, `-a`, or `a/b` exactly. Decimal points are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, NumError> {
    let bad = || NumError::BadLiteral(text.to_string());
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Serde adapter storing a [`Rational`] as its `a/b` text.
pub mod rational_text {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// `v_p(q)` for nonzero `q`.
pub fn vp(q: &Rational, p: u64) -> Result<i64, NumError> {
    check_prime(p)?;
    if q.is_zero() {
        return Err(NumError::ZeroValuation);
    }
    let num = vp_int(q.numer(), p).expect("nonzero numerator");
    let den = vp_int(q.denom(), p).expect("nonzero denominator");
    Ok(num - den)
}

/// Total valuation: `+∞` on zero.
pub fn vp_total(q: &Rational, p: u64) -> Result<ValP, NumError> {
    check_prime(p)?;
    if q.is_zero() {
        Ok(ValP::Infinite)
    } else {
        vp(q, p).map(ValP::int)
    }
}

/// Legendre's formula for `v_p(n!)`.
pub fn vp_factorial(n: u64, p: u64) -> Result<u64, NumError> {
    check_prime(p)?;
    let mut total = 0;
    let mut m = n;
    while m > 0 {
        m /= p;
        total += m;
    }
    Ok(total)
}

/// `[n]_m = n (n - 1) ... (n - m + 1)`; the empty product is 1.
pub fn falling_factorial(n: i64, m: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 0..m as i64 {
        acc *= n - k;
        if acc.is_zero() {
            break;
        }
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Exact binomial coefficient; zero outside `0 <= k <= n`.
pub fn binom(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `binom(n, k) mod m`, as a least nonnegative residue.
pub fn binom_mod(n: u64, k: i64, m: u64) -> u64 {
    mod_u64(&binom(n, k), m)
}

/// Least nonnegative residue of an integer.
pub fn mod_u64(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("residue fits in u64")
}

/// Residue of a rational modulo `m`, defined when the denominator is a unit mod `m`.
pub fn residue(q: &Rational, m: u64) -> Option<u64> {
    let den = mod_u64(q.denom(), m);
    let inv = inverse_mod(den, m)?;
    let num = mod_u64(q.numer(), m);
    Some(((num as u128 * inv as u128) % m as u128) as u64)
}

pub fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let egcd = (a as i128).extended_gcd(&(m as i128));
    if egcd.gcd != 1 {
        return None;
    }
    Some(egcd.x.rem_euclid(m as i128) as u64)
}

/// Unit part of a nonzero rational: `q / p^{v_p(q)}`.
pub fn unit_part(q: &Rational, p: u64) -> Option<Rational> {
    if q.is_zero() {
        return None;
    }
    let v = vp(q, p).ok()?;
    let pp = Rational::from_integer(BigInt::from(p).pow(v.unsigned_abs() as u32));
    Some(if v >= 0 { q / pp } else { q * pp })
}

/// `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
pub fn harmonic(n: u64) -> Rational {
    (1..=n).fold(Rational::zero(), |acc, m| {
        acc + Rational::new(BigInt::one(), BigInt::from(m))
    })
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn big_rat(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// `(-1)^e` for possibly negative `e`.
pub fn sign_pow(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Compares `p^(twice_exp / 2)` against a rational `rhs`, exactly.
///
/// Half-integer exponents are handled by squaring both sides, which is valid
/// because `p^e > 0`.
pub fn pow_half_cmp(p: u64, twice_exp: i64, rhs: &Rational) -> Ordering {
    if !rhs.is_positive() {
        return Ordering::Greater;
    }
    let lhs_sq = if twice_exp >= 0 {
        big_rat(BigInt::from(p).pow(twice_exp as u32))
    } else {
        Rational::new(BigInt::one(), BigInt::from(p).pow((-twice_exp) as u32))
    };
    lhs_sq.cmp(&(rhs * rhs))
}

/// Sign of an integer as -1, 0, 1.
pub fn signum(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(vp(&rat_frac(250, 3), 5), Ok(3));
        assert_eq!(vp(&rat(1), 7), Ok(0));
        assert_eq!(vp(&rat_frac(7, 5), 5), Ok(-1));
        assert_eq!(vp(&rat(10), 6), Err(NumError::InvalidPrime(6)));
        assert_eq!(vp(&rat(0), 5), Err(NumError::ZeroValuation));
        assert_eq!(vp_total(&rat(0), 5), Ok(ValP::Infinite));
    }

    #[test]
    fn valuation_order_puts_infinity_on_top() {
        assert!(ValP::Infinite > ValP::int(1_000_000));
        assert!(ValP::int(-3) < ValP::int(0));
        assert_eq!(ValP::Infinite.shift(&rat(4)), ValP::Infinite);
    }

    #[test]
    fn factorial_valuation() {
        // 25! has 5, 10, 15, 20 once and 25 twice.
        let direct = vp_int(&factorial(25), 5).unwrap();
        assert_eq!(direct, 6);
        assert_eq!(vp_factorial(25, 5), Ok(6));
        assert_eq!(vp_factorial(0, 5), Ok(0));
        for p in [5u64, 7, 11] {
            assert_eq!(vp_factorial(p - 1, p), Ok(0));
        }
        assert!(vp_factorial(10, 4).is_err());
    }

    #[test]
    fn legendre_matches_direct_factorisation() {
        for p in [5u64, 7, 11, 13] {
            let mut fact = BigInt::one();
            let mut running = 0i64;
            for n in 1..=3000u64 {
                fact *= n;
                running += vp_int(&BigInt::from(n), p).unwrap();
                assert_eq!(vp_factorial(n, p).unwrap() as i64, running);
            }
            assert_eq!(vp_int(&fact, p).unwrap(), running);
        }
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(7, 2), BigInt::from(42));
        assert_eq!(falling_factorial(9, 0), BigInt::one());
        assert_eq!(falling_factorial(5, 6), BigInt::zero());
        assert_eq!(falling_factorial(-2, 3), BigInt::from(-24));
    }

    #[test]
    fn falling_factorial_is_binomial_times_factorial() {
        for n in 0..=200u64 {
            for m in 0..=n {
                assert_eq!(
                    falling_factorial(n as i64, m),
                    binom(n, m as i64) * factorial(m)
                );
            }
        }
    }

    #[test]
    fn binomial_examples() {
        let mut row = vec![BigInt::one()];
        for _ in 0..9 {
            let mut next = vec![BigInt::one()];
            for w in row.windows(2) {
                next.push(&w[0] + &w[1]);
            }
            next.push(BigInt::one());
            row = next;
        }
        assert_eq!(row[7], BigInt::from(36));
        assert_eq!(binom(9, 7), BigInt::from(36));
        assert_eq!(binom(12, 0), BigInt::one());
        assert_eq!(binom(3, 5), BigInt::zero());
        assert_eq!(binom(3, -1), BigInt::zero());
        assert_eq!(binom_mod(12, 7, 5), 2);
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic(2), rat_frac(3, 2));
        assert_eq!(harmonic(0), rat(0));
        assert_eq!(harmonic(4), rat_frac(25, 12));
        assert_eq!(vp(&harmonic(4), 5), Ok(2));
        for p in (5..=97).filter(|&p| is_prime(p)) {
            assert!(vp(&harmonic(p - 1), p).unwrap() >= 1, "p = {p}");
        }
    }

    #[test]
    fn rational_text_roundtrip() {
        for text in ["0", "-5", "7/2", "-9/2"] {
            assert_eq!(format_rational(&parse_rational(text).unwrap()), text);
        }
        assert_eq!(parse_rational("6/4").unwrap(), rat_frac(3, 2));
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn residues_and_units() {
        assert_eq!(residue(&rat_frac(3, 2), 25), Some(14));
        assert_eq!(residue(&rat_frac(1, 5), 25), None);
        assert_eq!(unit_part(&rat_frac(250, 3), 5), Some(rat_frac(2, 3)));
        assert_eq!(inverse_mod(2, 25), Some(13));
    }

    #[test]
    fn half_power_comparison() {
        // 5^(3/2) ~ 11.18
        assert_eq!(pow_half_cmp(5, 3, &rat(11)), Ordering::Greater);
        assert_eq!(pow_half_cmp(5, 3, &rat(12)), Ordering::Less);
        assert_eq!(pow_half_cmp(5, 2, &rat(5)), Ordering::Equal);
        assert_eq!(pow_half_cmp(5, -2, &rat_frac(1, 5)), Ordering::Equal);
        assert_eq!(pow_half_cmp(5, -2, &rat(-1)), Ordering::Greater);
    }

    fn nonzero_rational() -> impl Strategy<Value = Rational> {
        (
            (1i64..5_000_000).prop_flat_map(|n| prop_oneof![Just(n), Just(-n)]),
            1i64..5_000_000,
            0u32..4,
            0u32..4,
        )
            .prop_map(|(n, d, up, down)| {
                rat_frac(n, d) * rat(5i64.pow(up)) / rat(5i64.pow(down))
            })
    }

    proptest! {
        #[test]
        fn valuation_is_multiplicative(a in nonzero_rational(), b in nonzero_rational()) {
            prop_assert_eq!(vp(&(&a * &b), 5).unwrap(), vp(&a, 5).unwrap() + vp(&b, 5).unwrap());
        }

        #[test]
        fn valuation_is_ultrametric(a in nonzero_rational(), b in nonzero_rational()) {
            let sum = &a + &b;
            let lower = vp(&a, 5).unwrap().min(vp(&b, 5).unwrap());
            prop_assert!(vp_total(&sum, 5).unwrap() >= ValP::int(lower));
        }
    }
}
