//! Lucas-type congruences and Stirling numbers of the second kind.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{
    binom, check_prime, factorial, harmonic, mod_u64, rat, residue, NumError, Rational,
};

/// Classical Lucas: product of digit binomials mod `p`.
pub fn lucas_mod_p(n: u64, k: u64, p: u64) -> Result<u64, NumError> {
    check_prime(p)?;
    let (mut n, mut k) = (n, k);
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return Ok(0);
        }
        acc = acc * mod_u64(&binom(nd, kd as i64), p) % p;
        n /= p;
        k /= p;
    }
    Ok(acc)
}

/// Which computation produced a [`LucasP2`] residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LucasRoute {
    /// The mod `p^2` formula under its digit hypothesis `s <= r'`.
    Lemma,
    /// The hypothesis failed; the exact binomial was reduced instead.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LucasP2 {
    pub residue: u64,
    pub route: LucasRoute,
}

/// `C(N, K) mod p^2` via the harmonic-number refinement of Lucas.
///
/// Writing `N = pa + r'` and `K = pb + s` with `0 <= s <= r' <= p - 1`,
/// `C(N, K) = C(a, b) C(r', s) (1 + pa(H_{r'} - H_{r'-s}) + pb(H_{r'-s} - H_s)) mod p^2`.
pub fn binom_mod_p2(n: u64, k: u64, p: u64) -> Result<LucasP2, NumError> {
    check_prime(p)?;
    let m = p * p;
    let (a, r) = (n / p, n % p);
    let (b, s) = (k / p, k % p);
    if s > r {
        return Ok(LucasP2 {
            residue: mod_u64(&binom(n, k as i64), m),
            route: LucasRoute::Exact,
        });
    }
    let h_r = harmonic(r);
    let h_rs = harmonic(r - s);
    let h_s = harmonic(s);
    let pa = rat((p * a) as i64);
    let pb = rat((p * b) as i64);
    let correction = rat(1) + pa * (&h_r - &h_rs) + pb * (&h_rs - &h_s);
    let value = Rational::from_integer(binom(a, b as i64) * binom(r, s as i64)) * correction;
    let residue = residue(&value, m).expect("harmonic numbers below p are p-integral");
    Ok(LucasP2 {
        residue,
        route: LucasRoute::Lemma,
    })
}

/// `{t brace s}` via the triangular recurrence; zero for `s < 0` or `s > t`.
pub fn stirling2(t: u64, s: i64) -> BigInt {
    if s < 0 || s as u64 > t {
        return BigInt::zero();
    }
    let s = s as usize;
    let mut row = vec![BigInt::zero(); s + 1];
    row[0] = BigInt::one();
    for _ in 0..t {
        for k in (1..=s).rev() {
            row[k] = &row[k] * k + &row[k - 1];
        }
        row[0] = BigInt::zero();
    }
    row[s].clone()
}

/// `{t brace s}` from the alternating sum `(1/s!) sum_j (-1)^j C(s, j) (s - j)^t`.
pub fn stirling2_explicit(t: u64, s: i64) -> BigInt {
    if s < 0 {
        return BigInt::zero();
    }
    let su = s as u64;
    let mut total = BigInt::zero();
    for j in 0..=su {
        let term = binom(su, j as i64) * BigInt::from(su - j).pow(t as u32);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    let fact = factorial(su);
    debug_assert!((&total % &fact).is_zero());
    total / fact
}

/// Stirling numbers `{t brace s}` for `0 <= s <= t <= t_max`, with residues mod `p^precision`.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    p: u64,
    precision: u32,
    modulus: u64,
    rows: Vec<Vec<BigInt>>,
    residues: Vec<Vec<u64>>,
}

impl StirlingTable {
    pub const DEFAULT_PRECISION: u32 = 2;

    pub fn new(p: u64, t_max: u64) -> Result<Self, NumError> {
        Self::with_precision(p, t_max, Self::DEFAULT_PRECISION)
    }

    pub fn with_precision(p: u64, t_max: u64, precision: u32) -> Result<Self, NumError> {
        check_prime(p)?;
        let modulus = p.pow(precision);
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(t_max as usize + 1);
        rows.push(vec![BigInt::one()]);
        for t in 1..=t_max as usize {
            let prev = &rows[t - 1];
            let mut row = vec![BigInt::zero(); t + 1];
            for s in 1..=t {
                let stay = if s < t { &prev[s] * s } else { BigInt::zero() };
                row[s] = stay + &prev[s - 1];
            }
            rows.push(row);
        }
        let residues = rows
            .iter()
            .map(|row| row.iter().map(|v| mod_u64(v, modulus)).collect())
            .collect();
        Ok(StirlingTable {
            p,
            precision,
            modulus,
            rows,
            residues,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn t_max(&self) -> u64 {
        self.rows.len() as u64 - 1
    }

    /// `{t brace s}`, falling back to direct computation beyond the table.
    pub fn get(&self, t: u64, s: i64) -> BigInt {
        if s < 0 || s as u64 > t {
            return BigInt::zero();
        }
        match self.rows.get(t as usize) {
            Some(row) => row[s as usize].clone(),
            None => stirling2(t, s),
        }
    }

    pub fn residue(&self, t: u64, s: i64) -> u64 {
        if s < 0 || s as u64 > t {
            return 0;
        }
        match self.residues.get(t as usize) {
            Some(row) => row[s as usize],
            None => mod_u64(&stirling2(t, s), self.modulus),
        }
    }

    /// Checks `{t brace s} = s {t-1 brace s} + {t-1 brace s-1}` on every cached entry.
    pub fn recurrence_holds(&self) -> bool {
        (1..self.rows.len()).all(|t| {
            (0..=t).all(|s| {
                let expected = self.get(t as u64 - 1, s as i64) * s
                    + self.get(t as u64 - 1, s as i64 - 1);
                self.rows[t][s] == expected
            })
        }) && self.rows[0][0].is_one()
    }
}

/// Both sides of `{y + p^i brace x} = {y+1 brace x} + sum_{j=1}^{i} {y brace x - p^j} (mod p)`.
pub fn stirling_lucas_check(y: u64, x: u64, i: u32, p: u64) -> Result<(u64, u64), NumError> {
    check_prime(p)?;
    let lhs = mod_u64(&stirling2(y + p.pow(i), x as i64), p);
    let mut rhs = stirling2(y + 1, x as i64);
    for j in 1..=i {
        rhs += stirling2(y, x as i64 - p.pow(j) as i64);
    }
    Ok((lhs, mod_u64(&rhs, p)))
}
