use num_bigint::BigInt;

use super::{CongruenceError, CongruenceParams};
use crate::combinat::stirling2;
use crate::exactnum::{big_rat, binom, factorial, harmonic, rat, residue, sign_pow, Rational};

fn check_degree(q: &CongruenceParams, j: u64) -> Result<(), CongruenceError> {
    let lo = q.lowest_degree();
    let hi = q.n - 1;
    if j < lo || j > hi {
        return Err(CongruenceError::InvalidDegree { j, lo, hi });
    }
    Ok(())
}

/// `p H_ε`, exact.
fn p_harmonic(q: &CongruenceParams) -> Rational {
    rat(q.p as i64) * harmonic(q.eps)
}

/// Exact value of the `a = 0` coefficient `*_j`.
pub fn star_full(q: &CongruenceParams, j: u64) -> Result<Rational, CongruenceError> {
    check_degree(q, j)?;
    let (p, n, b) = (q.p, q.n, q.b);
    let m = n - j;
    let b1 = b + 1;
    let fact = factorial(b1);
    let s = b1 as i64;
    let sign_b1 = rat(sign_pow(b1 as i64));
    let ph = p_harmonic(q);
    let pow_m = big_rat(BigInt::from(b1).pow(m as u32));
    let pow_m1 = big_rat(BigInt::from(b1).pow(m as u32 + 1));

    let bracket = &sign_b1 * big_rat(stirling2(m, s) * &fact)
        + &ph * &sign_b1 * big_rat(stirling2(m + 1, s) * &fact)
        - &sign_b1 * &pow_m
        - &ph * &sign_b1 * &pow_m1;
    let lead = big_rat(binom(b1 * p - 1, n as i64)) * rat(sign_pow(n as i64));
    Ok(lead * bracket - pow_m)
}

/// `*_j mod p^2` from `-{n-j brace b+1}(b+1)! - pH_ε {n-j brace b}(b+1)!`.
pub fn star_mod_p2(q: &CongruenceParams, j: u64) -> Result<u64, CongruenceError> {
    check_degree(q, j)?;
    let m = q.n - j;
    let fact = big_rat(factorial(q.b + 1));
    let value = -big_rat(stirling2(m, q.b as i64 + 1)) * &fact
        - p_harmonic(q) * big_rat(stirling2(m, q.b as i64)) * &fact;
    Ok(residue(&value, q.p * q.p).expect("H_eps is p-integral"))
}

/// Residues predicted by the case list, as `(modulus, residue)` pairs.
///
/// Empty when `j` falls in no listed case.
pub fn star_table_residue(q: &CongruenceParams, j: u64) -> Result<Vec<(u64, u64)>, CongruenceError> {
    check_degree(q, j)?;
    let (p, n, b) = (q.p, q.n, q.b);
    let p2 = p * p;
    let fact = big_rat(factorial(b + 1));
    let ph = p_harmonic(q);
    let res = |v: &Rational, m: u64| residue(v, m).expect("p-integral");
    let mut out = Vec::new();
    if j + b >= n {
        out.push((p, 0));
    } else if j + b + 1 == n {
        out.push((p, res(&-fact.clone(), p)));
    }
    if j + b > n {
        out.push((p2, 0));
    } else if j + b == n {
        out.push((p2, res(&(-&ph * &fact), p2)));
    } else if j + b + 1 == n {
        let pairs = big_rat(binom(b + 1, 2));
        out.push((p2, res(&(-fact.clone() - &ph * &fact * pairs), p2)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{admissible_n, default_vl, make_params, Mode};
    use super::*;

    fn params(p: u64, r: u64, n: u64) -> CongruenceParams {
        make_params(p, r, n, default_vl(r, n), Mode::Strict).unwrap()
    }

    #[test]
    fn worked_values() {
        let q = params(5, 8, 7);
        assert_eq!(star_full(&q, 5).unwrap(), rat(608));
        assert_eq!(star_full(&q, 6).unwrap(), rat(610));
        assert_eq!(star_mod_p2(&q, 5).unwrap(), 8);
        assert_eq!(star_mod_p2(&q, 6).unwrap(), 10);
        assert_eq!(star_table_residue(&q, 5).unwrap(), vec![(5, 3), (25, 8)]);
        assert_eq!(star_table_residue(&q, 6).unwrap(), vec![(5, 0), (25, 10)]);
        assert!(matches!(
            star_full(&q, 7),
            Err(CongruenceError::InvalidDegree { lo: 3, hi: 6, .. })
        ));
        assert!(star_full(&q, 2).is_err());
    }

    #[test]
    fn deep_degree_vanishes_mod_p2() {
        let q = params(5, 14, 12);
        assert_eq!(q.b, 2);
        assert_eq!(residue(&star_full(&q, 11).unwrap(), 25), Some(0));
        assert_eq!(star_mod_p2(&q, 11).unwrap(), 0);
    }

    /// The `i ≡ 0 mod p` sum before any simplification:
    /// `(b+1) C((b+1)p-1, n) sum_k (-1)^(n-kp) k^(n-j) C(n, kp) / (b+1-k) - (b+1)^(n-j)`.
    fn star_from_lambda_sum(q: &CongruenceParams, j: u64) -> Rational {
        let (p, n, b) = (q.p, q.n, q.b);
        let mut inner = rat(0);
        for k in 0..=b {
            inner += rat(sign_pow((n - k * p) as i64))
                * big_rat(BigInt::from(k).pow((n - j) as u32) * binom(n, (k * p) as i64))
                / rat((b + 1 - k) as i64);
        }
        rat((b + 1) as i64) * big_rat(binom((b + 1) * p - 1, n as i64)) * inner
            - big_rat(BigInt::from(b + 1).pow((n - j) as u32))
    }

    #[test]
    fn full_formula_matches_pre_stirling_sum_mod_p2() {
        for p in [5u64, 7] {
            for r in p..=p * p - p - 1 {
                for n in admissible_n(p, r) {
                    let q = params(p, r, n);
                    for j in q.lowest_degree()..n {
                        let m = p * p;
                        let full = residue(&star_full(&q, j).unwrap(), m).unwrap();
                        let direct = residue(&star_from_lambda_sum(&q, j), m).unwrap();
                        assert_eq!(full, direct, "p={p} r={r} n={n} j={j}");
                    }
                }
            }
        }
    }
}
