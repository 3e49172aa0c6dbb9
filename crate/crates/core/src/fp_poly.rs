//! Homogeneous bivariate polynomials over `F_p` and the shallow kills.
//!
//! A degree-`d` polynomial is stored as `c_0, ..., c_d`, where `c_j` is the
//! coefficient of `X^j Y^{d-j}`.
//!
//! Matrices act by linear substitution: `m = (a b; c d)` sends `f(X, Y)` to
//! `f(aX + cY, bX + dY)`. With this convention `(0 1; 1 -λ)` sends `f(X, Y)`
//! to `f(Y, X - λY)`, and `m1 · (m2 · f) = (m1 m2) · f`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{check_prime, NumError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("not a polynomial: need r >= i(p+1) - 1 = {needed}, got r = {r}")]
    NotPolynomial { r: u64, needed: u64 },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("division by {var} is not exact")]
    InexactDivision { var: char },
    #[error("degree or prime mismatch")]
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl HPoly {
    pub fn zero(p: u64, degree: usize) -> Self {
        HPoly {
            p,
            coeffs: vec![0; degree + 1],
        }
    }

    pub fn from_coeffs(p: u64, coeffs: Vec<i64>) -> Self {
        assert!(!coeffs.is_empty(), "a homogeneous polynomial has degree >= 0");
        HPoly {
            p,
            coeffs: coeffs
                .into_iter()
                .map(|c| c.rem_euclid(p as i64) as u64)
                .collect(),
        }
    }

    /// `c X^x_pow Y^(degree - x_pow)`.
    pub fn monomial(p: u64, degree: usize, x_pow: usize, c: i64) -> Self {
        let mut f = Self::zero(p, degree);
        f.coeffs[x_pow] = c.rem_euclid(p as i64) as u64;
        f
    }

    /// `aX + bY`.
    pub fn linear(p: u64, a: i64, b: i64) -> Self {
        Self::from_coeffs(p, vec![b, a])
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `X^x_pow Y^(d - x_pow)`.
    pub fn coeff(&self, x_pow: usize) -> u64 {
        self.coeffs.get(x_pow).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn min_x_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn max_x_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        if self.p != other.p || self.degree() != other.degree() {
            return Err(PolyError::Mismatch);
        }
        let p = self.p;
        Ok(HPoly {
            p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (a + b) % p)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, c: i64) -> Self {
        let c = c.rem_euclid(self.p as i64) as u64;
        HPoly {
            p: self.p,
            coeffs: self.coeffs.iter().map(|a| a * c % self.p).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "polynomials over different fields");
        let p = self.p;
        let mut out = vec![0u64; self.degree() + other.degree() + 1];
        for (i, &a) in self.coeffs.iter().enumerate().filter(|(_, &a)| a != 0) {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        HPoly { p, coeffs: out }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = HPoly::monomial(self.p, 0, 0, 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Exact division by `X`.
    pub fn div_x(&self) -> Result<Self, PolyError> {
        if self.coeffs[0] != 0 || self.degree() == 0 {
            return Err(PolyError::InexactDivision { var: 'X' });
        }
        Ok(HPoly {
            p: self.p,
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// Exact division by `Y`.
    pub fn div_y(&self) -> Result<Self, PolyError> {
        if *self.coeffs.last().unwrap() != 0 || self.degree() == 0 {
            return Err(PolyError::InexactDivision { var: 'Y' });
        }
        Ok(HPoly {
            p: self.p,
            coeffs: self.coeffs[..self.degree()].to_vec(),
        })
    }

    pub fn eval(&self, x: u64, y: u64) -> u64 {
        let p = self.p;
        let d = self.degree() as u64;
        self.coeffs
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &c)| {
                (acc + c * pow_mod(x, j as u64, p) % p * pow_mod(y, d - j as u64, p)) % p
            })
    }
}

fn pow_mod(base: u64, e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    let mut b = base % p;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// A 2×2 matrix `(a b; c d)` over `F_p`, entries reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2 {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Mat2 {
    pub fn new(p: u64, a: i64, b: i64, c: i64, d: i64) -> Self {
        let r = |v: i64| v.rem_euclid(p as i64) as u64;
        Mat2 {
            p,
            a: r(a),
            b: r(b),
            c: r(c),
            d: r(d),
        }
    }

    pub fn identity(p: u64) -> Self {
        Self::new(p, 1, 0, 0, 1)
    }

    /// `(0 1; 1 -λ)`.
    pub fn flip(p: u64, lambda: u64) -> Self {
        Self::new(p, 0, 1, 1, -(lambda as i64))
    }

    pub fn det(&self) -> u64 {
        (self.a * self.d + self.p * self.p - self.b * self.c % self.p) % self.p
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let p = self.p;
        Mat2 {
            p,
            a: (self.a * o.a + self.b * o.c) % p,
            b: (self.a * o.b + self.b * o.d) % p,
            c: (self.c * o.a + self.d * o.c) % p,
            d: (self.c * o.b + self.d * o.d) % p,
        }
    }
}

/// `m · f = f(aX + cY, bX + dY)`.
pub fn act(m: &Mat2, f: &HPoly) -> HPoly {
    let p = f.prime();
    let new_x = HPoly::linear(p, m.a as i64, m.c as i64);
    let new_y = HPoly::linear(p, m.b as i64, m.d as i64);
    let d = f.degree();
    let x_pows: Vec<HPoly> = (0..=d).scan(HPoly::monomial(p, 0, 0, 1), |acc, k| {
        let cur = acc.clone();
        if k < d {
            *acc = acc.mul(&new_x);
        }
        Some(cur)
    })
    .collect();
    let y_pows: Vec<HPoly> = (0..=d).scan(HPoly::monomial(p, 0, 0, 1), |acc, k| {
        let cur = acc.clone();
        if k < d {
            *acc = acc.mul(&new_y);
        }
        Some(cur)
    })
    .collect();
    let mut out = HPoly::zero(p, d);
    for (j, &c) in f.coeffs().iter().enumerate().filter(|(_, &c)| c != 0) {
        let term = x_pows[j].mul(&y_pows[d - j]).scale(c as i64);
        out = out.add(&term).expect("same degree");
    }
    out
}

/// The Dickson polynomial `θ = X^p Y - X Y^p`.
pub fn theta(p: u64) -> HPoly {
    let d = p as usize + 1;
    let mut f = HPoly::zero(p, d);
    f.coeffs[p as usize] = 1;
    f.coeffs[1] = p - 1;
    f
}

fn polynomial_bound(p: u64, r: u64, i: u64) -> Result<u64, PolyError> {
    if i == 0 {
        return Err(PolyError::InvalidRange("need i >= 1".into()));
    }
    let needed = i * (p + 1) - 1;
    if r < needed {
        return Err(PolyError::NotPolynomial { r, needed });
    }
    Ok(r + 1 - i * (p + 1))
}

/// `(X - λY)^{r - i(p+1) + 1} θ^i / Y`, exactly.
pub fn shallow_summand(p: u64, r: u64, i: u64, lambda: u64) -> Result<HPoly, PolyError> {
    check_prime(p)?;
    let e = polynomial_bound(p, r, i)?;
    let lin = HPoly::linear(p, 1, -(lambda as i64));
    lin.pow(e).mul(&theta(p).pow(i)).div_y()
}

/// `f_i = Y^{r - i(p+1) + 1} (-θ)^i / X`, exactly.
pub fn shallow_generator(p: u64, r: u64, i: u64) -> Result<HPoly, PolyError> {
    check_prime(p)?;
    let e = polynomial_bound(p, r, i)?;
    let y_pow = HPoly::monomial(p, e as usize, 0, 1);
    y_pow.mul(&theta(p).scale(-1).pow(i)).div_x()
}

/// The `i = 1` computation with `f = X^{p-1} Y^{r-p+1} - Y^r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PureYCheck {
    /// Coefficient of `Y^r` in `f`; a unit, so `f` projects to a generator of `F_{0,1}`.
    pub generator_coefficient: u64,
    /// `λ` values whose transformed `Y^r` coefficient `(-λ)^{r-p+1} - (-λ)^r` is nonzero.
    pub failing_lambdas: Vec<u64>,
}

pub fn pure_y_check(p: u64, r: u64) -> Result<PureYCheck, PolyError> {
    check_prime(p)?;
    if r + 1 < p {
        return Err(PolyError::InvalidRange(format!(
            "need r >= p - 1 for X^(p-1) Y^(r-p+1), got r = {r}"
        )));
    }
    let r_us = r as usize;
    let f = HPoly::monomial(p, r_us, p as usize - 1, 1)
        .sub(&HPoly::monomial(p, r_us, 0, 1))
        .expect("same degree");
    let failing_lambdas = (0..p)
        .filter(|&lambda| act(&Mat2::flip(p, lambda), &f).coeff(0) != 0)
        .collect();
    Ok(PureYCheck {
        generator_coefficient: f.coeff(0),
        failing_lambdas,
    })
}

/// Certificate that `F_{2(i-1), 2(i-1)+1}` vanishes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShallowReport {
    pub p: u64,
    pub r: u64,
    pub i: u64,
    /// Index of the killed sub-quotient, `i - 1`.
    pub killed_index: u64,
    /// Coefficient of `X^{i-1} Y^{r-i+1}` in `f_i`.
    pub generator_coefficient: u64,
    /// `(0 1; 1 -λ) · f_i` equals the summand for every `λ`.
    pub action_matches_summand: bool,
    /// Smallest `min_x_degree` over the summands; must be `>= i`.
    pub summand_min_x_degree: usize,
    /// Present when `i = 1` and `r >= p`.
    pub pure_y: Option<PureYCheck>,
    pub convention: String,
    pub passed: bool,
}

pub fn shallow_kill_check(p: u64, r: u64, i: u64) -> Result<ShallowReport, PolyError> {
    check_prime(p)?;
    if p < 5 {
        return Err(PolyError::InvalidRange(format!("need p >= 5, got {p}")));
    }
    if i == 0 || r + 1 < i * (p + 1) || r + p + 1 > p * p {
        return Err(PolyError::InvalidRange(format!(
            "need 1 <= i, i(p+1) - 1 <= r <= p^2 - p - 1; got p = {p}, r = {r}, i = {i}"
        )));
    }
    let fi = shallow_generator(p, r, i)?;
    let generator_coefficient = fi.coeff(i as usize - 1);
    let below_generator_clear = fi.min_x_degree() == Some(i as usize - 1);

    let mut action_matches_summand = true;
    let mut summand_min_x_degree = usize::MAX;
    for lambda in 0..p {
        let summand = shallow_summand(p, r, i, lambda)?;
        if act(&Mat2::flip(p, lambda), &fi) != summand {
            action_matches_summand = false;
        }
        summand_min_x_degree = summand_min_x_degree.min(summand.min_x_degree().unwrap_or(usize::MAX));
    }

    let pure_y = if i == 1 && r >= p {
        Some(pure_y_check(p, r)?)
    } else {
        None
    };
    let pure_y_ok = pure_y
        .as_ref()
        .is_none_or(|c| c.generator_coefficient != 0 && c.failing_lambdas.is_empty());

    let passed = fi.degree() as u64 == r
        && generator_coefficient != 0
        && below_generator_clear
        && action_matches_summand
        && summand_min_x_degree >= i as usize
        && pure_y_ok;
    Ok(ShallowReport {
        p,
        r,
        i,
        killed_index: i - 1,
        generator_coefficient,
        action_matches_summand,
        summand_min_x_degree,
        pure_y,
        convention: "(a b; c d) . f(X, Y) = f(aX + cY, bX + dY)".into(),
        passed,
    })
}

/// Every `(r, i)` with `1 <= i <= floor(r/p)` and `i(p+1) - 1 <= r <= p^2 - p - 1`.
pub fn shallow_sweep(p: u64) -> Result<Vec<ShallowReport>, PolyError> {
    check_prime(p)?;
    let cases: Vec<(u64, u64)> = (p..=p * p - p - 1)
        .flat_map(|r| (1..=r / p).filter(move |i| r + 1 >= i * (p + 1)).map(move |i| (r, i)))
        .collect();
    cases
        .par_iter()
        .map(|&(r, i)| shallow_kill_check(p, r, i))
        .collect()
}
