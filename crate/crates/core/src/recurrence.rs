//! Polynomial solutions of the path recurrence and its homogenized form.
//!
//! Shifting the recurrence `s_n = s_{n-1} + 2 s_{n-3}/(n-2) + 2` and
//! subtracting removes the constant, giving the order-four recurrence
//!
//! ```text
//! s_{n+4} - 2 s_{n+3} + s_{n+2} - 2/(n+2) s_{n+1} + 2/(n+1) s_n = 0
//! ```
//!
//! or, with denominators cleared, `sum_i p_i(n) s_{n+i} = 0`. The six choices
//! of monic factors `A | p_0(n)` and `B | p_4(n-3)` are run through the
//! hypergeometric search: leading coefficients `alpha_i`, the characteristic
//! roots `Z`, the degree bound from the `b_j^{(s)}` schedule and finally an
//! exact solve for polynomial solutions.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::rational::{fraction_string, int, ratio, Rational};

/// Polynomial in one variable with exact rational coefficients, lowest
/// degree first. Trailing zeros are always trimmed; zero is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// `n + c`.
    pub fn linear(c: i64) -> Self {
        Self::from_ints(&[c, 1])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `n^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `p(n + k)`.
    pub fn shift(&self, k: i64) -> Self {
        let step = Self::linear(k);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * &step) + &Self::constant(c.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lead) => self.scale(&(Rational::one() / lead)),
            None => Self::zero(),
        }
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().expect("nonzero").clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(d)];
        while rem.len() > d && !rem.is_empty() {
            let k = rem.len() - 1 - d;
            let factor = rem.last().expect("nonempty") / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &factor * c;
            }
            quot[k] = factor;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor; zero only when both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `binom(N, j)` as a polynomial in `N`.
    pub fn binomial(j: usize) -> Self {
        let mut out = Self::one();
        for t in 0..j {
            out = &out * &Self::linear(-(t as i64));
        }
        out.scale(&(Rational::one() / factorial(j)))
    }

    /// Distinct rational roots, ascending. The zero polynomial has none by
    /// convention.
    pub fn rational_roots(&self) -> Vec<Rational> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let mut roots = BTreeSet::new();
        let lowest = self.coeffs.iter().position(|c| !c.is_zero()).expect("nonzero");
        if lowest > 0 {
            roots.insert(Rational::zero());
        }
        let ints = integer_coefficients(&self.coeffs[lowest..]);
        let (c0, cn) = (ints[0].abs(), ints.last().expect("nonzero").abs());
        for p in divisors(&c0) {
            for q in divisors(&cn) {
                for sign in [1, -1] {
                    let x = Rational::new(p.clone() * sign, q.clone());
                    if self.eval(&x).is_zero() {
                        roots.insert(x);
                    }
                }
            }
        }
        roots.into_iter().collect()
    }
}

fn factorial(j: usize) -> Rational {
    (1..=j as i64).fold(Rational::one(), |acc, k| acc * int(k))
}

/// Scales rational coefficients to coprime integers.
fn integer_coefficients(coeffs: &[Rational]) -> Vec<BigInt> {
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    coeffs
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect()
}

fn divisors(x: &BigInt) -> Vec<BigInt> {
    let x = x.to_u64().expect("coefficients stay small");
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= x {
        if x % d == 0 {
            out.push(BigInt::from(d));
            if d * d != x {
                out.push(BigInt::from(x / d));
            }
        }
        d += 1;
    }
    out
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, other: &RationalPolynomial) -> RationalPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        RationalPolynomial::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, other: &RationalPolynomial) -> RationalPolynomial {
        self + &(-other)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, other: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || other.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let mag_text = if mag.is_integer() {
                fraction_string(&mag)
            } else {
                format!("({})", fraction_string(&mag))
            };
            match k {
                0 => f.write_str(&mag_text)?,
                _ => {
                    if !mag.is_one() {
                        f.write_str(&mag_text)?;
                    }
                    f.write_str("n")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for RationalPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperError {
    #[error("`{0}` is not a factor choice; use 1, n+2, n-1 or n-2")]
    BadFactor(String),
    #[error("({a}, {b}) is not one of the six factor cases")]
    UnsupportedCase { a: String, b: String },
    #[error("polynomial search is capped at degree {cap}, got {degree}")]
    DegreeTooLarge { degree: usize, cap: usize },
}

/// Parses `1`, `n`, `n+k` or `n-k`.
impl FromStr for RationalPolynomial {
    type Err = HyperError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || HyperError::BadFactor(s.to_string());
        if let Ok(c) = text.parse::<i64>() {
            return Ok(Self::from_ints(&[c]));
        }
        let rest = text.strip_prefix('n').ok_or_else(bad)?;
        if rest.is_empty() {
            return Ok(Self::linear(0));
        }
        let c: i64 = rest
            .strip_prefix('+')
            .unwrap_or(rest)
            .parse()
            .map_err(|_| bad())?;
        Ok(Self::linear(c))
    }
}

// ---------------------------------------------------------------------------
// Residual checks
// ---------------------------------------------------------------------------

/// `S(n) = a n^2 + (7a - 2) n + (6a - 2)`.
pub fn quadratic_family(a_star: &Rational) -> RationalPolynomial {
    let two = int(2);
    RationalPolynomial::new(vec![
        a_star * int(6) - &two,
        a_star * int(7) - &two,
        a_star.clone(),
    ])
}

/// `S(n) - [S(n-1) + 2/(n-2) S(n-3) + 2]` for the quadratic family.
pub fn quadratic_family_residual(a_star: &Rational, n: i64) -> Rational {
    assert!(n >= 4, "the recurrence starts at n = 4");
    let s = quadratic_family(a_star);
    let at = |k: i64| s.eval(&int(k));
    at(n) - (at(n - 1) + ratio(2, n - 2) * at(n - 3) + int(2))
}

/// Residual of the homogenized recurrence at `n` for any sequence defined on
/// `n..=n+4`.
pub fn auxiliary_residual<F: Fn(usize) -> Rational>(s: F, n: usize) -> Rational {
    let nn = n as i64;
    s(n + 4) - int(2) * s(n + 3) + s(n + 2) - ratio(2, nn + 2) * s(n + 1)
        + ratio(2, nn + 1) * s(n)
}

/// Cleared coefficients `p_0..p_4` of the homogenized recurrence.
pub fn base_coefficients() -> [RationalPolynomial; 5] {
    let n1 = RationalPolynomial::linear(1);
    let n2 = RationalPolynomial::linear(2);
    let n12 = &n1 * &n2;
    [
        n2.scale(&int(2)),
        n1.scale(&int(-2)),
        n12.clone(),
        n12.scale(&int(-2)),
        n12,
    ]
}

/// The published `p_4(n) = (n+1)(n-2)`.
pub fn published_p4() -> RationalPolynomial {
    &RationalPolynomial::linear(1) * &RationalPolynomial::linear(-2)
}

/// `sum_i coeffs[i](n) * c(n + i)` as a polynomial in `n`.
pub fn apply_recurrence(coeffs: &[RationalPolynomial], c: &RationalPolynomial) -> RationalPolynomial {
    coeffs
        .iter()
        .enumerate()
        .fold(RationalPolynomial::zero(), |acc, (i, p)| {
            &acc + &(p * &c.shift(i as i64))
        })
}

pub const MAX_SEARCH_DEGREE: usize = 6;

/// Basis of polynomials `C` with `deg C <= max_degree` and
/// `sum_i coeffs[i](n) C(n+i) = 0`, by exact elimination on coefficients.
/// The basis is reduced: leading coefficients are one and no basis element
/// contains another's leading monomial.
pub fn polynomial_kernel(coeffs: &[RationalPolynomial], max_degree: usize) -> Vec<RationalPolynomial> {
    // column k holds the image of n^k
    let images: Vec<RationalPolynomial> = (0..=max_degree)
        .map(|k| {
            let mut mono = vec![Rational::zero(); k + 1];
            mono[k] = Rational::one();
            apply_recurrence(coeffs, &RationalPolynomial::new(mono))
        })
        .collect();
    let rows = images
        .iter()
        .map(|p| p.coeffs.len())
        .max()
        .unwrap_or(0);
    // columns ordered from the highest degree so pivots land on leading terms
    let cols: Vec<usize> = (0..=max_degree).rev().collect();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|r| cols.iter().map(|&k| images[k].coeff(r)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols.len() {
        let Some(found) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, found);
        let inv = Rational::one() / &m[row][col];
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..cols.len() {
                    let delta = &factor * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols.len()).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols.len()];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect();
    reduce_basis(&mut basis);
    let mut out: Vec<RationalPolynomial> = basis
        .into_iter()
        .map(|v| {
            let mut coeffs = vec![Rational::zero(); max_degree + 1];
            for (i, &k) in cols.iter().enumerate() {
                coeffs[k] = v[i].clone();
            }
            RationalPolynomial::new(coeffs)
        })
        .collect();
    out.sort_by_key(|p| std::cmp::Reverse(p.degree()));
    out
}

/// Row-reduces kernel vectors so each leads with a one in a distinct column.
fn reduce_basis(basis: &mut [Vec<Rational>]) {
    let width = basis.first().map_or(0, Vec::len);
    let mut row = 0;
    for col in 0..width {
        let Some(found) = (row..basis.len()).find(|&r| !basis[r][col].is_zero()) else {
            continue;
        };
        basis.swap(row, found);
        let inv = Rational::one() / &basis[row][col];
        for x in basis[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..basis.len() {
            if r != row && !basis[r][col].is_zero() {
                let factor = basis[r][col].clone();
                for c in 0..width {
                    let delta = &factor * &basis[row][c];
                    basis[r][c] -= delta;
                }
            }
        }
        row += 1;
    }
}

/// Polynomial solutions of the homogenized recurrence up to `max_degree`.
pub fn poly_solutions(max_degree: usize) -> Result<Vec<RationalPolynomial>, HyperError> {
    if max_degree > MAX_SEARCH_DEGREE {
        return Err(HyperError::DegreeTooLarge {
            degree: max_degree,
            cap: MAX_SEARCH_DEGREE,
        });
    }
    Ok(polynomial_kernel(&base_coefficients(), max_degree))
}

/// Rank of the coefficient vectors of `polys`.
fn rank(polys: &[RationalPolynomial]) -> usize {
    let width = polys.iter().map(|p| p.coeffs.len()).max().unwrap_or(0);
    let mut rows: Vec<Vec<Rational>> = polys
        .iter()
        .map(|p| (0..width).map(|k| p.coeff(k)).collect())
        .collect();
    reduce_basis(&mut rows);
    rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).count()
}

/// True when the two lists span the same vector space of polynomials.
pub fn same_span(a: &[RationalPolynomial], b: &[RationalPolynomial]) -> bool {
    let joint: Vec<RationalPolynomial> = a.iter().chain(b).cloned().collect();
    let r = rank(&joint);
    r == rank(a) && r == rank(b)
}

// ---------------------------------------------------------------------------
// Hypergeometric casework
// ---------------------------------------------------------------------------

/// One polynomial search after a characteristic root `Z` is fixed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyStep {
    #[serde(serialize_with = "ser_rational")]
    pub z: Rational,
    /// Common factor removed from the `Z^i P_i`.
    pub common_factor: RationalPolynomial,
    /// Coefficients `sum_i Z^i P_i / common_factor` multiplying `C(n+i)`.
    pub reduced: Vec<RationalPolynomial>,
    /// Highest degree among the reduced coefficients.
    pub top_degree: usize,
    /// First `s` with a nonzero `b_j^{(s)}`.
    pub step: usize,
    #[serde(serialize_with = "ser_rationals")]
    pub b_values: Vec<Rational>,
    pub n_polynomial: RationalPolynomial,
    /// Largest nonnegative integer root of the `N`-polynomial.
    pub degree_bound: Option<usize>,
    pub solutions: Vec<RationalPolynomial>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub a_choice: RationalPolynomial,
    pub b_choice: RationalPolynomial,
    #[serde(rename = "P")]
    pub p: Vec<RationalPolynomial>,
    pub m: usize,
    #[serde(serialize_with = "ser_rationals")]
    pub alphas: Vec<Rational>,
    #[serde(serialize_with = "ser_rationals")]
    pub z_roots: Vec<Rational>,
    pub steps: Vec<PolyStep>,
    /// `N`-polynomial of the first step, if any root was found.
    pub n_polynomial: Option<RationalPolynomial>,
    pub poly_solutions: Vec<RationalPolynomial>,
}

fn ser_rational<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fraction_string(x))
}

fn ser_rationals<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(fraction_string))
}

/// Allowed `A` and `B` factor choices.
pub fn case_choices() -> Vec<(RationalPolynomial, RationalPolynomial)> {
    let a_choices = [RationalPolynomial::linear(2), RationalPolynomial::one()];
    let b_choices = [
        RationalPolynomial::linear(-1),
        RationalPolynomial::linear(-2),
        RationalPolynomial::one(),
    ];
    a_choices
        .iter()
        .flat_map(|a| b_choices.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

/// `P_i(n) = p_i(n) prod_{j<i} A(n+j) prod_{i<=j<4} B(n+j)`.
pub fn case_polynomials(a: &RationalPolynomial, b: &RationalPolynomial) -> Vec<RationalPolynomial> {
    base_coefficients()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut out = p.clone();
            for j in 0..4 {
                let factor = if j < i { a } else { b };
                out = &out * &factor.shift(j as i64);
            }
            out
        })
        .collect()
}

fn poly_step(p: &[RationalPolynomial], z: &Rational) -> PolyStep {
    let weighted: Vec<RationalPolynomial> = p
        .iter()
        .enumerate()
        .map(|(i, pi)| pi.scale(&num::pow(z.clone(), i)))
        .collect();
    let common_factor = weighted
        .iter()
        .fold(RationalPolynomial::zero(), |g, q| g.gcd(q));
    let reduced: Vec<RationalPolynomial> = weighted
        .iter()
        .map(|q| q.div_rem(&common_factor).0)
        .collect();
    let top_degree = reduced
        .iter()
        .filter_map(RationalPolynomial::degree)
        .max()
        .unwrap_or(0);
    // c_{i,j}: coefficient of n^{top - j} in reduced[i]
    let c = |i: usize, j: usize| -> Rational {
        if j > top_degree {
            Rational::zero()
        } else {
            reduced[i].coeff(top_degree - j)
        }
    };
    let b_value = |s: usize, j: usize| -> Rational {
        (0..reduced.len())
            .map(|i| num::pow(int(i as i64), j) * c(i, s - j))
            .fold(Rational::zero(), |acc, x| acc + x)
    };
    let mut step = 0;
    let b_values = loop {
        let values: Vec<Rational> = (0..=step).map(|j| b_value(step, j)).collect();
        if values.iter().any(|v| !v.is_zero()) || step > top_degree + reduced.len() {
            break values;
        }
        step += 1;
    };
    let n_polynomial = b_values
        .iter()
        .enumerate()
        .fold(RationalPolynomial::zero(), |acc, (j, b)| {
            &acc + &RationalPolynomial::binomial(j).scale(b)
        });
    let degree_bound = n_polynomial
        .rational_roots()
        .into_iter()
        .filter(|r| r.is_integer() && !r.is_negative())
        .filter_map(|r| r.to_integer().to_usize())
        .max();
    let solutions = match degree_bound {
        Some(d) => polynomial_kernel(&reduced, d),
        None => Vec::new(),
    };
    PolyStep {
        z: z.clone(),
        common_factor,
        reduced,
        top_degree,
        step,
        b_values,
        n_polynomial,
        degree_bound,
        solutions,
    }
}

/// Runs one of the six factor cases.
pub fn hyper_case(a: &RationalPolynomial, b: &RationalPolynomial) -> Result<CaseResult, HyperError> {
    if !case_choices().iter().any(|(ca, cb)| ca == a && cb == b) {
        return Err(HyperError::UnsupportedCase {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    let p = case_polynomials(a, b);
    let m = p.iter().filter_map(RationalPolynomial::degree).max().unwrap_or(0);
    let alphas: Vec<Rational> = p.iter().map(|pi| pi.coeff(m)).collect();
    let characteristic = RationalPolynomial::new(alphas.clone());
    let z_roots: Vec<Rational> = characteristic
        .rational_roots()
        .into_iter()
        .filter(|z| !z.is_zero())
        .collect();
    let steps: Vec<PolyStep> = z_roots.iter().map(|z| poly_step(&p, z)).collect();
    let n_polynomial = steps.first().map(|s| s.n_polynomial.clone());
    let poly_solutions = steps.iter().flat_map(|s| s.solutions.clone()).collect();
    Ok(CaseResult {
        a_choice: a.clone(),
        b_choice: b.clone(),
        p,
        m,
        alphas,
        z_roots,
        steps,
        n_polynomial,
        poly_solutions,
    })
}

pub fn all_cases() -> Vec<CaseResult> {
    case_choices()
        .iter()
        .map(|(a, b)| hyper_case(a, b).expect("listed cases are supported"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub errata: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn find_case<'a>(cases: &'a [CaseResult], a: i64, b: Option<i64>) -> &'a CaseResult {
    let a = if a == 0 {
        RationalPolynomial::one()
    } else {
        RationalPolynomial::linear(a)
    };
    let b = b.map_or_else(RationalPolynomial::one, RationalPolynomial::linear);
    cases
        .iter()
        .find(|c| c.a_choice == a && c.b_choice == b)
        .expect("case exists")
}

/// Reruns the casework and reports each published intermediate value.
pub fn verify() -> VerifyReport {
    let cases = all_cases();
    let mut checks = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        })
    };

    let with_solutions: Vec<&CaseResult> =
        cases.iter().filter(|c| !c.poly_solutions.is_empty()).collect();
    check(
        "exactly one case yields solutions",
        with_solutions.len() == 1,
        format!("{} case(s) with solutions", with_solutions.len()),
    );
    let found: Vec<RationalPolynomial> =
        cases.iter().flat_map(|c| c.poly_solutions.clone()).collect();
    let reference = poly_solutions(MAX_SEARCH_DEGREE).expect("within cap");
    let reference_basis = [
        RationalPolynomial::from_ints(&[6, 7, 1]),
        RationalPolynomial::from_ints(&[1, 1]),
    ];
    check(
        "hypergeometric solutions span the polynomial kernel",
        same_span(&found, &reference) && same_span(&found, &reference_basis),
        format!(
            "found [{}], kernel up to degree {MAX_SEARCH_DEGREE} [{}]",
            join(&found),
            join(&reference)
        ),
    );

    for (b, expect_n, expect_b) in [(-1, [2, 3, 1], [2, 4, 2]), (-2, [6, 5, 1], [6, 6, 2])] {
        let case = find_case(&cases, 2, Some(b));
        let step = case.steps.first();
        let b_ok = step.is_some_and(|s| {
            s.step == 2 && s.b_values == expect_b.iter().map(|&x| int(x)).collect::<Vec<_>>()
        });
        let n_ok = case.n_polynomial == Some(RationalPolynomial::from_ints(&expect_n));
        check(
            &format!("case A = n+2, B = n{b}: b-values, N-polynomial, no solutions"),
            b_ok && n_ok && case.poly_solutions.is_empty(),
            format!(
                "b = [{}], N-polynomial {}",
                step.map(|s| s.b_values.iter().map(fraction_string).collect::<Vec<_>>().join(", "))
                    .unwrap_or_default(),
                case.n_polynomial.as_ref().map(ToString::to_string).unwrap_or_default()
            ),
        );
    }

    let unit = find_case(&cases, 0, None);
    check(
        "case A = B = 1: alphas (0, 0, 1, -2, 1) and root Z = 1",
        unit.alphas == [0, 0, 1, -2, 1].map(int).to_vec() && unit.z_roots == vec![int(1)],
        format!("m = {}", unit.m),
    );
    for (a, b) in [(0, Some(-1)), (0, Some(-2)), (2, None)] {
        let case = find_case(&cases, a, b);
        let nonzero: Vec<usize> = (0..5).filter(|&i| !case.alphas[i].is_zero()).collect();
        let expected = if a == 0 { vec![0] } else { vec![4] };
        check(
            &format!("degenerate case A = {}, B = {}", case.a_choice, case.b_choice),
            nonzero == expected && case.z_roots.is_empty(),
            format!(
                "m = {}, alphas = [{}]",
                case.m,
                case.alphas.iter().map(fraction_string).collect::<Vec<_>>().join(", ")
            ),
        );
    }

    let quad = RationalPolynomial::from_ints(&[6, 7, 1]);
    let mut published = base_coefficients();
    published[4] = published_p4();
    check(
        "published p_4 does not admit the quadratic solution",
        !apply_recurrence(&published, &quad).is_zero()
            && apply_recurrence(&base_coefficients(), &quad).is_zero(),
        format!("residual with published p_4: {}", apply_recurrence(&published, &quad)),
    );

    let degenerate = find_case(&cases, 0, Some(-1));
    let errata = vec![
        format!(
            "p_4(n) is (n+1)(n+2); the printed {} contradicts the factors n-1, n-2 of p_4(n-3)",
            published_p4()
        ),
        format!(
            "in the cases A = 1, B = n-1 and A = 1, B = n-2 the leading coefficient alpha_0 is {} (printed 1); only its nonvanishing matters",
            fraction_string(&degenerate.alphas[0])
        ),
    ];
    VerifyReport { checks, errata }
}

fn join(polys: &[RationalPolynomial]) -> String {
    polys.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> RationalPolynomial {
        RationalPolynomial::from_ints(c)
    }

    #[test]
    fn arithmetic() {
        let a = poly(&[1, 1]);
        let b = poly(&[-1, 1]);
        assert_eq!(&a * &b, poly(&[-1, 0, 1]));
        assert_eq!(&a - &a, RationalPolynomial::zero());
        assert_eq!(poly(&[0, 0, 1]).shift(1), poly(&[1, 2, 1]));
        let (q, r) = poly(&[6, 7, 1]).div_rem(&a);
        assert_eq!((q, r), (poly(&[6, 1]), RationalPolynomial::zero()));
        assert_eq!(poly(&[6, 7, 1]).gcd(&poly(&[2, 3, 1])), a);
        assert_eq!(RationalPolynomial::binomial(2), RationalPolynomial::new(vec![
            Rational::zero(),
            ratio(-1, 2),
            ratio(1, 2)
        ]));
        assert_eq!(poly(&[0, 0]).degree(), None);
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(poly(&[6, 7, 1]).to_string(), "n^2 + 7n + 6");
        assert_eq!(poly(&[2, -3, -1]).to_string(), "-n^2 - 3n + 2");
        assert_eq!(RationalPolynomial::new(vec![ratio(1, 2)]).to_string(), "(1/2)");
        assert_eq!("n-1".parse::<RationalPolynomial>().unwrap(), poly(&[-1, 1]));
        assert_eq!("n + 2".parse::<RationalPolynomial>().unwrap(), poly(&[2, 1]));
        assert_eq!("1".parse::<RationalPolynomial>().unwrap(), poly(&[1]));
        assert!("m+1".parse::<RationalPolynomial>().is_err());
    }

    #[test]
    fn roots() {
        assert_eq!(poly(&[2, -3, 1]).rational_roots(), vec![int(1), int(2)]);
        assert_eq!(poly(&[2, 3, 1]).rational_roots(), vec![int(-2), int(-1)]);
        assert_eq!(poly(&[0, 0, 1, -2, 1]).rational_roots(), vec![int(0), int(1)]);
        assert_eq!(poly(&[-1, 2]).rational_roots(), vec![ratio(1, 2)]);
        assert!(poly(&[1, 0, 1]).rational_roots().is_empty());
    }

    #[test]
    fn quadratic_residuals() {
        assert!(quadratic_family_residual(&ratio(1, 3), 10).is_zero());
        assert!(quadratic_family_residual(&int(0), 7).is_zero());
        for n in 4..100 {
            assert!(quadratic_family_residual(&ratio(5, 7), n).is_zero());
        }
    }

    #[test]
    fn auxiliary_residuals() {
        let t: crate::exploit::PathTables<Rational> = crate::exploit::PathTables::build(20).unwrap();
        for n in 0..=16 {
            assert!(auxiliary_residual(|k| t.s[k].clone(), n).is_zero());
        }
        for n in 0..30 {
            assert!(auxiliary_residual(|k| int(k as i64 + 1), n).is_zero());
            let k2 = |k: usize| int((k * k + 7 * k + 6) as i64);
            assert!(auxiliary_residual(k2, n).is_zero());
        }
        assert!(!auxiliary_residual(|_| int(1), 3).is_zero());
    }

    #[test]
    fn kernel() {
        let sols = poly_solutions(3).unwrap();
        assert_eq!(sols.len(), 2);
        assert!(same_span(&sols, &[poly(&[6, 7, 1]), poly(&[1, 1])]));
        assert_eq!(poly_solutions(6).unwrap().len(), 2);
        assert!(poly_solutions(0).unwrap().is_empty());
        assert!(poly_solutions(7).is_err());
    }

    #[test]
    fn reference_polynomials() {
        // A = n+2, B = n-1
        let p = case_polynomials(&poly(&[2, 1]), &poly(&[-1, 1]));
        let n = |c: i64| poly(&[c, 1]);
        let expected_p0 = &(&(&n(-1) * &n(0)) * &n(1)) * &n(2).pow(2);
        assert_eq!(p[0], expected_p0.scale(&int(2)));
        let step = &hyper_case(&poly(&[2, 1]), &poly(&[-1, 1])).unwrap().steps[0];
        assert_eq!(step.common_factor, &n(1) * &n(2).pow(2));
        assert_eq!(step.reduced[0], poly(&[0, -2, 2]));
        assert_eq!(step.reduced[4], poly(&[60, 47, 12, 1]));
    }

    #[test]
    fn six_cases() {
        let cases = all_cases();
        assert_eq!(cases.len(), 6);
        let unit = hyper_case(&poly(&[1]), &poly(&[1])).unwrap();
        assert_eq!(unit.n_polynomial, Some(poly(&[2, -3, 1])));
        assert!(same_span(&unit.poly_solutions, &[poly(&[6, 7, 1]), poly(&[1, 1])]));
        let c = hyper_case(&poly(&[2, 1]), &poly(&[-2, 1])).unwrap();
        assert_eq!(c.n_polynomial, Some(poly(&[6, 5, 1])));
        assert!(c.poly_solutions.is_empty());
        let d = hyper_case(&poly(&[1]), &poly(&[-1, 1])).unwrap();
        assert_eq!(d.m, 5);
        assert_eq!(d.alphas, [2, 0, 0, 0, 0].map(int).to_vec());
        assert!(d.z_roots.is_empty());
        assert!(hyper_case(&poly(&[3, 1]), &poly(&[1])).is_err());
    }

    #[test]
    fn verify_report() {
        let r = verify();
        assert!(r.passed(), "{:#?}", r.checks);
        assert_eq!(r.errata.len(), 2);
    }
}
