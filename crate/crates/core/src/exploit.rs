//! A uniformly random player `R` against an exploiter `X` who best-responds.
//!
//! For any tree, with `n_S` the size of component `S`:
//!
//! ```text
//! P(T) = max_v sum_{S in T - v} n_S/n * Q(S)                 (X moves first)
//! Q(T) = 1/n * sum_v (1/n + sum_{S in T - v} n_S/n * P(S))   (R moves first)
//! ```
//!
//! with `P(single) = 0` and `Q(single) = 1`. On paths the module also builds
//! the tables of the fixed "guess the second vertex" strategy (`s_n`, `p_n`,
//! `q_n`), the normalized estimates `a_k`, their spreads `b_k`, and the checks
//! that certify the limit `2a`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimal::{SolveError, GENERIC_CAP, PATH_CAP, STAR_CAP};
use crate::rational::{self, int, ratio, serde_prob, serde_prob_map, Rational};
use crate::spider::{SpiderSolver, SpiderState};
use crate::tree::{all_trees, Tree, TreeKey, MAX_ENUMERATED};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploitReport {
    /// X's win probability moving first.
    #[serde(with = "serde_prob")]
    pub p: Rational,
    /// X's win probability moving second.
    #[serde(with = "serde_prob")]
    pub q: Rational,
    pub best_first_moves: BTreeSet<usize>,
    #[serde(with = "serde_prob_map")]
    pub per_move: BTreeMap<usize, Rational>,
}

impl ExploitReport {
    fn from_parts(q: Rational, per_move: BTreeMap<usize, Rational>) -> ExploitReport {
        let p = per_move.values().max().cloned().expect("at least one move");
        let best_first_moves = per_move
            .iter()
            .filter(|(_, v)| **v == p)
            .map(|(k, _)| *k)
            .collect();
        ExploitReport {
            p,
            q,
            best_first_moves,
            per_move,
        }
    }
}

/// `(P, Q)` for paths of every length `0..=n` (index 0 unused), computed by
/// the mutual recursion in which X re-optimizes at every turn.
pub fn path_exploit_values(n: usize) -> (Vec<Rational>, Vec<Rational>) {
    let mut p = vec![Rational::zero(); n + 1];
    let mut q = vec![Rational::zero(); n + 1];
    if n >= 1 {
        q[1] = Rational::one();
    }
    for m in 2..=n {
        let mm = m as i64;
        let mut r_first = Rational::zero();
        for i in 1..=m {
            let mut branch = ratio(1, mm);
            for side in [i - 1, m - i] {
                if side > 0 {
                    branch += ratio(side as i64, mm) * &p[side];
                }
            }
            r_first += branch;
        }
        q[m] = r_first / int(mm);
        p[m] = (1..=m)
            .map(|i| path_exploit_move(&q, m, i))
            .max()
            .expect("m >= 1");
    }
    (p, q)
}

fn path_exploit_move(q: &[Rational], m: usize, i: usize) -> Rational {
    let mut total = Rational::zero();
    for side in [i - 1, m - i] {
        if side > 0 {
            total += ratio(side as i64, m as i64) * &q[side];
        }
    }
    total
}

/// X's optimal first guesses on `P_n`, X re-optimizing at every later turn.
pub fn best_first_guesses(n: usize) -> BTreeSet<usize> {
    assert!(n >= 1, "path length must be positive");
    let (_, q) = path_exploit_values(n);
    let per_move: Vec<Rational> = (1..=n).map(|i| path_exploit_move(&q, n, i)).collect();
    let best = per_move.iter().max().expect("n >= 1");
    (1..=n).filter(|&i| per_move[i - 1] == *best).collect()
}

/// `P(S_n) = (n-1)/n`, `Q(S_n) = (n^2 - 2n + 2)/n^2`.
#[allow(non_snake_case)]
pub fn star_PQ(n: usize) -> (Rational, Rational) {
    assert!(n >= 1, "star size must be positive");
    let n = n as i64;
    (ratio(n - 1, n), ratio(n * n - 2 * n + 2, n * n))
}

/// `(P, Q)` for stars by recursion over leaf removal.
fn star_exploit_values(n: usize) -> (Vec<Rational>, Vec<Rational>) {
    let (mut p, mut q) = path_exploit_values(n.min(3));
    p.resize(n + 1, Rational::zero());
    q.resize(n + 1, Rational::zero());
    for k in 4..=n {
        let kk = k as i64;
        let root = ratio(kk - 1, kk);
        let leaf = ratio(kk - 1, kk) * &q[k - 1];
        p[k] = root.max(leaf);
        let r_root = ratio(1, kk);
        let r_leaf = ratio(1, kk) + ratio(kk - 1, kk) * &p[k - 1];
        q[k] = (r_root + r_leaf * int(kk - 1)) / int(kk);
    }
    (p, q)
}

/// Memoized generic solver keyed by canonical shape.
#[derive(Default)]
pub struct ExploitSolver {
    memo: HashMap<TreeKey, (Rational, Rational)>,
}

impl ExploitSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn report(&mut self, t: &Tree) -> Result<ExploitReport, SolveError> {
        if t.n() > GENERIC_CAP {
            return Err(SolveError::TooLarge {
                n: t.n(),
                cap: GENERIC_CAP,
            });
        }
        let (_, q) = self.values(t);
        let per_move = t.vertices().map(|v| (v, self.x_move(t, v))).collect();
        Ok(ExploitReport::from_parts(q, per_move))
    }

    /// Sum over components of `n_S/n` times the chosen value of each part.
    fn weighted_parts(&mut self, t: &Tree, v: usize, pick_p: bool) -> Rational {
        let n = t.n() as i64;
        let split = t.split_at(v).expect("v is a vertex of t");
        let mut total = Rational::zero();
        for part in &split.parts {
            let (p, q) = self.values(&part.tree);
            let value = if pick_p { p } else { q };
            total += ratio(part.size() as i64, n) * value;
        }
        total
    }

    fn x_move(&mut self, t: &Tree, v: usize) -> Rational {
        self.weighted_parts(t, v, false)
    }

    fn values(&mut self, t: &Tree) -> (Rational, Rational) {
        if t.n() == 1 {
            return (Rational::zero(), Rational::one());
        }
        let key = t.canonical_key();
        if let Some(pq) = self.memo.get(&key) {
            return pq.clone();
        }
        let n = t.n() as i64;
        let mut p = Rational::zero();
        let mut r_first = Rational::zero();
        for v in t.vertices() {
            p = p.max(self.x_move(t, v));
            r_first += ratio(1, n) + self.weighted_parts(t, v, true);
        }
        let q = r_first / int(n);
        self.memo.insert(key, (p.clone(), q.clone()));
        (p, q)
    }
}

/// Generic DP regardless of shape (capped at [`GENERIC_CAP`] vertices).
pub fn exploit_values_general(t: &Tree) -> Result<ExploitReport, SolveError> {
    ExploitSolver::new().report(t)
}

/// Exploit report routed by shape: interval DP on paths, leaf-removal
/// recursion on stars, leg multisets on large spiders, generic DP otherwise.
pub fn exploit_values(t: &Tree) -> Result<ExploitReport, SolveError> {
    let n = t.n();
    if let Some(order) = t.path_order() {
        if n > PATH_CAP {
            return Err(SolveError::TooLarge { n, cap: PATH_CAP });
        }
        let (_, q) = path_exploit_values(n);
        let per_move = order
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, path_exploit_move(&q, n, i + 1)))
            .collect();
        return Ok(ExploitReport::from_parts(q[n].clone(), per_move));
    }
    if let Some(root) = t.star_root() {
        if n > STAR_CAP {
            return Err(SolveError::TooLarge { n, cap: STAR_CAP });
        }
        let (_, q) = star_exploit_values(n);
        let nn = n as i64;
        let per_move = t
            .vertices()
            .map(|v| {
                let value = if v == root {
                    ratio(nn - 1, nn)
                } else {
                    ratio(nn - 1, nn) * &q[n - 1]
                };
                (v, value)
            })
            .collect();
        return Ok(ExploitReport::from_parts(q[n].clone(), per_move));
    }
    if n > GENERIC_CAP {
        if let Some((_, legs)) = t.spider_legs() {
            let state = SpiderState::rooted(&legs)?;
            let mut solver = SpiderSolver::new();
            let q = solver.values(&state)?.q;
            let per_move = solver
                .vertex_values(t, &state)?
                .into_iter()
                .map(|(v, values)| (v, values.p))
                .collect();
            return Ok(ExploitReport::from_parts(q, per_move));
        }
    }
    exploit_values_general(t)
}

// ---------------------------------------------------------------------------
// Path tables
// ---------------------------------------------------------------------------

/// Largest table built with exact rationals.
pub const EXACT_TABLE_CAP: usize = 2000;
/// Largest table built with doubles.
pub const FLOAT_TABLE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("tables need N >= {min}, got {n}")]
    TooShort { n: usize, min: usize },
    #[error("{mode} tables are capped at N = {cap}, got {n}")]
    TooLong { n: usize, cap: usize, mode: TableMode },
    #[error("unknown table mode `{0}` (use exact or float)")]
    BadMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMode {
    Exact,
    Float,
}

impl fmt::Display for TableMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableMode::Exact => "exact",
            TableMode::Float => "float",
        })
    }
}

impl FromStr for TableMode {
    type Err = TableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(TableMode::Exact),
            "float" => Ok(TableMode::Float),
            other => Err(TableError::BadMode(other.to_string())),
        }
    }
}

/// Arithmetic the table recurrences need; implemented for exact rationals and
/// doubles.
pub trait Scalar: Clone + PartialOrd + fmt::Debug + Send + Sync {
    const MODE: TableMode;
    fn from_int(v: i64) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn over(&self, other: &Self) -> Self;
    fn abs_val(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn to_cell(&self) -> TableCell;
}

impl Scalar for Rational {
    const MODE: TableMode = TableMode::Exact;
    fn from_int(v: i64) -> Self {
        int(v)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }
    fn to_cell(&self) -> TableCell {
        TableCell {
            decimal: rational::to_f64(self),
            fraction: Some(rational::fraction_string(self)),
        }
    }
}

impl Scalar for f64 {
    const MODE: TableMode = TableMode::Float;
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_cell(&self) -> TableCell {
        TableCell {
            decimal: *self,
            fraction: None,
        }
    }
}

/// One table entry on the wire: always a decimal, plus the exact fraction in
/// exact mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub decimal: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub p: TableCell,
    pub q: TableCell,
    pub s: TableCell,
    pub a: TableCell,
}

/// Sequences for X fixed on guessing the second vertex of every path.
///
/// All vectors are indexed by `n` directly. `s[0] = 0` is the genuine empty
/// sum; `p[0]` and `q[0]` are zero placeholders; `b` runs over `0..=N-2`.
#[derive(Clone, Debug)]
pub struct PathTables<T> {
    pub n_max: usize,
    pub s: Vec<T>,
    pub p: Vec<T>,
    pub q: Vec<T>,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

/// `(s_k + 2(k+1)) / (k^2 + 7k + 6)`.
fn a_from_s<T: Scalar>(s: &T, k: usize) -> T {
    let k = k as i64;
    s.plus(&T::from_int(2 * k + 2))
        .over(&T::from_int(k * k + 7 * k + 6))
}

fn spread<T: Scalar>(x: &T, y: &T, z: &T) -> T {
    let mut best = x.minus(y).abs_val();
    for d in [y.minus(z).abs_val(), x.minus(z).abs_val()] {
        if d > best {
            best = d;
        }
    }
    best
}

fn check_table_size(n_max: usize, mode: TableMode) -> Result<(), TableError> {
    if n_max < 3 {
        return Err(TableError::TooShort { n: n_max, min: 3 });
    }
    let cap = match mode {
        TableMode::Exact => EXACT_TABLE_CAP,
        TableMode::Float => FLOAT_TABLE_CAP,
    };
    if n_max > cap {
        return Err(TableError::TooLong {
            n: n_max,
            cap,
            mode,
        });
    }
    Ok(())
}

impl<T: Scalar> PathTables<T> {
    /// Builds every sequence up to `n_max` from `s_1 = 0, s_2 = 1, s_3 = 3` and
    /// `s_n = s_{n-1} + 2 s_{n-3}/(n-2) + 2`.
    pub fn build(n_max: usize) -> Result<PathTables<T>, TableError> {
        check_table_size(n_max, T::MODE)?;
        let mut s: Vec<T> = Vec::with_capacity(n_max + 1);
        s.extend([0, 0, 1, 3].map(T::from_int));
        let two = T::from_int(2);
        for n in 4..=n_max {
            let next = two
                .plus(&s[n - 1])
                .plus(&two.times(&s[n - 3]).over(&T::from_int(n as i64 - 2)));
            s.push(next);
        }
        let mut p = vec![T::from_int(0), T::from_int(0)];
        let mut q = vec![T::from_int(0), T::from_int(1)];
        for n in 2..=n_max {
            let nn = T::from_int(n as i64);
            p.push(s[n].minus(&s[n - 1]).over(&nn));
            let inner = T::from_int(1).plus(&two.over(&nn).times(&s[n - 1]));
            q.push(T::from_int(1).over(&nn).times(&inner));
        }
        let a: Vec<T> = (0..=n_max).map(|k| a_from_s(&s[k], k)).collect();
        let b = (0..=n_max - 2)
            .map(|k| spread(&a[k], &a[k + 1], &a[k + 2]))
            .collect();
        Ok(PathTables {
            n_max,
            s,
            p,
            q,
            a,
            b,
        })
    }

    pub fn rows(&self) -> Vec<TableRow> {
        (1..=self.n_max)
            .map(|n| TableRow {
                n,
                p: self.p[n].to_cell(),
                q: self.q[n].to_cell(),
                s: self.s[n].to_cell(),
                a: self.a[n].to_cell(),
            })
            .collect()
    }

    /// `F(x) = (x-1) q_{x-1} + (k+1-x) q_{k+1-x}` for `1 <= x <= k+1`: X's win
    /// weight for guessing `x` on `P_{k+1}`, scaled by `k+1`.
    #[allow(non_snake_case)]
    pub fn F_values(&self, k: usize) -> BTreeMap<usize, T> {
        assert!(k >= 1 && k <= self.n_max, "F needs 1 <= k <= N");
        (1..=k + 1)
            .map(|x| {
                let mut total = T::from_int(0);
                for side in [x - 1, k + 1 - x] {
                    if side > 0 {
                        total = total.plus(&T::from_int(side as i64).times(&self.q[side]));
                    }
                }
                (x, total)
            })
            .collect()
    }

    pub fn f_argmax(&self, k: usize) -> BTreeSet<usize> {
        let f = self.F_values(k);
        let mut best: Option<&T> = None;
        for v in f.values() {
            if best.is_none_or(|b| v > b) {
                best = Some(v);
            }
        }
        let best = best.expect("k >= 1").clone();
        f.iter()
            .filter(|(_, v)| **v == best)
            .map(|(x, _)| *x)
            .collect()
    }
}

/// Tables in either arithmetic, for callers that pick the mode at runtime.
#[derive(Clone, Debug)]
pub enum AnyTables {
    Exact(PathTables<Rational>),
    Float(PathTables<f64>),
}

impl AnyTables {
    pub fn rows(&self) -> Vec<TableRow> {
        match self {
            AnyTables::Exact(t) => t.rows(),
            AnyTables::Float(t) => t.rows(),
        }
    }
}

pub fn path_tables(n_max: usize, mode: TableMode) -> Result<AnyTables, TableError> {
    Ok(match mode {
        TableMode::Exact => AnyTables::Exact(PathTables::build(n_max)?),
        TableMode::Float => AnyTables::Float(PathTables::build(n_max)?),
    })
}

// ---------------------------------------------------------------------------
// Limit and its certificate
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub n: usize,
    pub a_n: f64,
    /// `2 a_N`.
    pub estimate: f64,
    /// `2 b_{N-2}`: every later `a_i` stays inside the window of
    /// `a_{N-2}, a_{N-1}, a_N`.
    pub error_bound: f64,
    /// Arithmetic the window spread was computed in.
    pub certificate: TableMode,
}

/// Estimates the limiting win probability `2a` from `a_N`. Exact arithmetic
/// is used up to [`EXACT_TABLE_CAP`], otherwise a streaming double recurrence
/// holding three previous `s` values.
pub fn limit_2a(n: usize) -> Result<LimitEstimate, TableError> {
    if n < 3 {
        return Err(TableError::TooShort { n, min: 3 });
    }
    if n <= EXACT_TABLE_CAP {
        let t: PathTables<Rational> = PathTables::build(n)?;
        let a_n = rational::to_f64(&t.a[n]);
        let b = rational::to_f64(&t.b[n - 2]);
        return Ok(LimitEstimate {
            n,
            a_n,
            estimate: 2.0 * a_n,
            error_bound: 2.0 * b,
            certificate: TableMode::Exact,
        });
    }
    if n > FLOAT_TABLE_CAP {
        return Err(TableError::TooLong {
            n,
            cap: FLOAT_TABLE_CAP,
            mode: TableMode::Float,
        });
    }
    // s_{k-3}, s_{k-2}, s_{k-1}
    let mut window = [0.0f64, 1.0, 3.0];
    let mut last_a = [0.0f64; 3];
    for k in 4..=n {
        let next = 2.0 + window[2] + 2.0 * window[0] / (k as f64 - 2.0);
        window = [window[1], window[2], next];
        if k + 2 >= n {
            last_a[k + 2 - n] = a_from_s(&next, k);
        }
    }
    let a_n = last_a[2];
    Ok(LimitEstimate {
        n,
        a_n,
        estimate: 2.0 * a_n,
        error_bound: 2.0 * spread(&last_a[0], &last_a[1], &last_a[2]),
        certificate: TableMode::Float,
    })
}

fn double_factorial(x: u64) -> BigInt {
    let mut out = BigInt::one();
    let mut k = x;
    while k > 1 {
        out *= k;
        k -= 2;
    }
    out
}

fn factorial(x: u64) -> BigInt {
    (2..=x).fold(BigInt::one(), |acc, k| acc * k)
}

/// Closed-form upper bound on `b_k`: `2^l / (21 (l+1)!)` for `k = 2l`, and
/// `(15/252) 4^m / (2m+3)!!` for `k = 2m+1`.
pub fn b_bound_closed(k: usize) -> Rational {
    let half = (k / 2) as u64;
    if k % 2 == 0 {
        let num = BigInt::from(2).pow(half as u32);
        Rational::new(num, factorial(half + 1) * 21)
    } else {
        let num = BigInt::from(4).pow(half as u32) * 15;
        Rational::new(num, double_factorial(2 * half + 3) * 252)
    }
}

/// A computed quantity that disagrees with a previously published value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub quantity: String,
    pub computed: String,
    pub published: String,
    pub note: String,
}

/// Published low spread `b_2`; the definition gives `|a_2 - a_3| = 1/72`
/// while `1/120` is only `|a_4 - a_2|`.
pub const PUBLISHED_B2: (i64, i64) = (1, 120);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadReport {
    pub n_max: usize,
    /// `k` in `3..=N-2` with `b_k` above its closed-form bound.
    pub bound_violations: Vec<usize>,
    /// `k` in `3..=N-1` with `b_{k-1} > 4/(k+1) b_{k-3}`.
    pub contraction_violations: Vec<usize>,
    /// `k` in `3..=N` where the weighted-average identity fails.
    pub average_violations: Vec<usize>,
    /// `k` whose window fails to contain some later `a_i`.
    pub window_violations: Vec<usize>,
    pub low_spreads: Vec<String>,
    pub discrepancies: Vec<Discrepancy>,
}

impl SpreadReport {
    pub fn passed(&self) -> bool {
        self.bound_violations.is_empty()
            && self.contraction_violations.is_empty()
            && self.average_violations.is_empty()
            && self.window_violations.is_empty()
    }
}

/// Checks every exact-mode property of `a_k` and `b_k` on a built table.
pub fn spread_report(t: &PathTables<Rational>) -> SpreadReport {
    let n = t.n_max;
    let bound_violations = (3..=n - 2)
        .filter(|&k| t.b[k] > b_bound_closed(k))
        .collect();
    let contraction_violations = (3..=n - 1)
        .filter(|&k| t.b[k - 1] > ratio(4, k as i64 + 1) * &t.b[k - 3])
        .collect();
    let average_violations = (3..=n)
        .filter(|&k| {
            let kk = k as i64;
            let rhs = (&t.a[k - 1] * int(kk * (kk + 5)) + &t.a[k - 3] * int(2 * (kk + 3)))
                / int((kk + 6) * (kk + 1));
            rhs != t.a[k]
        })
        .collect();
    // suffix extremes of a_i for i >= k + 3
    let mut window_violations = Vec::new();
    let mut suffix_min = t.a[n].clone();
    let mut suffix_max = t.a[n].clone();
    for k in (0..n.saturating_sub(2)).rev() {
        let tail = k + 3;
        if tail <= n {
            suffix_min = suffix_min.min(t.a[tail].clone());
            suffix_max = suffix_max.max(t.a[tail].clone());
            let window = [&t.a[k], &t.a[k + 1], &t.a[k + 2]];
            let lo = window.iter().copied().min().expect("three entries");
            let hi = window.iter().copied().max().expect("three entries");
            if suffix_min < *lo || suffix_max > *hi {
                window_violations.push(k);
            }
        }
    }
    window_violations.reverse();
    let low_spreads = (0..=2.min(n - 2))
        .map(|k| format!("b_{k} = {}", rational::fraction_string(&t.b[k])))
        .collect();
    let mut discrepancies = Vec::new();
    let published = ratio(PUBLISHED_B2.0, PUBLISHED_B2.1);
    if n >= 4 && t.b[2] != published {
        discrepancies.push(Discrepancy {
            quantity: "b_2".into(),
            computed: rational::fraction_string(&t.b[2]),
            published: rational::fraction_string(&published),
            note: format!(
                "max spread of a_2, a_3, a_4 is |a_2 - a_3| = {}; the published value equals |a_4 - a_2| = {}",
                rational::fraction_string(&(&t.a[3] - &t.a[2]).abs()),
                rational::fraction_string(&(&t.a[4] - &t.a[2]).abs()),
            ),
        });
    }
    SpreadReport {
        n_max: n,
        bound_violations,
        contraction_violations,
        average_violations,
        window_violations,
        low_spreads,
        discrepancies,
    }
}

// ---------------------------------------------------------------------------
// Monotonicity and rank order
// ---------------------------------------------------------------------------

pub const MONOTONE_FROM: usize = 9;
/// Smallest table the monotonicity and rank-order checks accept.
pub const CHECK_MIN_N: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub from: usize,
    pub to: usize,
    /// First `n` with `p_{n+1} <= p_n`.
    pub p_violation: Option<usize>,
    pub q_violation: Option<usize>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.p_violation.is_none() && self.q_violation.is_none()
    }
}

fn first_non_increase<T: Scalar>(xs: &[T], from: usize, to: usize) -> Option<usize> {
    (from..to).find(|&n| xs[n + 1] <= xs[n])
}

/// `p_n` and `q_n` strictly increase over `9 <= n <= N`.
pub fn monotonicity_check<T: Scalar>(t: &PathTables<T>) -> Result<MonotonicityReport, TableError> {
    if t.n_max < CHECK_MIN_N {
        return Err(TableError::TooShort {
            n: t.n_max,
            min: CHECK_MIN_N,
        });
    }
    Ok(MonotonicityReport {
        from: MONOTONE_FROM,
        to: t.n_max,
        p_violation: first_non_increase(&t.p, MONOTONE_FROM, t.n_max),
        q_violation: first_non_increase(&t.q, MONOTONE_FROM, t.n_max),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOrderReport {
    /// `q_1 > q_4 > q_5 > q_8`, and these exceed every other `q_i`.
    pub top_four: bool,
    /// Outside `{1, 4, 5, 7, 8}`, `q` is strictly increasing in `n`.
    pub increasing_rest: bool,
    /// `q_23 > q_7 > q_22`.
    pub q7_between: bool,
}

impl RankOrderReport {
    pub fn passed(&self) -> bool {
        self.top_four && self.increasing_rest && self.q7_between
    }
}

pub fn rank_order_report<T: Scalar>(t: &PathTables<T>) -> Result<RankOrderReport, TableError> {
    if t.n_max < CHECK_MIN_N {
        return Err(TableError::TooShort {
            n: t.n_max,
            min: CHECK_MIN_N,
        });
    }
    let q = &t.q;
    let top = [1usize, 4, 5, 8];
    let chain = top.windows(2).all(|w| q[w[0]] > q[w[1]]);
    let dominates = (1..=t.n_max)
        .filter(|i| !top.contains(i))
        .all(|i| q[i] < q[8]);
    let rest: Vec<usize> = (1..=t.n_max)
        .filter(|i| ![1, 4, 5, 7, 8].contains(i))
        .collect();
    let increasing_rest = rest.windows(2).all(|w| q[w[1]] > q[w[0]]);
    Ok(RankOrderReport {
        top_four: chain && dominates,
        increasing_rest,
        q7_between: q[23] > q[7] && q[7] > q[22],
    })
}

pub fn rank_order_check<T: Scalar>(t: &PathTables<T>) -> Result<bool, TableError> {
    Ok(rank_order_report(t)?.passed())
}

// ---------------------------------------------------------------------------
// Stars dominate
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceViolation {
    pub tree: String,
    #[serde(with = "serde_prob")]
    pub p: Rational,
    #[serde(with = "serde_prob")]
    pub q: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub n_max: usize,
    /// `(n, number of isomorphism classes checked)`.
    pub classes: Vec<(usize, usize)>,
    pub violations: Vec<DominanceViolation>,
}

impl DominanceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `P(T) <= P(S_n)` and `Q(T) <= Q(S_n)` on every unlabeled tree with
/// at most `n_max` vertices.
pub fn dominance_check(n_max: usize) -> Result<DominanceReport, SolveError> {
    if n_max > MAX_ENUMERATED {
        return Err(SolveError::TooLarge {
            n: n_max,
            cap: MAX_ENUMERATED,
        });
    }
    let mut solver = ExploitSolver::new();
    let mut classes = Vec::new();
    let mut violations = Vec::new();
    for n in 1..=n_max {
        let trees = all_trees(n)?;
        let (star_p, star_q) = star_PQ(n);
        for t in &trees {
            let (p, q) = solver.values(t);
            if p > star_p || q > star_q {
                violations.push(DominanceViolation {
                    tree: t.to_string(),
                    p,
                    q,
                });
            }
        }
        classes.push((n, trees.len()));
    }
    Ok(DominanceReport {
        n_max,
        classes,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{make_path, make_spider, make_star, Tree};

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn small_reports() {
        let r = exploit_values(&make_path(3).unwrap()).unwrap();
        assert_eq!((r.p.clone(), r.q.clone()), (ratio(2, 3), ratio(5, 9)));
        assert_eq!(r.best_first_moves, set(&[2]));
        let r = exploit_values(&Tree::single()).unwrap();
        assert_eq!((r.p, r.q), (ratio(0, 1), ratio(1, 1)));
        let r = exploit_values(&make_star(5).unwrap()).unwrap();
        assert_eq!((r.p, r.q), (ratio(4, 5), ratio(17, 25)));
    }

    #[test]
    fn routes_agree_with_generic() {
        for n in 1..=10 {
            for t in [make_path(n).unwrap(), make_star(n).unwrap()] {
                assert_eq!(exploit_values(&t).unwrap(), exploit_values_general(&t).unwrap());
            }
        }
    }

    #[test]
    fn star_closed_form() {
        assert_eq!(star_PQ(10), (ratio(9, 10), ratio(41, 50)));
        assert_eq!(star_PQ(2), (ratio(1, 2), ratio(1, 2)));
        let (p, q) = star_PQ(1_000_000);
        assert!(1.0 - rational::to_f64(&p) < 1e-5);
        assert!(1.0 - rational::to_f64(&q) < 1e-5);
    }

    #[test]
    fn exact_table_values() {
        let t: PathTables<Rational> = PathTables::build(5).unwrap();
        assert_eq!(t.p[5], ratio(8, 15));
        assert_eq!(t.s[5], ratio(23, 3));
        assert_eq!(t.q[3], ratio(5, 9));
        let t: PathTables<Rational> = PathTables::build(4).unwrap();
        let expected = [ratio(1, 3), ratio(2, 7), ratio(7, 24), ratio(11, 36), ratio(3, 10)];
        assert_eq!(t.a, expected.to_vec());
        assert_eq!(t.b[0], ratio(1, 21));
        assert_eq!(t.b[1], ratio(5, 252));
        assert_eq!(t.b[2], ratio(1, 72));
    }

    #[test]
    fn float_table_values() {
        let t: PathTables<f64> = PathTables::build(24).unwrap();
        assert!((t.q[10] - 0.5982539682539684).abs() < 1e-15);
        assert!((t.s[24] - 174.58339143224384).abs() < 1e-12);
    }

    #[test]
    fn table_errors() {
        assert!(matches!(path_tables(2, TableMode::Exact), Err(TableError::TooShort { .. })));
        assert!(matches!(path_tables(2001, TableMode::Exact), Err(TableError::TooLong { .. })));
        assert!("fixed".parse::<TableMode>().is_err());
        let short: PathTables<f64> = PathTables::build(20).unwrap();
        assert!(monotonicity_check(&short).is_err());
    }

    #[test]
    fn closed_bounds() {
        assert_eq!(b_bound_closed(0), ratio(1, 21));
        assert_eq!(b_bound_closed(1), ratio(5, 252));
        assert_eq!(b_bound_closed(4), ratio(2, 63));
        let t: PathTables<Rational> = PathTables::build(8).unwrap();
        assert!(t.b[4] <= b_bound_closed(4));
    }

    #[test]
    fn spread_report_flags_b2() {
        let t: PathTables<Rational> = PathTables::build(60).unwrap();
        let r = spread_report(&t);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.discrepancies.len(), 1);
        assert_eq!(r.discrepancies[0].computed, "1/72");
        assert_eq!(r.discrepancies[0].published, "1/120");
    }

    #[test]
    fn monotone_and_ranked() {
        let t: PathTables<Rational> = PathTables::build(24).unwrap();
        assert!(monotonicity_check(&t).unwrap().passed());
        // q dips from 8 to 9 before the threshold
        assert!(t.q[8] > t.q[9]);
        let r = rank_order_report(&t).unwrap();
        assert!(r.passed(), "{r:?}");
        let f: PathTables<f64> = PathTables::build(1000).unwrap();
        assert!(monotonicity_check(&f).unwrap().passed());
    }

    #[test]
    fn f_values() {
        let t: PathTables<Rational> = PathTables::build(30).unwrap();
        let f = t.F_values(3);
        assert_eq!(f[&2], int(2));
        assert_eq!(t.f_argmax(3), set(&[2, 3]));
        assert_eq!(t.f_argmax(9), set(&[2, 9]));
        for k in 1..=30 {
            let f = t.F_values(k);
            for x in 1..=k + 1 {
                assert_eq!(f[&x], f[&(k + 2 - x)]);
            }
        }
    }

    #[test]
    fn first_guesses() {
        assert_eq!(best_first_guesses(2), set(&[1, 2]));
        assert_eq!(best_first_guesses(1), set(&[1]));
        for n in 3..=30 {
            assert_eq!(best_first_guesses(n), set(&[2, n - 1]), "n = {n}");
        }
    }

    #[test]
    fn limit_small() {
        let est = limit_2a(100).unwrap();
        assert_eq!(est.certificate, TableMode::Exact);
        assert!((est.estimate - 0.598889043819424).abs() < 1e-14);
        assert!(est.error_bound >= 0.0 && est.error_bound <= 2.0 * rational::to_f64(&b_bound_closed(98)));
    }

    #[test]
    fn dominance_small() {
        let r = dominance_check(7).unwrap();
        assert!(r.passed());
        assert_eq!(r.classes.last(), Some(&(7, 11)));
        let q = exploit_values(&make_path(5).unwrap()).unwrap().q;
        assert_eq!(q, ratio(3, 5));
        assert!(q <= star_PQ(5).1);
    }

    #[test]
    fn path_symmetry() {
        for n in 1..=20 {
            let r = exploit_values(&make_path(n).unwrap()).unwrap();
            for m in 1..=n {
                assert_eq!(r.per_move[&m], r.per_move[&(n + 1 - m)]);
            }
        }
    }

    #[test]
    fn big_spider_routes() {
        let t = make_spider(&[6, 5, 3]).unwrap();
        let r = exploit_values(&t).unwrap();
        assert!(r.p > Rational::zero() && r.q > Rational::zero());
    }
}
