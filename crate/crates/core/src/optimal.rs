//! Two optimal players.
//!
//! The first mover's win probability satisfies
//! `W(T) = max_v sum_{S in T - v} |S|/n * (1 - W(S))` with `W(single) = 0`:
//! guessing the mine (weight `1/n`) loses outright, otherwise the opponent
//! moves first on the component that holds the mine.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{ratio, serde_prob, serde_prob_map, Rational};
use crate::spider::{SpiderError, SpiderSolver, SpiderState};
use crate::tree::{Tree, TreeError, TreeKey};

/// Largest generic (non path/star/spider) tree the memoized DP accepts.
pub const GENERIC_CAP: usize = 12;
/// Largest path routed to the interval DP.
pub const PATH_CAP: usize = 2000;
/// Largest star routed to the star recursion.
pub const STAR_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("tree with {n} vertices exceeds the {cap}-vertex cap for this shape")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Spider(#[from] SpiderError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveReport {
    #[serde(with = "serde_prob")]
    pub value: Rational,
    pub best_moves: BTreeSet<usize>,
    #[serde(with = "serde_prob_map")]
    pub per_move_values: BTreeMap<usize, Rational>,
}

impl MoveReport {
    /// Builds the report from per-move values; ties keep every maximizer.
    pub fn from_values(per_move_values: BTreeMap<usize, Rational>) -> MoveReport {
        let value = per_move_values
            .values()
            .max()
            .cloned()
            .expect("a tree has at least one move");
        let best_moves = per_move_values
            .iter()
            .filter(|(_, v)| **v == value)
            .map(|(k, _)| *k)
            .collect();
        MoveReport {
            value,
            best_moves,
            per_move_values,
        }
    }
}

/// `W[m]` for paths of every length `0..=n`, with `W[0] = 0` as a placeholder
/// that only ever appears with weight zero.
pub fn path_values(n: usize) -> Vec<Rational> {
    let mut w = vec![Rational::zero(); n + 1];
    for m in 2..=n {
        w[m] = (1..=m)
            .map(|i| path_move_value(&w, m, i))
            .max()
            .expect("m >= 1");
    }
    w
}

fn path_move_value(w: &[Rational], m: usize, i: usize) -> Rational {
    let mut total = Rational::zero();
    for side in [i - 1, m - i] {
        if side > 0 {
            total += ratio(side as i64, m as i64) * (Rational::one() - &w[side]);
        }
    }
    total
}

/// Per-position values on `P_n`.
pub fn path_move_values(n: usize) -> Vec<Rational> {
    let w = path_values(n);
    (1..=n).map(|i| path_move_value(&w, n, i)).collect()
}

/// Closed-form value of `P_n`: `1/2` for even `n`, `2k/(4k+1)` for `n = 4k+1`
/// and `(2k+2)/(4k+3)` for `n = 4k+3`.
pub fn path_value_closed(n: usize) -> Rational {
    assert!(n >= 1, "path length must be positive");
    let k = (n / 4) as i64;
    match n % 4 {
        0 | 2 => ratio(1, 2),
        1 => ratio(2 * k, 4 * k + 1),
        _ => ratio(2 * k + 2, 4 * k + 3),
    }
}

/// Optimal first guesses on `P_n` described by the sizes of the two ranges
/// they leave. `sizes` holds ordered `(left, right)` pairs; a size of zero is
/// an end guess.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSplits {
    pub sizes: BTreeSet<(usize, usize)>,
    pub guesses: BTreeSet<usize>,
}

/// Split-size families by residue of `n` mod 4:
/// `4k`: `{4a+1, 4b+2}` with `a+b = k-1`; `4k+1`: every split;
/// `4k+2`: `{4a+1, 4b}` with `a+b = k`; `4k+3`: `{4a+1, 4b+1}` with `a+b = k`.
pub fn path_optimal_splits(n: usize) -> PathSplits {
    assert!(n >= 2, "splits need at least two vertices");
    let k = n / 4;
    let mut unordered: Vec<(usize, usize)> = Vec::new();
    match n % 4 {
        0 => unordered.extend((0..k).map(|a| (4 * a + 1, 4 * (k - 1 - a) + 2))),
        1 => unordered.extend((1..=n).map(|g| (g - 1, n - g))),
        2 => unordered.extend((0..=k).map(|a| (4 * a + 1, 4 * (k - a)))),
        _ => unordered.extend((0..=k).map(|a| (4 * a + 1, 4 * (k - a) + 1))),
    }
    let mut sizes = BTreeSet::new();
    for (x, y) in unordered {
        sizes.insert((x, y));
        sizes.insert((y, x));
    }
    let guesses = sizes.iter().map(|&(left, _)| left + 1).collect();
    PathSplits { sizes, guesses }
}

/// `(n - 1)/n`: guess the root, leaving only the mine for the opponent.
pub fn star_value(n: usize) -> Rational {
    assert!(n >= 1, "star size must be positive");
    ratio(n as i64 - 1, n as i64)
}

/// `W(S_k)` for `k = 0..=n` via one-step recursion over leaf removals
/// (`S_3` and below are paths).
fn star_values(n: usize) -> Vec<Rational> {
    let mut w = vec![Rational::zero(); n + 1];
    for k in 2..=n {
        let root = ratio(k as i64 - 1, k as i64);
        let leaf = ratio(k as i64 - 1, k as i64) * (Rational::one() - &w[k - 1]);
        w[k] = if k <= 3 {
            path_values(k)[k].clone()
        } else {
            root.max(leaf)
        };
    }
    w
}

fn star_report(t: &Tree, root: usize) -> MoveReport {
    let n = t.n();
    let w = star_values(n);
    let per_move = t
        .vertices()
        .map(|v| {
            let value = if v == root {
                ratio(n as i64 - 1, n as i64)
            } else {
                ratio(n as i64 - 1, n as i64) * (Rational::one() - &w[n - 1])
            };
            (v, value)
        })
        .collect();
    MoveReport::from_values(per_move)
}

/// Memoized solver for arbitrary trees, keyed by canonical shape.
#[derive(Default)]
pub struct OptimalSolver {
    memo: HashMap<TreeKey, Rational>,
}

impl OptimalSolver {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_cap(t: &Tree) -> Result<(), SolveError> {
        if t.n() > GENERIC_CAP {
            return Err(SolveError::TooLarge {
                n: t.n(),
                cap: GENERIC_CAP,
            });
        }
        Ok(())
    }

    /// Generic DP value, with no shape routing.
    pub fn value(&mut self, t: &Tree) -> Result<Rational, SolveError> {
        Self::check_cap(t)?;
        Ok(self.value_unchecked(t))
    }

    /// Generic DP per-move report.
    pub fn moves(&mut self, t: &Tree) -> Result<MoveReport, SolveError> {
        Self::check_cap(t)?;
        let per_move = t
            .vertices()
            .map(|v| (v, self.move_value(t, v)))
            .collect();
        Ok(MoveReport::from_values(per_move))
    }

    fn move_value(&mut self, t: &Tree, v: usize) -> Rational {
        let n = t.n() as i64;
        let split = t.split_at(v).expect("v is a vertex of t");
        let mut total = Rational::zero();
        for part in &split.parts {
            let w = self.value_unchecked(&part.tree);
            total += ratio(part.size() as i64, n) * (Rational::one() - w);
        }
        total
    }

    fn value_unchecked(&mut self, t: &Tree) -> Rational {
        if t.n() == 1 {
            return Rational::zero();
        }
        let key = t.canonical_key();
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let best = t
            .vertices()
            .map(|v| self.move_value(t, v))
            .max()
            .expect("n >= 1");
        self.memo.insert(key, best.clone());
        best
    }
}

/// Generic DP regardless of shape (capped at [`GENERIC_CAP`] vertices).
pub fn optimal_value_general(t: &Tree) -> Result<Rational, SolveError> {
    OptimalSolver::new().value(t)
}

pub fn optimal_moves_general(t: &Tree) -> Result<MoveReport, SolveError> {
    OptimalSolver::new().moves(t)
}

/// Per-move report, routed by shape: paths use the interval DP, stars the
/// star recursion, spiders the leg-multiset recursion, anything else the
/// generic DP.
pub fn optimal_moves(t: &Tree) -> Result<MoveReport, SolveError> {
    if let Some(order) = t.path_order() {
        if t.n() > PATH_CAP {
            return Err(SolveError::TooLarge {
                n: t.n(),
                cap: PATH_CAP,
            });
        }
        let values = path_move_values(t.n());
        let per_move = order.into_iter().zip(values).collect();
        return Ok(MoveReport::from_values(per_move));
    }
    if let Some(root) = t.star_root() {
        if t.n() > STAR_CAP {
            return Err(SolveError::TooLarge {
                n: t.n(),
                cap: STAR_CAP,
            });
        }
        return Ok(star_report(t, root));
    }
    if t.n() > GENERIC_CAP {
        if let Some((_, legs)) = t.spider_legs() {
            let state = SpiderState::rooted(&legs)?;
            let mut solver = SpiderSolver::new();
            let per_move = solver
                .vertex_values(t, &state)?
                .into_iter()
                .map(|(v, values)| (v, values.optimal))
                .collect();
            return Ok(MoveReport::from_values(per_move));
        }
    }
    optimal_moves_general(t)
}

pub fn optimal_value(t: &Tree) -> Result<Rational, SolveError> {
    if t.n() == 1 {
        return Ok(Rational::zero());
    }
    if t.is_path() && t.n() <= PATH_CAP {
        return Ok(path_values(t.n()).pop().expect("n >= 1"));
    }
    Ok(optimal_moves(t)?.value)
}
