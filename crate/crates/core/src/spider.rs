//! Spiders as a probabilistic multi-pile Nim game.
//!
//! A spider state is the multiset of its leg lengths. A move either cuts leg
//! `i` at depth `c` or guesses the root. With `n` live vertices, cutting at
//! depth `c` hits the mine with probability `1/n`; with `(n - c)/n` the mine
//! is on the root side and the leg shrinks to `λ_i - c`; with `(c - 1)/n` it
//! lies in the severed fragment, a path of the `c - 1` vertices beyond the
//! cut. Guessing the root leaves leg `i` as a bare path with probability
//! `λ_i/n`. Once play reaches a bare path, moves are path guesses.

use std::collections::HashMap;
use std::fmt;

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exploit::exploit_values_general;
use crate::optimal::{optimal_value_general, SolveError, GENERIC_CAP};
use crate::rational::{ratio, serde_prob, Rational};
use crate::tree::{make_spider, Tree};

/// Largest state (in vertices) the leg-multiset recursion accepts.
pub const SPIDER_CAP: usize = 30;

/// How the severed fragment is read.
pub const FRAGMENT_ERRATUM: &str = "a leg cut at depth c severs a path of c - 1 vertices \
(the vertices beyond the guess), matching its probability (c - 1)/n; describing it as a \
path of length c would double count the guessed vertex";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpiderError {
    #[error("a rooted spider state needs at least one leg")]
    NoLegs,
    #[error("leg lengths must be positive")]
    ZeroLeg,
    #[error("state with {n} vertices exceeds the {cap}-vertex cap")]
    TooLarge { n: usize, cap: usize },
    #[error("state {0} is terminal")]
    Terminal(String),
    #[error("move {mv} is not legal in state {state}")]
    IllegalMove { state: String, mv: String },
    #[error("tree does not realize state {0}")]
    Mismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "lowercase")]
pub enum SpiderState {
    /// Legs sorted in non-increasing order, all positive, at least one.
    Rooted { legs: Vec<usize> },
    Path { len: usize },
}

impl SpiderState {
    pub fn rooted(legs: &[usize]) -> Result<SpiderState, SpiderError> {
        if legs.is_empty() {
            return Err(SpiderError::NoLegs);
        }
        if legs.contains(&0) {
            return Err(SpiderError::ZeroLeg);
        }
        let mut legs = legs.to_vec();
        legs.sort_unstable_by(|a, b| b.cmp(a));
        Ok(SpiderState::Rooted { legs })
    }

    pub fn path(len: usize) -> SpiderState {
        SpiderState::Path { len }
    }

    /// Root with whatever legs survive; a bare root is the one-vertex path.
    fn root_with(mut legs: Vec<usize>) -> SpiderState {
        legs.retain(|&l| l > 0);
        if legs.is_empty() {
            return SpiderState::Path { len: 1 };
        }
        legs.sort_unstable_by(|a, b| b.cmp(a));
        SpiderState::Rooted { legs }
    }

    pub fn size(&self) -> usize {
        match self {
            SpiderState::Rooted { legs } => 1 + legs.iter().sum::<usize>(),
            SpiderState::Path { len } => *len,
        }
    }
}

impl fmt::Display for SpiderState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpiderState::Rooted { legs } => {
                let legs: Vec<String> = legs.iter().map(|l| l.to_string()).collect();
                write!(f, "{{{}}}", legs.join(","))
            }
            SpiderState::Path { len } => write!(f, "path({len})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NimMove {
    /// Guess the vertex at depth `cut` (1-based from the root) on leg `leg`.
    LegCut { leg: usize, cut: usize },
    RootCut,
    /// 1-based position along a bare path.
    PathGuess { position: usize },
}

impl fmt::Display for NimMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NimMove::LegCut { leg, cut } => write!(f, "leg_cut({leg},{cut})"),
            NimMove::RootCut => f.write_str("root_cut"),
            NimMove::PathGuess { position } => write!(f, "path_guess({position})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum Outcome {
    /// The mover found the mine.
    Loss,
    /// The opponent moves next on this state.
    Continue { state: SpiderState },
}

/// Leg cuts then the root cut in the rooted phase; every position on a path.
pub fn legal_moves(s: &SpiderState) -> Vec<NimMove> {
    match s {
        SpiderState::Rooted { legs } => legs
            .iter()
            .enumerate()
            .flat_map(|(leg, &len)| (1..=len).map(move |cut| NimMove::LegCut { leg, cut }))
            .chain(std::iter::once(NimMove::RootCut))
            .collect(),
        SpiderState::Path { len } => (1..=*len)
            .map(|position| NimMove::PathGuess { position })
            .collect(),
    }
}

fn is_legal(s: &SpiderState, m: &NimMove) -> bool {
    match (s, m) {
        (SpiderState::Rooted { legs }, NimMove::LegCut { leg, cut }) => {
            legs.get(*leg).is_some_and(|&len| (1..=len).contains(cut))
        }
        (SpiderState::Rooted { .. }, NimMove::RootCut) => true,
        (SpiderState::Path { len }, NimMove::PathGuess { position }) => {
            (1..=*len).contains(position)
        }
        _ => false,
    }
}

/// Successor distribution; zero-probability branches are omitted and the
/// probabilities sum to exactly one.
pub fn outcome_distribution(
    s: &SpiderState,
    m: &NimMove,
) -> Result<Vec<(Rational, Outcome)>, SpiderError> {
    if !is_legal(s, m) {
        return Err(SpiderError::IllegalMove {
            state: s.to_string(),
            mv: m.to_string(),
        });
    }
    let n = s.size() as i64;
    let mut out = vec![(ratio(1, n), Outcome::Loss)];
    let mut push = |weight: usize, state: SpiderState| {
        if weight > 0 {
            out.push((ratio(weight as i64, n), Outcome::Continue { state }));
        }
    };
    match (s, m) {
        (SpiderState::Rooted { legs }, NimMove::LegCut { leg, cut }) => {
            let mut rest = legs.clone();
            rest[*leg] -= cut;
            push(s.size() - cut, SpiderState::root_with(rest));
            push(cut - 1, SpiderState::path(cut - 1));
        }
        (SpiderState::Rooted { legs }, NimMove::RootCut) => {
            for &len in legs {
                push(len, SpiderState::path(len));
            }
        }
        (SpiderState::Path { len }, NimMove::PathGuess { position }) => {
            push(position - 1, SpiderState::path(position - 1));
            push(len - position, SpiderState::path(len - position));
        }
        _ => unreachable!("legality checked above"),
    }
    Ok(out)
}

/// Values of a state, or of one move from it.
///
/// For a state: `optimal` is the first mover's win probability under optimal
/// play, `p` the exploiter's moving first against a uniform player, `q` the
/// exploiter's moving second. For a move: the same quantities conditioned on
/// that move being the first one played (`q` then counts the uniform player's
/// choice of this move).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NimValues {
    #[serde(with = "serde_prob")]
    pub optimal: Rational,
    #[serde(with = "serde_prob")]
    pub p: Rational,
    #[serde(with = "serde_prob")]
    pub q: Rational,
}

/// Memoized recursion over canonical spider states.
#[derive(Default)]
pub struct SpiderSolver {
    memo: HashMap<SpiderState, NimValues>,
}

impl SpiderSolver {
    pub fn new() -> Self {
        Self::default()
    }

    fn check(s: &SpiderState) -> Result<(), SpiderError> {
        let n = s.size();
        if n == 0 {
            return Err(SpiderError::Terminal(s.to_string()));
        }
        if n > SPIDER_CAP {
            return Err(SpiderError::TooLarge { n, cap: SPIDER_CAP });
        }
        Ok(())
    }

    pub fn values(&mut self, s: &SpiderState) -> Result<NimValues, SpiderError> {
        Self::check(s)?;
        Ok(self.values_unchecked(s))
    }

    pub fn move_values(&mut self, s: &SpiderState) -> Result<Vec<(NimMove, NimValues)>, SpiderError> {
        Self::check(s)?;
        Ok(legal_moves(s)
            .into_iter()
            .map(|m| {
                let v = self.single_move(s, &m);
                (m, v)
            })
            .collect())
    }

    fn single_move(&mut self, s: &SpiderState, m: &NimMove) -> NimValues {
        let mut optimal = Rational::zero();
        let mut p = Rational::zero();
        let mut q = Rational::zero();
        for (prob, outcome) in outcome_distribution(s, m).expect("move from legal_moves") {
            match outcome {
                Outcome::Loss => q += prob,
                Outcome::Continue { state } => {
                    let next = self.values_unchecked(&state);
                    optimal += &prob * (Rational::one() - next.optimal);
                    p += &prob * next.q;
                    q += prob * next.p;
                }
            }
        }
        NimValues { optimal, p, q }
    }

    fn values_unchecked(&mut self, s: &SpiderState) -> NimValues {
        if let Some(v) = self.memo.get(s) {
            return v.clone();
        }
        let moves = legal_moves(s);
        let count = moves.len() as i64;
        let mut optimal = Rational::zero();
        let mut p = Rational::zero();
        let mut q = Rational::zero();
        for m in &moves {
            let v = self.single_move(s, m);
            optimal = optimal.max(v.optimal);
            p = p.max(v.p);
            q += v.q;
        }
        let values = NimValues {
            optimal,
            p,
            q: q / ratio(count, 1),
        };
        self.memo.insert(s.clone(), values.clone());
        values
    }

    /// Per-vertex move values for a tree realizing `s`, keyed by tree label.
    pub fn vertex_values(
        &mut self,
        t: &Tree,
        s: &SpiderState,
    ) -> Result<Vec<(usize, NimValues)>, SpiderError> {
        let moves = vertex_moves(t, s)?;
        let values: HashMap<NimMove, NimValues> = self.move_values(s)?.into_iter().collect();
        Ok(moves
            .into_iter()
            .map(|(v, m)| (v, values[&m].clone()))
            .collect())
    }
}

/// Maps every vertex of `t` to the move guessing it, provided `t` is the
/// spider or path described by `s`.
pub fn vertex_moves(t: &Tree, s: &SpiderState) -> Result<Vec<(usize, NimMove)>, SpiderError> {
    let mismatch = || SpiderError::Mismatch(s.to_string());
    if t.n() != s.size() {
        return Err(mismatch());
    }
    match s {
        SpiderState::Path { .. } => {
            let order = t.path_order().ok_or_else(mismatch)?;
            Ok(order
                .into_iter()
                .enumerate()
                .map(|(i, v)| (v, NimMove::PathGuess { position: i + 1 }))
                .collect())
        }
        SpiderState::Rooted { legs } => {
            let root = match t.spider_legs() {
                Some((root, _)) => root,
                // one or two legs: the tree is a path, rooted anywhere matching
                None => rooted_path_root(t, legs).ok_or_else(mismatch)?,
            };
            let mut arms: Vec<Vec<usize>> = t
                .neighbors(root)
                .iter()
                .map(|&first| walk_leg(t, root, first))
                .collect();
            arms.sort_by(|a, b| b.len().cmp(&a.len()));
            if arms.iter().map(Vec::len).collect::<Vec<_>>() != *legs {
                return Err(mismatch());
            }
            let mut out = vec![(root, NimMove::RootCut)];
            for (leg, arm) in arms.iter().enumerate() {
                for (depth, &v) in arm.iter().enumerate() {
                    out.push((v, NimMove::LegCut { leg, cut: depth + 1 }));
                }
            }
            out.sort_by_key(|(v, _)| *v);
            Ok(out)
        }
    }
}

fn walk_leg(t: &Tree, root: usize, first: usize) -> Vec<usize> {
    let mut arm = vec![first];
    let (mut prev, mut cur) = (root, first);
    while let Some(&next) = t.neighbors(cur).iter().find(|&&w| w != prev) {
        if t.degree(cur) > 2 {
            break;
        }
        arm.push(next);
        prev = cur;
        cur = next;
    }
    arm
}

/// Lowest-labeled vertex of a path whose two sides have the given lengths.
fn rooted_path_root(t: &Tree, legs: &[usize]) -> Option<usize> {
    let order = t.path_order()?;
    let target: Vec<usize> = legs.to_vec();
    order
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let mut sides: Vec<usize> = [*i, order.len() - 1 - i]
                .into_iter()
                .filter(|&x| x > 0)
                .collect();
            sides.sort_unstable_by(|a, b| b.cmp(a));
            sides == target
        })
        .map(|(_, &v)| v)
        .min()
}

pub fn nim_values(s: &SpiderState) -> Result<NimValues, SpiderError> {
    SpiderSolver::new().values(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub legs: Vec<usize>,
    pub nim: NimValues,
    pub tree: NimValues,
}

impl CouplingReport {
    pub fn agrees(&self) -> bool {
        self.nim == self.tree
    }
}

/// Nim-side values next to the generic tree solvers on `make_spider(legs)`.
pub fn coupling_report(legs: &[usize]) -> Result<CouplingReport, SolveError> {
    let state = SpiderState::rooted(legs)?;
    if state.size() > GENERIC_CAP {
        return Err(SolveError::TooLarge {
            n: state.size(),
            cap: GENERIC_CAP,
        });
    }
    let nim = nim_values(&state)?;
    let t = make_spider(legs)?;
    let exploit = exploit_values_general(&t)?;
    let tree = NimValues {
        optimal: optimal_value_general(&t)?,
        p: exploit.p,
        q: exploit.q,
    };
    Ok(CouplingReport {
        legs: legs.to_vec(),
        nim,
        tree,
    })
}

/// True when both game descriptions give identical exact values. Invalid or
/// oversized leg lists report `false`.
pub fn coupling_check(legs: &[usize]) -> bool {
    coupling_report(legs).is_ok_and(|r| r.agrees())
}

/// Every multiset of positive leg lengths with sum `1..=max_total`, each
/// sorted non-increasing.
pub fn leg_multisets(max_total: usize) -> Vec<Vec<usize>> {
    fn extend(remaining: usize, cap: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        for next in (1..=remaining.min(cap)).rev() {
            prefix.push(next);
            extend(remaining - next, next, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(max_total, max_total, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Tree;

    fn cont(len: usize) -> Outcome {
        Outcome::Continue {
            state: SpiderState::path(len),
        }
    }

    #[test]
    fn move_lists() {
        let s = SpiderState::rooted(&[3]).unwrap();
        assert_eq!(legal_moves(&s).len(), 4);
        assert_eq!(legal_moves(&SpiderState::rooted(&[1, 1]).unwrap()).len(), 3);
        assert!(legal_moves(&SpiderState::path(0)).is_empty());
        assert!(SpiderState::rooted(&[]).is_err());
        assert!(SpiderState::rooted(&[2, 0]).is_err());
    }

    #[test]
    fn distributions() {
        let s = SpiderState::rooted(&[1, 2, 2]).unwrap();
        let d = outcome_distribution(&s, &NimMove::RootCut).unwrap();
        assert_eq!(
            d,
            vec![
                (ratio(1, 6), Outcome::Loss),
                (ratio(2, 6), cont(2)),
                (ratio(2, 6), cont(2)),
                (ratio(1, 6), cont(1)),
            ]
        );
        let s = SpiderState::rooted(&[3]).unwrap();
        let d = outcome_distribution(&s, &NimMove::LegCut { leg: 0, cut: 1 }).unwrap();
        let rest = Outcome::Continue {
            state: SpiderState::rooted(&[2]).unwrap(),
        };
        assert_eq!(d, vec![(ratio(1, 4), Outcome::Loss), (ratio(3, 4), rest)]);
        let d = outcome_distribution(&s, &NimMove::LegCut { leg: 0, cut: 3 }).unwrap();
        assert_eq!(
            d,
            vec![(ratio(1, 4), Outcome::Loss), (ratio(1, 4), cont(1)), (ratio(2, 4), cont(2))]
        );
        assert!(outcome_distribution(&s, &NimMove::LegCut { leg: 1, cut: 1 }).is_err());
        assert!(outcome_distribution(&s, &NimMove::PathGuess { position: 1 }).is_err());
    }

    #[test]
    fn full_cut_matches_tree_split() {
        // P_4 rooted at an end: 1 - 2 - 3 - 4, guessing 4
        let t = make_spider(&[3]).unwrap();
        let split = t.split_at(4).unwrap();
        let mut sizes: Vec<usize> = split.parts.iter().map(|p| p.size()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3]);
        let d = outcome_distribution(
            &SpiderState::rooted(&[3]).unwrap(),
            &NimMove::LegCut { leg: 0, cut: 3 },
        )
        .unwrap();
        // root side keeps 1 vertex, fragment 2: together the 3 survivors
        let survivors: usize = d
            .iter()
            .filter_map(|(_, o)| match o {
                Outcome::Continue { state } => Some(state.size()),
                Outcome::Loss => None,
            })
            .sum();
        assert_eq!(survivors, 3);
    }

    #[test]
    fn known_values() {
        let v = nim_values(&SpiderState::rooted(&[1, 1, 1, 1]).unwrap()).unwrap();
        assert_eq!(v.optimal, ratio(4, 5));
        assert_eq!(nim_values(&SpiderState::path(3)).unwrap().optimal, ratio(2, 3));
        assert_eq!(nim_values(&SpiderState::rooted(&[2, 2]).unwrap()).unwrap().optimal, ratio(2, 5));
        let single = nim_values(&SpiderState::path(1)).unwrap();
        assert_eq!((single.optimal, single.p, single.q), (ratio(0, 1), ratio(0, 1), ratio(1, 1)));
        assert!(matches!(nim_values(&SpiderState::path(0)), Err(SpiderError::Terminal(_))));
        assert!(matches!(
            nim_values(&SpiderState::path(31)),
            Err(SpiderError::TooLarge { .. })
        ));
    }

    #[test]
    fn spec_couplings() {
        assert!(coupling_check(&[2, 1]));
        assert!(coupling_check(&[1, 1, 1]));
        assert!(coupling_check(&[4]));
        assert!(!coupling_check(&[6, 6]));
    }

    #[test]
    fn multisets() {
        // partitions of 1..=5: 1 + 2 + 3 + 5 + 7
        assert_eq!(leg_multisets(5).len(), 18);
        assert!(leg_multisets(4).contains(&vec![2, 1, 1]));
    }

    #[test]
    fn vertex_mapping() {
        let t = make_spider(&[2, 1, 3]).unwrap();
        let s = SpiderState::rooted(&[3, 2, 1]).unwrap();
        let moves = vertex_moves(&t, &s).unwrap();
        assert_eq!(moves[0], (1, NimMove::RootCut));
        assert!(moves.contains(&(7, NimMove::LegCut { leg: 0, cut: 3 })));
        assert!(moves.contains(&(4, NimMove::LegCut { leg: 2, cut: 1 })));
        let p = Tree::new(3, &[(1, 2), (2, 3)]).unwrap();
        let moves = vertex_moves(&p, &SpiderState::rooted(&[1, 1]).unwrap()).unwrap();
        assert_eq!(moves[1], (2, NimMove::RootCut));
        assert!(vertex_moves(&p, &SpiderState::rooted(&[2]).unwrap()).is_ok());
        assert!(vertex_moves(&t, &SpiderState::rooted(&[4, 2]).unwrap()).is_err());
    }
}
