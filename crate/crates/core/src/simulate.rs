//! Independent oracles: an exact sum over every evolution of a game, and a
//! seeded Monte Carlo estimate.
//!
//! Both work on bitmasks over the original labels (bit `v - 1` is vertex
//! `v`). Given the history, the mine is uniform on the live component, so a
//! state is just that component and whose turn it is.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exploit::{exploit_values, path_exploit_values, ExploitSolver};
use crate::optimal::{path_move_values, OptimalSolver, SolveError, GENERIC_CAP};
use crate::rational::{ratio, Rational};
use crate::tree::Tree;

/// Largest tree the exhaustive sum accepts.
pub const EXHAUSTIVE_CAP: usize = 12;
/// Largest path Monte Carlo accepts (one bit per vertex).
pub const MASK_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("tree with {n} vertices exceeds the {cap}-vertex cap")]
    TooLarge { n: usize, cap: usize },
    #[error("fixed_second_vertex is only defined on paths")]
    NeedsPath,
    #[error("at least one trial is required")]
    NoTrials,
    #[error("unknown strategy `{0}` (use optimal, random, fixed_second_vertex or exploit_dp)")]
    UnknownStrategy(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategySpec {
    /// Best move against an optimal opponent.
    Optimal,
    /// Uniform over live vertices.
    Random,
    /// Second vertex of the live path, counted from its lower-labeled end.
    FixedSecondVertex,
    /// Best response to a uniformly random opponent.
    ExploitDp,
}

impl StrategySpec {
    pub const ALL: [StrategySpec; 4] = [
        StrategySpec::Optimal,
        StrategySpec::Random,
        StrategySpec::FixedSecondVertex,
        StrategySpec::ExploitDp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategySpec::Optimal => "optimal",
            StrategySpec::Random => "random",
            StrategySpec::FixedSecondVertex => "fixed_second_vertex",
            StrategySpec::ExploitDp => "exploit_dp",
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategySpec {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategySpec::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SimError::UnknownStrategy(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub trials: u64,
    /// Wins of the first player.
    pub wins: u64,
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl SimResult {
    fn new(trials: u64, wins: u64, seed: u64) -> SimResult {
        let mean = wins as f64 / trials as f64;
        SimResult {
            trials,
            wins,
            mean,
            stderr: (mean * (1.0 - mean) / trials as f64).sqrt(),
            seed,
        }
    }

    /// `|mean - exact|` in units of the standard error.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = (self.mean - exact).abs();
        if self.stderr == 0.0 {
            if diff == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            diff / self.stderr
        }
    }
}

fn bit(v: usize) -> u64 {
    1u64 << (v - 1)
}

fn labels(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize + 1);
        m &= m - 1;
    }
    out
}

/// Tree with adjacency as bitmasks.
struct Board<'a> {
    tree: &'a Tree,
    adj: Vec<u64>,
    full: u64,
}

impl<'a> Board<'a> {
    fn new(tree: &'a Tree) -> Board<'a> {
        let mut adj = vec![0u64; tree.n() + 1];
        for v in tree.vertices() {
            adj[v] = tree.neighbors(v).iter().fold(0, |acc, &w| acc | bit(w));
        }
        let full = if tree.n() == 64 { u64::MAX } else { (1u64 << tree.n()) - 1 };
        Board { tree, adj, full }
    }

    /// Component of `live` holding `start`.
    fn component(&self, live: u64, start: usize) -> u64 {
        let mut seen = bit(start);
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize + 1;
            frontier &= frontier - 1;
            let fresh = self.adj[v] & live & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen
    }

    fn components(&self, mut live: u64) -> Vec<u64> {
        let mut out = Vec::new();
        while live != 0 {
            let start = live.trailing_zeros() as usize + 1;
            let comp = self.component(live, start);
            out.push(comp);
            live &= !comp;
        }
        out
    }

    fn induced(&self, mask: u64) -> (Tree, Vec<usize>) {
        self.tree
            .induced(&labels(mask))
            .expect("components of a tree are trees")
    }
}

/// Chosen vertex for every live component a deterministic strategy can face.
struct Policy {
    choice: HashMap<u64, usize>,
}

impl Policy {
    fn build(board: &Board, strategy: StrategySpec) -> Result<Option<Policy>, SimError> {
        if strategy == StrategySpec::Random {
            return Ok(None);
        }
        let is_path = board.tree.is_path();
        if strategy == StrategySpec::FixedSecondVertex && !is_path {
            return Err(SimError::NeedsPath);
        }
        if !is_path && board.tree.n() > GENERIC_CAP {
            return Err(SimError::TooLarge {
                n: board.tree.n(),
                cap: GENERIC_CAP,
            });
        }
        let mut chooser = Chooser::new(strategy);
        let mut choice = HashMap::new();
        let mut stack = vec![board.full];
        while let Some(mask) = stack.pop() {
            if choice.contains_key(&mask) {
                continue;
            }
            choice.insert(mask, chooser.choose(board, mask)?);
            for v in labels(mask) {
                for comp in board.components(mask & !bit(v)) {
                    if !choice.contains_key(&comp) {
                        stack.push(comp);
                    }
                }
            }
        }
        Ok(Some(Policy { choice }))
    }
}

/// Picks a move on one component, the smallest label among ties.
struct Chooser {
    strategy: StrategySpec,
    optimal: OptimalSolver,
    exploit: ExploitSolver,
    /// Best 1-based positions on a path of each length.
    path_best: HashMap<usize, BTreeSet<usize>>,
}

impl Chooser {
    fn new(strategy: StrategySpec) -> Chooser {
        Chooser {
            strategy,
            optimal: OptimalSolver::new(),
            exploit: ExploitSolver::new(),
            path_best: HashMap::new(),
        }
    }

    fn choose(&mut self, board: &Board, mask: u64) -> Result<usize, SimError> {
        let (local, map) = board.induced(mask);
        if let Some(order) = local.path_order() {
            let len = order.len();
            let positions = match self.strategy {
                StrategySpec::FixedSecondVertex => BTreeSet::from([2.min(len)]),
                _ => self
                    .path_best
                    .entry(len)
                    .or_insert_with(|| best_path_positions(self.strategy, len))
                    .clone(),
            };
            let best = positions
                .into_iter()
                .map(|p| map[order[p - 1] - 1])
                .min()
                .expect("nonempty best set");
            return Ok(best);
        }
        let moves = match self.strategy {
            StrategySpec::Optimal => self.optimal.moves(&local)?.best_moves,
            StrategySpec::ExploitDp => self.exploit.report(&local)?.best_first_moves,
            _ => unreachable!("random and fixed strategies handled earlier"),
        };
        let first = moves.into_iter().next().expect("nonempty best set");
        Ok(map[first - 1])
    }
}

fn best_path_positions(strategy: StrategySpec, len: usize) -> BTreeSet<usize> {
    let values: Vec<Rational> = match strategy {
        StrategySpec::Optimal => path_move_values(len),
        StrategySpec::ExploitDp => {
            let (_, q) = path_exploit_values(len);
            (1..=len)
                .map(|i| {
                    [i - 1, len - i]
                        .into_iter()
                        .filter(|&s| s > 0)
                        .map(|s| ratio(s as i64, len as i64) * &q[s])
                        .sum()
                })
                .collect()
        }
        _ => unreachable!("only solver-backed strategies"),
    };
    let best = values.iter().max().expect("len >= 1");
    (1..=len).filter(|&i| values[i - 1] == *best).collect()
}

/// Exact probability that the first player wins, summing every mine position
/// and every random branch with its probability.
pub fn exhaustive_value(
    t: &Tree,
    first: StrategySpec,
    second: StrategySpec,
) -> Result<Rational, SimError> {
    if t.n() > EXHAUSTIVE_CAP {
        return Err(SimError::TooLarge {
            n: t.n(),
            cap: EXHAUSTIVE_CAP,
        });
    }
    let board = Board::new(t);
    let policies = [Policy::build(&board, first)?, Policy::build(&board, second)?];
    let mut memo = HashMap::new();
    Ok(exhaustive(&board, &policies, board.full, 0, &mut memo))
}

fn exhaustive(
    board: &Board,
    policies: &[Option<Policy>; 2],
    mask: u64,
    turn: usize,
    memo: &mut HashMap<(u64, usize), Rational>,
) -> Rational {
    if let Some(v) = memo.get(&(mask, turn)) {
        return v.clone();
    }
    let live = labels(mask);
    let m = live.len() as i64;
    let moves: Vec<(Rational, usize)> = match &policies[turn] {
        Some(p) => vec![(Rational::one(), p.choice[&mask])],
        None => live.iter().map(|&v| (ratio(1, m), v)).collect(),
    };
    // the mover loses when the guess is the mine
    let mover_is_second = Rational::from_integer(num::BigInt::from(turn));
    let mut total = Rational::zero();
    for (weight, v) in moves {
        let mut branch = ratio(1, m) * &mover_is_second;
        let mut mass = ratio(1, m);
        for comp in board.components(mask & !bit(v)) {
            let share = ratio(comp.count_ones() as i64, m);
            mass += &share;
            branch += share * exhaustive(board, policies, comp, 1 - turn, memo);
        }
        debug_assert!(mass.is_one(), "branch probabilities must sum to one");
        total += weight * branch;
    }
    memo.insert((mask, turn), total.clone());
    total
}

fn uniform_bit<R: Rng>(mask: u64, rng: &mut R) -> usize {
    let mut k = rng.random_range(0..mask.count_ones());
    let mut m = mask;
    while k > 0 {
        m &= m - 1;
        k -= 1;
    }
    m.trailing_zeros() as usize + 1
}

/// Seeded estimate of the first player's win probability. Trial `i` draws
/// from ChaCha8 seeded with `seed` on stream `i`, the mine first, so results
/// do not depend on thread scheduling.
pub fn monte_carlo(
    t: &Tree,
    first: StrategySpec,
    second: StrategySpec,
    trials: u64,
    seed: u64,
) -> Result<SimResult, SimError> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    if t.n() > MASK_CAP {
        return Err(SimError::TooLarge {
            n: t.n(),
            cap: MASK_CAP,
        });
    }
    let board = Board::new(t);
    let policies = [Policy::build(&board, first)?, Policy::build(&board, second)?];
    let n = t.n() as u32;
    let wins: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mine = rng.random_range(1..=n) as usize;
            let mut live = board.full;
            let mut turn = 0;
            loop {
                let v = match &policies[turn] {
                    Some(p) => p.choice[&live],
                    None => uniform_bit(live, &mut rng),
                };
                if v == mine {
                    return turn as u64;
                }
                live = board.component(live & !bit(v), mine);
                turn = 1 - turn;
            }
        })
        .sum();
    Ok(SimResult::new(trials, wins, seed))
}

/// Exact first-player value the solvers predict for a strategy pair, when
/// one exists: optimal against optimal, or the exploiter against random in
/// either seat.
pub fn solver_prediction(
    t: &Tree,
    first: StrategySpec,
    second: StrategySpec,
) -> Result<Option<Rational>, SimError> {
    use StrategySpec::*;
    Ok(match (first, second) {
        (Optimal, Optimal) => Some(crate::optimal::optimal_value(t)?),
        (ExploitDp, Random) => Some(exploit_values(t)?.p),
        (Random, ExploitDp) => Some(Rational::one() - exploit_values(t)?.q),
        _ => None,
    })
}
