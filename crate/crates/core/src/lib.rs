//! Exact solvers and analysis tools for the misère tree search game: two
//! players alternately guess vertices of a tree hiding a uniformly random
//! mine, the guessed vertex is cut out, play continues on the component that
//! holds the mine, and whoever guesses the mine loses.

pub mod exploit;
pub mod optimal;
pub mod rational;
pub mod recurrence;
pub mod session;
pub mod simulate;
pub mod spider;
pub mod tree;

pub use rational::{Prob, Rational};
pub use tree::{make_path, make_spider, make_star, parse_tree, Tree, TreeError, TreeKey, TreeSpec};
