use num::{One, Zero};
use proptest::prelude::*;

use misere_core::exploit::{exploit_values, exploit_values_general, path_exploit_values};
use misere_core::optimal::{optimal_moves, optimal_value, optimal_value_general, path_values};
use misere_core::rational::{ratio, Rational};
use misere_core::recurrence::RationalPolynomial;
use misere_core::spider::{legal_moves, outcome_distribution, NimValues, SpiderSolver, SpiderState};
use misere_core::tree::from_pruefer;
use misere_core::{Tree, TreeSpec};

fn tree_strategy(max_n: usize) -> impl Strategy<Value = Tree> {
    (3..=max_n)
        .prop_flat_map(|n| proptest::collection::vec(1..=n, n - 2))
        .prop_map(|seq| from_pruefer(&seq).unwrap())
}

fn relabeled_pair(max_n: usize) -> impl Strategy<Value = (Tree, Vec<usize>)> {
    tree_strategy(max_n).prop_flat_map(|t| {
        let labels: Vec<usize> = (1..=t.n()).collect();
        (Just(t), Just(labels).prop_shuffle())
    })
}

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(p, q)| ratio(p, q))
}

fn polynomial() -> impl Strategy<Value = RationalPolynomial> {
    proptest::collection::vec(rational(), 0..6).prop_map(RationalPolynomial::new)
}

fn spider_state() -> impl Strategy<Value = SpiderState> {
    prop_oneof![
        proptest::collection::vec(1usize..6, 1..5).prop_map(|legs| SpiderState::rooted(&legs).unwrap()),
        (1usize..15).prop_map(SpiderState::path),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn key_ignores_labels((t, perm) in relabeled_pair(10)) {
        let u = t.relabeled(&perm).unwrap();
        prop_assert_eq!(t.canonical_key(), u.canonical_key());
    }

    #[test]
    fn values_ignore_labels((t, perm) in relabeled_pair(8)) {
        let u = t.relabeled(&perm).unwrap();
        prop_assert_eq!(optimal_value(&t).unwrap(), optimal_value(&u).unwrap());
        let (a, b) = (exploit_values(&t).unwrap(), exploit_values(&u).unwrap());
        prop_assert_eq!((a.p, a.q), (b.p, b.q));
    }

    #[test]
    fn split_accounts_for_every_vertex(t in tree_strategy(12), pick in 0usize..12) {
        let v = pick % t.n() + 1;
        let split = t.split_at(v).unwrap();
        let total: usize = split.parts.iter().map(|p| p.size()).sum();
        prop_assert_eq!(total, t.n() - 1);
        prop_assert_eq!(split.parts.len(), t.degree(v));
        let mut seen: Vec<usize> = split.parts.iter().flat_map(|p| p.label_map.clone()).collect();
        seen.sort_unstable();
        let expected: Vec<usize> = t.vertices().filter(|&w| w != v).collect();
        prop_assert_eq!(seen, expected);
        for part in &split.parts {
            prop_assert_eq!(part.tree.edges().len() + 1, part.tree.n());
        }
    }

    #[test]
    fn spec_text_round_trips(t in tree_strategy(9)) {
        let spec = TreeSpec::Edges(t.edges().to_vec());
        let text = spec.to_string();
        let parsed: TreeSpec = text.parse().unwrap();
        prop_assert_eq!(&parsed, &spec);
        prop_assert_eq!(parsed.build().unwrap(), t);
    }

    #[test]
    fn values_are_probabilities(t in tree_strategy(9)) {
        let w = optimal_value(&t).unwrap();
        prop_assert!(w >= Rational::zero() && w <= Rational::one());
        let r = exploit_values(&t).unwrap();
        for x in [&r.p, &r.q] {
            prop_assert!(*x >= Rational::zero() && *x <= Rational::one());
        }
        let report = optimal_moves(&t).unwrap();
        prop_assert!(report.per_move_values.values().all(|v| *v <= w));
        prop_assert_eq!(report.per_move_values.len(), t.n());
    }

    #[test]
    fn routed_and_generic_agree(t in tree_strategy(10)) {
        prop_assert_eq!(optimal_value(&t).unwrap(), optimal_value_general(&t).unwrap());
        prop_assert_eq!(exploit_values(&t).unwrap(), exploit_values_general(&t).unwrap());
    }

    #[test]
    fn product_matches_pointwise(p in polynomial(), q in polynomial(), xs in proptest::collection::vec(rational(), 20)) {
        let prod = &p * &q;
        let sum = &p + &q;
        for x in &xs {
            prop_assert_eq!(prod.eval(x), p.eval(x) * q.eval(x));
            prop_assert_eq!(sum.eval(x), p.eval(x) + q.eval(x));
            prop_assert_eq!(p.shift(3).eval(x), p.eval(&(x + ratio(3, 1))));
        }
    }

    #[test]
    fn division_reconstructs(p in polynomial(), q in polynomial()) {
        prop_assume!(!q.is_zero());
        let (quot, rem) = p.div_rem(&q);
        prop_assert_eq!(&(&quot * &q) + &rem, p);
        prop_assert!(rem.degree() < q.degree() || rem.is_zero());
    }

    #[test]
    fn outcome_probabilities_sum_to_one(s in spider_state()) {
        for m in legal_moves(&s) {
            let total: Rational = outcome_distribution(&s, &m).unwrap().into_iter().map(|(p, _)| p).sum();
            prop_assert!(total.is_one());
        }
        prop_assert_eq!(legal_moves(&s).len(), s.size());
    }
}

#[test]
fn path_phase_matches_path_solvers() {
    let w = path_values(30);
    let (p, q) = path_exploit_values(30);
    let mut solver = SpiderSolver::new();
    for len in 1..=30 {
        let v = solver.values(&SpiderState::path(len)).unwrap();
        let expected = NimValues {
            optimal: w[len].clone(),
            p: p[len].clone(),
            q: q[len].clone(),
        };
        assert_eq!(v, expected, "length {len}");
    }
}
