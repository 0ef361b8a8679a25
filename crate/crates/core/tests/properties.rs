//! Property tests for the game primitives, agreement semantics and the
//! mixed-strategy decomposition.

use cse_core::scalar::int;
use cse_core::{
    best_responses, classify, constant_profile, decompose, fixed_points, is_pareto_optimal,
    mixed::verify_roundtrip, pareto_dominates_weakly, pareto_optimal_with_max_player,
    phi_evaluate, pure_maximin, AgreementRule, Budgets, ConditionalProfile, ConditionalStrategy,
    DisagreementRule, Game, Rational, SemanticsMode,
};
use proptest::prelude::*;

mod common;

fn vector_strategy(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(0i64..=10, len).prop_map(|v| v.into_iter().map(int).collect())
}

/// Small random games: 2-3 players, up to 3 actions each.
fn game_strategy() -> impl Strategy<Value = Game> {
    prop::collection::vec(1usize..=3, 2..=3).prop_flat_map(|dims| {
        let count: usize = dims.iter().product();
        let n = dims.len();
        prop::collection::vec(prop::collection::vec(0i64..=10, n), count).prop_map(move |table| {
            Game::from_payoffs(
                &dims,
                table
                    .into_iter()
                    .map(|v| v.into_iter().map(int).collect())
                    .collect(),
            )
            .unwrap()
        })
    })
}

/// A game together with a conditional profile for it.
fn game_and_profile() -> impl Strategy<Value = (Game, ConditionalProfile)> {
    game_strategy().prop_flat_map(|game| {
        let tables: Vec<_> = (0..game.num_players())
            .map(|player| {
                prop::collection::vec(
                    0..game.action_count(player),
                    game.opponent_profile_count(player),
                )
            })
            .collect();
        (Just(game), tables).prop_map(|(game, tables)| {
            let profile = ConditionalProfile::new(
                tables
                    .into_iter()
                    .enumerate()
                    .map(|(player, table)| ConditionalStrategy::new(player, table))
                    .collect(),
            );
            (game, profile)
        })
    })
}

fn all_modes() -> [SemanticsMode; 4] {
    [
        SemanticsMode::DOMINANT_ZERO,
        SemanticsMode::UNIQUE_ZERO,
        SemanticsMode::DOMINANT_AVERAGE,
        SemanticsMode::UNIQUE_AVERAGE,
    ]
}

proptest! {
    #[test]
    fn weak_domination_is_reflexive(u in vector_strategy(3)) {
        prop_assert!(pareto_dominates_weakly(&u, &u));
    }

    #[test]
    fn weak_domination_is_transitive(
        u in vector_strategy(3),
        v in vector_strategy(3),
        w in vector_strategy(3),
    ) {
        if pareto_dominates_weakly(&u, &v) && pareto_dominates_weakly(&v, &w) {
            prop_assert!(pareto_dominates_weakly(&u, &w));
        }
    }

    #[test]
    fn best_responses_attain_the_maximum(g in game_strategy()) {
        for player in 0..g.num_players() {
            for opp_idx in 0..g.opponent_profile_count(player) {
                let opp = g.opponent_profile_from_index(player, opp_idx);
                let responses = best_responses(&g, player, &opp);
                prop_assert!(!responses.is_empty());
                let value = g.payoff_of(&g.with_player(&opp, player, responses[0]), player);
                for &r in &responses {
                    prop_assert_eq!(
                        g.payoff_of(&g.with_player(&opp, player, r), player),
                        value
                    );
                }
                for action in 0..g.action_count(player) {
                    prop_assert!(
                        g.payoff_of(&g.with_player(&opp, player, action), player) <= value
                    );
                }
            }
        }
    }

    #[test]
    fn maximin_is_attained_and_maximal(g in game_strategy()) {
        for player in 0..g.num_players() {
            let (value, witnesses) = pure_maximin(&g, player);
            // Independent recomputation of each action's guaranteed value.
            let guaranteed = |action: usize| {
                (0..g.opponent_profile_count(player))
                    .map(|idx| {
                        let opp = g.opponent_profile_from_index(player, idx);
                        g.payoff_of(&g.with_player(&opp, player, action), player).clone()
                    })
                    .min()
                    .unwrap()
            };
            for &w in &witnesses {
                prop_assert_eq!(guaranteed(w), value.clone());
            }
            for action in 0..g.action_count(player) {
                prop_assert!(guaranteed(action) <= value);
            }
        }
    }

    #[test]
    fn pareto_max_profile_is_optimal_and_maximal(g in game_strategy()) {
        let (profile, player) = pareto_optimal_with_max_player(&g);
        prop_assert!(is_pareto_optimal(&g, &profile));
        let max = (0..g.profile_count())
            .map(|idx| g.payoff_by_index(idx)[player].clone())
            .max()
            .unwrap();
        prop_assert_eq!(g.payoff_of(&profile, player), &max);
    }

    #[test]
    fn fixed_points_match_the_definition((g, s) in game_and_profile()) {
        let fixed = fixed_points(&g, &s);
        for a in g.profiles() {
            let is_fixed = s.apply(&g, &a) == a;
            prop_assert_eq!(is_fixed, fixed.contains(&a));
        }
    }

    #[test]
    fn every_game_has_a_profile_with_a_fixed_point(g in game_strategy()) {
        // Constructive witness: constants at the first profile.
        let point = g.profile_from_index(0);
        let s = constant_profile(&g, &point);
        prop_assert_eq!(fixed_points(&g, &s), vec![point]);
    }

    #[test]
    fn classification_invariants_hold((g, s) in game_and_profile()) {
        for mode in all_modes() {
            let report = classify(&g, &s, mode);
            if report.is_agreement {
                let point = report.dominant_point.clone().unwrap();
                // U restricted to agreements equals u at the point.
                prop_assert_eq!(&report.payoff, g.payoff(&point));
                prop_assert!(report.fixed_points.contains(&point));
                for other in &report.fixed_points {
                    prop_assert!(pareto_dominates_weakly(&report.payoff, g.payoff(other)));
                }
                if mode.agreement == AgreementRule::Unique {
                    prop_assert_eq!(report.fixed_points.len(), 1);
                }
                // Any two dominating fixed points carry identical payoffs.
                for other in &report.fixed_points {
                    let dominates_all = report
                        .fixed_points
                        .iter()
                        .all(|b| pareto_dominates_weakly(g.payoff(other), g.payoff(b)));
                    if dominates_all {
                        prop_assert_eq!(g.payoff(other), &report.payoff);
                    }
                }
            } else {
                match mode.disagreement {
                    DisagreementRule::Zero => {
                        prop_assert!(report.payoff.iter().all(|v| v == &int::<Rational>(0)));
                    }
                    DisagreementRule::Average => {
                        let d = report.disagreement_set.clone().unwrap();
                        prop_assert!(!d.is_empty());
                        // payoff * |D| equals the exact sum over D.
                        let count = int::<Rational>(d.len() as i64);
                        for player in 0..g.num_players() {
                            let sum = d
                                .iter()
                                .fold(int::<Rational>(0), |acc, a| acc + g.payoff_of(a, player).clone());
                            prop_assert_eq!(report.payoff[player].clone() * count.clone(), sum);
                        }
                        if report.fixed_points.is_empty() {
                            // D collects every reachable row/column point.
                            for (player, strategy) in s.strategies.iter().enumerate() {
                                for idx in 0..g.opponent_profile_count(player) {
                                    let opp = g.opponent_profile_from_index(player, idx);
                                    let full =
                                        g.with_player(&opp, player, strategy.table[idx]);
                                    prop_assert!(d.contains(&full));
                                }
                            }
                        } else {
                            prop_assert_eq!(&d, &report.fixed_points);
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_roundtrip_is_exact(seed in 0u64..1_000_000) {
        let mut rng = common::rng(seed);
        let sigma = common::random_sigma(&mut rng, 3, 3, 12);
        let budgets = Budgets::default();
        prop_assert!(verify_roundtrip(&sigma, &budgets).unwrap());

        let measure = decompose(&sigma, &budgets, false).unwrap();
        prop_assert_eq!(measure.total_weight(), int::<Rational>(1));
        let cells = sigma.partition().cell_count();
        prop_assert_eq!(
            measure.support_size(),
            sigma.action_count().pow(cells as u32)
        );
        // Marginal consistency: the mass of {t : t(l) = a} is mu_l(a).
        for (cell, label) in sigma.partition().labels().iter().enumerate() {
            for action in 0..sigma.action_count() {
                let mass = measure
                    .atoms()
                    .iter()
                    .filter(|(table, _)| table[cell] == action)
                    .fold(int::<Rational>(0), |acc, (_, w)| acc + w.clone());
                prop_assert_eq!(mass, sigma.distribution(cell)[action].clone());
            }
            let dist = phi_evaluate(&measure, label).unwrap();
            let total = dist.into_iter().fold(int::<Rational>(0), |acc, p| acc + p);
            prop_assert_eq!(total, int::<Rational>(1));
        }
    }
}
