//! Corpus checks for the four-player support search.

use cse_core::scalar::int;
use cse_core::{
    build_support_n4, fixed_points, is_cse, Budgets, Game, Rational, SemanticsMode,
};
use rand::Rng;

mod common;

#[test]
fn indicator_payoffs_support_their_target() {
    // Payoff 1 exactly at the target, 0 elsewhere: no deviation can beat
    // the agreement and disagreements pay nothing.
    let dims = [2usize, 2, 2, 2];
    let target = vec![0usize, 1, 1, 0];
    let target_index = 0b0110;
    let payoffs = (0..16)
        .map(|idx| vec![int::<Rational>(i64::from(idx == target_index)); 4])
        .collect();
    let g = Game::from_payoffs(&dims, payoffs).unwrap();
    assert_eq!(g.profile_from_index(target_index), target);
    let result = build_support_n4(&g, &target, &Budgets::default()).unwrap();
    assert_eq!(fixed_points(&g, &result.profile), vec![target.clone()]);
    assert!(result.certificate.unwrap().is_equilibrium());
}

#[test]
fn random_four_player_games_support_random_targets() {
    let mut rng = common::rng(0x5EED);
    let shapes: [&[usize]; 3] = [&[2, 2, 2, 2], &[3, 2, 2, 2], &[2, 2, 2, 3]];
    for case in 0..30 {
        let g = common::random_game(&mut rng, shapes[case % shapes.len()], 3);
        let target = g.profile_from_index(rng.random_range(0..g.profile_count()));
        let result = build_support_n4(&g, &target, &Budgets::default())
            .unwrap_or_else(|e| panic!("case {case}: search failed: {e}"));
        assert_eq!(result.intended_point.as_deref(), Some(target.as_slice()));
        assert_eq!(fixed_points(&g, &result.profile), vec![target.clone()]);
        let cert = is_cse(&g, &result.profile, SemanticsMode::DOMINANT_ZERO, &Budgets::default())
            .unwrap();
        assert!(cert.is_equilibrium(), "case {case}: profile is not an equilibrium");
    }
}
