//! A small catalog of classic games used in documentation, golden files
//! and tests.

use crate::game::Game;
use crate::scalar::{int, Rational};

fn named(
    title: &str,
    players: &[&str],
    actions: &[&[&str]],
    payoffs: &[&[i64]],
) -> Game<Rational> {
    let game = Game::new(
        players.iter().map(|p| p.to_string()).collect(),
        actions
            .iter()
            .map(|set| set.iter().map(|a| a.to_string()).collect())
            .collect(),
        payoffs
            .iter()
            .map(|vector| vector.iter().map(|&v| int(v)).collect())
            .collect(),
    )
    .expect("catalog games are well-formed");
    game.with_title(title)
}

/// The prisoner's dilemma: mutual defection is the unique Nash outcome.
pub fn prisoners_dilemma() -> Game<Rational> {
    named(
        "Prisoner's Dilemma",
        &["P1", "P2"],
        &[&["C", "D"], &["C", "D"]],
        &[&[3, 3], &[0, 4], &[4, 0], &[1, 1]],
    )
}

/// Matching pennies: no pure Nash equilibrium, zero-sum payoffs in {0,1}.
pub fn matching_pennies() -> Game<Rational> {
    named(
        "Matching Pennies",
        &["P1", "P2"],
        &[&["H", "T"], &["H", "T"]],
        &[&[1, 0], &[0, 1], &[0, 1], &[1, 0]],
    )
}

/// A pure coordination game with a payoff-dominant cell at (A, A).
pub fn pure_coordination() -> Game<Rational> {
    named(
        "Coordination",
        &["P1", "P2"],
        &[&["A", "B"], &["A", "B"]],
        &[&[2, 2], &[0, 0], &[0, 0], &[1, 1]],
    )
}

/// A 2x2x2 game in which no conditional profile survives every coalition
/// deviation: player 3 picks the left or right matrix, player 1 the row,
/// player 2 the column.
pub fn three_player_no_strong_ce() -> Game<Rational> {
    named(
        "Three-player cycle",
        &["P1", "P2", "P3"],
        &[&["x", "y"], &["A", "B"], &["L", "R"]],
        &[
            &[2, 1, 0], // (x, A, L)
            &[2, 1, 0], // (x, A, R)
            &[0, 2, 1], // (x, B, L)
            &[0, 0, 0], // (x, B, R)
            &[0, 0, 0], // (y, A, L)
            &[1, 0, 2], // (y, A, R)
            &[0, 2, 1], // (y, B, L)
            &[1, 0, 2], // (y, B, R)
        ],
    )
}

/// A game of the given shape in which every payoff equals `value`.
pub fn constant_game(dims: &[usize], value: i64) -> Game<Rational> {
    let count: usize = dims.iter().product();
    Game::from_payoffs(dims, vec![vec![int(value); dims.len()]; count])
        .expect("constant games are well-formed")
}
