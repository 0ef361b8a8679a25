//! Shared corpus generators for the integration suites. Everything is
//! seeded, so failures reproduce bit-for-bit.
#![allow(dead_code)] // each test target uses its own subset

use cse_core::game::Game as GenericGame;
use cse_core::mixed::{PartitionSpec, SimpleConditionalMixedStrategy};
use cse_core::scalar::{int, ratio};
use cse_core::{
    classify, ConditionalProfile, ConditionalStrategy, Game, Rational, SemanticsMode,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_game(rng: &mut ChaCha8Rng, dims: &[usize], max_payoff: i64) -> Game {
    let count: usize = dims.iter().product();
    let payoffs = (0..count)
        .map(|_| {
            (0..dims.len())
                .map(|_| int(rng.random_range(0..=max_payoff)))
                .collect()
        })
        .collect();
    GenericGame::from_payoffs(dims, payoffs).expect("generated games are well-formed")
}

pub fn random_profile(rng: &mut ChaCha8Rng, game: &Game) -> ConditionalProfile {
    ConditionalProfile::new(
        (0..game.num_players())
            .map(|player| {
                let table = (0..game.opponent_profile_count(player))
                    .map(|_| rng.random_range(0..game.action_count(player)))
                    .collect();
                ConditionalStrategy::new(player, table)
            })
            .collect(),
    )
}

/// A random simple conditional mixed strategy: up to `max_cells` cells,
/// up to `max_actions` actions, probabilities with denominator at most
/// `max_denominator`.
pub fn random_sigma(
    rng: &mut ChaCha8Rng,
    max_cells: usize,
    max_actions: usize,
    max_denominator: i64,
) -> SimpleConditionalMixedStrategy<Rational> {
    let cells = rng.random_range(1..=max_cells);
    let actions = rng.random_range(1..=max_actions);
    let labels = (1..=cells).map(|l| format!("X{l}")).collect();
    let distributions = (0..cells)
        .map(|_| {
            // Compose a random denominator into `actions` nonnegative parts.
            let denominator = rng.random_range(1..=max_denominator);
            let mut cuts: Vec<i64> = (0..actions - 1)
                .map(|_| rng.random_range(0..=denominator))
                .collect();
            cuts.sort_unstable();
            let mut parts = Vec::with_capacity(actions);
            let mut previous = 0;
            for cut in cuts {
                parts.push(cut - previous);
                previous = cut;
            }
            parts.push(denominator - previous);
            parts.into_iter().map(|p| ratio(p, denominator)).collect()
        })
        .collect();
    SimpleConditionalMixedStrategy::new(
        0,
        actions,
        PartitionSpec::from_labels(labels).unwrap(),
        distributions,
    )
    .expect("generated distributions are valid")
}

/// Naive joint-deviation check: enumerates every combination of coalition
/// tables and reports whether one strictly improves every member. The
/// independent oracle for the coalition constraint search.
pub fn brute_force_coalition_improves(
    game: &Game,
    profile: &ConditionalProfile,
    coalition: &[usize],
    mode: SemanticsMode,
) -> bool {
    let base = classify(game, profile, mode);
    let mut tables: Vec<Vec<usize>> = coalition
        .iter()
        .map(|&j| vec![0usize; game.opponent_profile_count(j)])
        .collect();
    loop {
        let mut deviated = profile.clone();
        for (slot, &j) in coalition.iter().enumerate() {
            deviated = deviated.with_strategy(ConditionalStrategy::new(j, tables[slot].clone()));
        }
        let outcome = classify(game, &deviated, mode);
        if coalition
            .iter()
            .all(|&j| outcome.payoff[j] > base.payoff[j])
        {
            return true;
        }
        // Odometer over the joint table space.
        let mut slot = coalition.len();
        'carry: loop {
            if slot == 0 {
                return false;
            }
            slot -= 1;
            let player = coalition[slot];
            let m = game.action_count(player);
            let table = &mut tables[slot];
            for entry in (0..table.len()).rev() {
                table[entry] += 1;
                if table[entry] < m {
                    break 'carry;
                }
                table[entry] = 0;
            }
        }
    }
}
