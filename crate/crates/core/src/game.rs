//! Finite normal-form games with exact nonnegative payoffs.
//!
//! A [`Game`] stores the full payoff tensor indexed by action profiles.
//! Profiles are encoded in mixed radix with player 1 most significant
//! (equivalently: the last player's action varies fastest), and every
//! operation that iterates profiles does so in ascending encoded order, so
//! all tie-breaks in this crate are reproducible.

use crate::scalar::{Rational, Scalar};
use thiserror::Error;

/// One action index per player, in player order.
pub type ActionProfile = Vec<usize>;

/// One payoff per player, in player order.
pub type PayoffVector<T> = Vec<T>;

/// Validation errors raised when assembling a [`Game`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    /// Payoffs must be nonnegative; the zero disagreement payoff anchors
    /// every equilibrium notion in this crate, so shifting is game-altering
    /// and only available through [`Game::new_shifted_nonnegative`].
    #[error("negative payoff for player {} at profile {profile:?}", player + 1)]
    NegativePayoff { player: usize, profile: ActionProfile },
    /// Structural mismatch: player/action/payoff counts do not line up.
    #[error("arity mismatch: {detail}")]
    ArityMismatch { detail: String },
}

/// A finite `n`-person game in normal form, `n >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game<T: Scalar = Rational> {
    title: Option<String>,
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    payoffs: Vec<PayoffVector<T>>,
}

impl<T: Scalar> Game<T> {
    /// Builds a game from player names, per-player action names and a payoff
    /// table listed in ascending profile-index order (last player fastest).
    pub fn new(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        payoffs: Vec<PayoffVector<T>>,
    ) -> Result<Self, GameError> {
        if players.len() < 2 {
            return Err(GameError::ArityMismatch {
                detail: format!("need at least 2 players, got {}", players.len()),
            });
        }
        if actions.len() != players.len() {
            return Err(GameError::ArityMismatch {
                detail: format!(
                    "{} players but {} action sets",
                    players.len(),
                    actions.len()
                ),
            });
        }
        for (i, acts) in actions.iter().enumerate() {
            if acts.is_empty() {
                return Err(GameError::ArityMismatch {
                    detail: format!("player {} has an empty action set", i + 1),
                });
            }
        }
        let expected: usize = actions.iter().map(Vec::len).product();
        if payoffs.len() != expected {
            return Err(GameError::ArityMismatch {
                detail: format!("expected {} payoff vectors, got {}", expected, payoffs.len()),
            });
        }
        let game = Game { title: None, players, actions, payoffs };
        for (idx, vector) in game.payoffs.iter().enumerate() {
            if vector.len() != game.players.len() {
                return Err(GameError::ArityMismatch {
                    detail: format!(
                        "payoff vector {} has {} entries for {} players",
                        idx,
                        vector.len(),
                        game.players.len()
                    ),
                });
            }
            for (player, value) in vector.iter().enumerate() {
                if value.is_negative() {
                    return Err(GameError::NegativePayoff {
                        player,
                        profile: game.profile_from_index(idx),
                    });
                }
            }
        }
        Ok(game)
    }

    /// Builds a game from possibly-negative payoffs by shifting each
    /// player's payoffs up by the amount needed to reach zero.
    ///
    /// Returns the shifted game together with the per-player offsets that
    /// were added. The shift changes the game: disagreement pays zero, so
    /// equilibria of the shifted game are not equilibria of the original.
    pub fn new_shifted_nonnegative(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        mut payoffs: Vec<PayoffVector<T>>,
    ) -> Result<(Self, Vec<T>), GameError> {
        let n = players.len();
        let mut shifts = vec![T::zero(); n];
        for vector in &payoffs {
            for (player, value) in vector.iter().enumerate().take(n) {
                if value.is_negative() && -value.clone() > shifts[player] {
                    shifts[player] = -value.clone();
                }
            }
        }
        for vector in &mut payoffs {
            for (player, value) in vector.iter_mut().enumerate().take(n) {
                *value = value.clone() + shifts[player].clone();
            }
        }
        Ok((Game::new(players, actions, payoffs)?, shifts))
    }

    /// Convenience constructor with `P1..Pn` player names and `a1..am`
    /// action names, for tests and generated corpora.
    pub fn from_payoffs(dims: &[usize], payoffs: Vec<PayoffVector<T>>) -> Result<Self, GameError> {
        let players = (1..=dims.len()).map(|i| format!("P{i}")).collect();
        let actions = dims
            .iter()
            .map(|&m| (1..=m).map(|a| format!("a{a}")).collect())
            .collect();
        Game::new(players, actions, payoffs)
    }

    pub fn title(&self) -> Option<&str> {
        self.title.as_deref()
    }

    pub fn set_title(&mut self, title: Option<String>) {
        self.title = title;
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn player_name(&self, player: usize) -> &str {
        &self.players[player]
    }

    pub fn player_names(&self) -> &[String] {
        &self.players
    }

    /// Number of actions of `player` (`m_i`).
    pub fn action_count(&self, player: usize) -> usize {
        self.actions[player].len()
    }

    pub fn action_name(&self, player: usize, action: usize) -> &str {
        &self.actions[player][action]
    }

    pub fn action_names(&self, player: usize) -> &[String] {
        &self.actions[player]
    }

    /// Total number of action profiles, `prod_i m_i`.
    pub fn profile_count(&self) -> usize {
        self.actions.iter().map(Vec::len).product()
    }

    /// Mixed-radix encoding of a profile, player 1 most significant.
    pub fn profile_index(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.num_players());
        let mut index = 0;
        for (player, &action) in profile.iter().enumerate() {
            debug_assert!(action < self.action_count(player));
            index = index * self.action_count(player) + action;
        }
        index
    }

    /// Inverse of [`Game::profile_index`].
    pub fn profile_from_index(&self, mut index: usize) -> ActionProfile {
        let n = self.num_players();
        let mut profile = vec![0; n];
        for player in (0..n).rev() {
            let m = self.action_count(player);
            profile[player] = index % m;
            index /= m;
        }
        profile
    }

    /// All profiles in ascending encoded order.
    pub fn profiles(&self) -> impl Iterator<Item = ActionProfile> + '_ {
        (0..self.profile_count()).map(|idx| self.profile_from_index(idx))
    }

    pub fn payoff(&self, profile: &[usize]) -> &PayoffVector<T> {
        &self.payoffs[self.profile_index(profile)]
    }

    pub fn payoff_of(&self, profile: &[usize], player: usize) -> &T {
        &self.payoff(profile)[player]
    }

    pub fn payoff_by_index(&self, index: usize) -> &PayoffVector<T> {
        &self.payoffs[index]
    }

    /// Action counts of everyone but `player`, in ascending player order.
    pub fn opponent_dims(&self, player: usize) -> Vec<usize> {
        (0..self.num_players())
            .filter(|&j| j != player)
            .map(|j| self.action_count(j))
            .collect()
    }

    /// Number of opponent profiles of `player`, `prod_{j != i} m_j`.
    pub fn opponent_profile_count(&self, player: usize) -> usize {
        self.opponent_dims(player).iter().product()
    }

    /// Mixed-radix encoding of an opponent profile (ascending player order,
    /// lowest remaining player most significant).
    pub fn opponent_index(&self, player: usize, opponents: &[usize]) -> usize {
        let dims = self.opponent_dims(player);
        debug_assert_eq!(opponents.len(), dims.len());
        let mut index = 0;
        for (&action, &m) in opponents.iter().zip(&dims) {
            debug_assert!(action < m);
            index = index * m + action;
        }
        index
    }

    /// Inverse of [`Game::opponent_index`].
    pub fn opponent_profile_from_index(&self, player: usize, mut index: usize) -> Vec<usize> {
        let dims = self.opponent_dims(player);
        let mut profile = vec![0; dims.len()];
        for slot in (0..dims.len()).rev() {
            profile[slot] = index % dims[slot];
            index /= dims[slot];
        }
        profile
    }

    /// Drops `player`'s coordinate from a full profile.
    pub fn without_player(&self, profile: &[usize], player: usize) -> Vec<usize> {
        profile
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != player)
            .map(|(_, &a)| a)
            .collect()
    }

    /// Reinserts `player`'s action into an opponent profile.
    pub fn with_player(&self, opponents: &[usize], player: usize, action: usize) -> ActionProfile {
        let mut profile = Vec::with_capacity(self.num_players());
        profile.extend_from_slice(&opponents[..player]);
        profile.push(action);
        profile.extend_from_slice(&opponents[player..]);
        profile
    }

    /// Renders a profile with action names, e.g. `(D, C)`.
    pub fn format_profile(&self, profile: &[usize]) -> String {
        let names: Vec<&str> = profile
            .iter()
            .enumerate()
            .map(|(player, &action)| self.action_name(player, action))
            .collect();
        format!("({})", names.join(", "))
    }
}

/// Actions of `player` maximizing their payoff against `opponents`.
///
/// Never empty; returned in ascending action order, and every member attains
/// the same payoff.
pub fn best_responses<T: Scalar>(game: &Game<T>, player: usize, opponents: &[usize]) -> Vec<usize> {
    let mut best: Option<T> = None;
    let mut winners = Vec::new();
    for action in 0..game.action_count(player) {
        let profile = game.with_player(opponents, player, action);
        let value = game.payoff_of(&profile, player);
        match &best {
            Some(b) if value < b => {}
            Some(b) if value == b => winners.push(action),
            _ => {
                best = Some(value.clone());
                winners.clear();
                winners.push(action);
            }
        }
    }
    winners
}

/// Pure maximin value of `player` with all maximizing actions.
///
/// `max_{a_i} min_{a_{-i}} u_i(a_i, a_{-i})`, the individually rational
/// payoff in pure actions.
pub fn pure_maximin<T: Scalar>(game: &Game<T>, player: usize) -> (T, Vec<usize>) {
    let opp_count = game.opponent_profile_count(player);
    let mut best: Option<T> = None;
    let mut winners = Vec::new();
    for action in 0..game.action_count(player) {
        let mut worst: Option<T> = None;
        for opp_idx in 0..opp_count {
            let opponents = game.opponent_profile_from_index(player, opp_idx);
            let profile = game.with_player(&opponents, player, action);
            let value = game.payoff_of(&profile, player);
            if worst.as_ref().is_none_or(|w| value < w) {
                worst = Some(value.clone());
            }
        }
        let worst = worst.expect("opponent profile space is nonempty");
        match &best {
            Some(b) if &worst < b => {}
            Some(b) if &worst == b => winners.push(action),
            _ => {
                best = Some(worst);
                winners.clear();
                winners.push(action);
            }
        }
    }
    (best.expect("action set is nonempty"), winners)
}

/// `true` iff `u_i >= v_i` for every component.
pub fn pareto_dominates_weakly<T: Scalar>(u: &[T], v: &[T]) -> bool {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).all(|(a, b)| a >= b)
}

/// `true` iff `u` weakly dominates `v` and improves at least one component.
pub fn pareto_dominates_strictly<T: Scalar>(u: &[T], v: &[T]) -> bool {
    pareto_dominates_weakly(u, v) && u != v
}

/// `true` iff no profile weakly dominates `profile` with a strict
/// improvement somewhere. Full scan over the payoff tensor.
pub fn is_pareto_optimal<T: Scalar>(game: &Game<T>, profile: &[usize]) -> bool {
    let here = game.payoff(profile);
    (0..game.profile_count())
        .all(|idx| !pareto_dominates_strictly(game.payoff_by_index(idx), here))
}

/// All pure Nash equilibria of `game`, in ascending profile-index order.
pub fn pure_nash_profiles<T: Scalar>(game: &Game<T>) -> Vec<ActionProfile> {
    game.profiles()
        .filter(|profile| {
            (0..game.num_players()).all(|player| {
                let opponents = game.without_player(profile, player);
                best_responses(game, player, &opponents).contains(&profile[player])
            })
        })
        .collect()
}

/// A Pareto optimal profile at which some player attains their maximum
/// payoff in the game, together with that player.
///
/// Deterministic: players are tried in ascending order (player 1 always
/// qualifies); among that player's payoff-maximizing profiles the
/// lexicographically greatest payoff vector is selected, which guarantees
/// Pareto optimality, and ties resolve to the smallest profile index.
pub fn pareto_optimal_with_max_player<T: Scalar>(game: &Game<T>) -> (ActionProfile, usize) {
    // Any dominator of a u_1-maximal profile is itself u_1-maximal, so the
    // lex-payoff maximum among them is undominated in the whole game.
    let player = 0;
    let max_value = (0..game.profile_count())
        .map(|idx| game.payoff_by_index(idx)[player].clone())
        .max()
        .expect("games have at least one profile");
    let mut best_idx = None;
    let mut best_vector: Option<&PayoffVector<T>> = None;
    for idx in 0..game.profile_count() {
        let vector = game.payoff_by_index(idx);
        if vector[player] != max_value {
            continue;
        }
        if best_vector.is_none_or(|b| vector > b) {
            best_vector = Some(vector);
            best_idx = Some(idx);
        }
    }
    let idx = best_idx.expect("maximum is attained");
    (game.profile_from_index(idx), player)
}
