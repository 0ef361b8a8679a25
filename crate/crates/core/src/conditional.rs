//! Conditional strategies and the payoffs they induce.
//!
//! A conditional strategy of player `i` is a total lookup table from
//! opponent action profiles to `i`'s own actions. A profile of such
//! strategies may have fixed points (profiles every table confirms); the
//! induced payoff depends on how agreements are recognized and how
//! disagreements are paid, which is captured by [`SemanticsMode`]:
//!
//! * agreement rule [`AgreementRule::Dominant`]: the profile is an
//!   agreement when some fixed point weakly Pareto-dominates every fixed
//!   point (the payoff at any two such points is identical);
//! * agreement rule [`AgreementRule::Unique`]: the profile is an agreement
//!   when it has exactly one fixed point;
//! * disagreement rule [`DisagreementRule::Zero`]: disagreements pay the
//!   zero vector;
//! * disagreement rule [`DisagreementRule::Average`]: disagreements pay the
//!   average payoff over the disagreement set `D` — the fixed-point set if
//!   nonempty, otherwise every profile of the form `(s_i(a_-i), a_-i)`,
//!   collected as a set.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Pow;

use crate::game::{pareto_dominates_weakly, ActionProfile, Game, PayoffVector};
use crate::scalar::Scalar;

/// Total lookup table `A_{-i} -> A_i` of one player.
///
/// Entry `table[k]` is the owner's action against the opponent profile
/// whose encoding (see [`Game::opponent_index`]) is `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionalStrategy {
    pub owner: usize,
    pub table: Vec<usize>,
}

impl ConditionalStrategy {
    pub fn new(owner: usize, table: Vec<usize>) -> Self {
        ConditionalStrategy { owner, table }
    }

    /// Builds a table by evaluating `f` on every opponent profile, in
    /// ascending encoded order.
    pub fn from_fn<T: Scalar>(
        game: &Game<T>,
        owner: usize,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Self {
        let table = (0..game.opponent_profile_count(owner))
            .map(|idx| f(&game.opponent_profile_from_index(owner, idx)))
            .collect();
        ConditionalStrategy { owner, table }
    }

    /// The owner's response to a full action profile (their own coordinate
    /// in `profile` is ignored).
    pub fn respond<T: Scalar>(&self, game: &Game<T>, profile: &[usize]) -> usize {
        let opponents = game.without_player(profile, self.owner);
        self.table[game.opponent_index(self.owner, &opponents)]
    }

    /// Checks table totality and action bounds against a game.
    pub fn is_valid_for<T: Scalar>(&self, game: &Game<T>) -> bool {
        self.owner < game.num_players()
            && self.table.len() == game.opponent_profile_count(self.owner)
            && self.table.iter().all(|&a| a < game.action_count(self.owner))
    }
}

/// One conditional strategy per player, owners `0..n` in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionalProfile {
    pub strategies: Vec<ConditionalStrategy>,
}

impl ConditionalProfile {
    pub fn new(strategies: Vec<ConditionalStrategy>) -> Self {
        debug_assert!(strategies.iter().enumerate().all(|(i, s)| s.owner == i));
        ConditionalProfile { strategies }
    }

    pub fn strategy(&self, player: usize) -> &ConditionalStrategy {
        &self.strategies[player]
    }

    /// `s(a)`: every player's response to `a`.
    pub fn apply<T: Scalar>(&self, game: &Game<T>, profile: &[usize]) -> ActionProfile {
        self.strategies
            .iter()
            .map(|s| s.respond(game, profile))
            .collect()
    }

    /// `true` iff `s(a) = a`.
    pub fn is_fixed_point<T: Scalar>(&self, game: &Game<T>, profile: &[usize]) -> bool {
        self.strategies
            .iter()
            .enumerate()
            .all(|(i, s)| s.respond(game, profile) == profile[i])
    }

    pub fn is_valid_for<T: Scalar>(&self, game: &Game<T>) -> bool {
        self.strategies.len() == game.num_players()
            && self
                .strategies
                .iter()
                .enumerate()
                .all(|(i, s)| s.owner == i && s.is_valid_for(game))
    }

    /// Replaces one player's strategy, returning the deviated profile.
    pub fn with_strategy(&self, strategy: ConditionalStrategy) -> Self {
        let mut strategies = self.strategies.clone();
        let owner = strategy.owner;
        strategies[owner] = strategy;
        ConditionalProfile { strategies }
    }
}

/// How agreements are recognized among fixed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgreementRule {
    /// Some fixed point weakly dominates every fixed point.
    Dominant,
    /// Exactly one fixed point exists.
    Unique,
}

/// What a disagreement pays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DisagreementRule {
    /// The zero vector.
    Zero,
    /// The average payoff over the disagreement set `D`.
    Average,
}

/// A point on each semantics axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SemanticsMode {
    pub agreement: AgreementRule,
    pub disagreement: DisagreementRule,
}

impl SemanticsMode {
    pub const DOMINANT_ZERO: SemanticsMode = SemanticsMode {
        agreement: AgreementRule::Dominant,
        disagreement: DisagreementRule::Zero,
    };
    pub const UNIQUE_ZERO: SemanticsMode = SemanticsMode {
        agreement: AgreementRule::Unique,
        disagreement: DisagreementRule::Zero,
    };
    pub const DOMINANT_AVERAGE: SemanticsMode = SemanticsMode {
        agreement: AgreementRule::Dominant,
        disagreement: DisagreementRule::Average,
    };
    pub const UNIQUE_AVERAGE: SemanticsMode = SemanticsMode {
        agreement: AgreementRule::Unique,
        disagreement: DisagreementRule::Average,
    };
}

impl Default for SemanticsMode {
    fn default() -> Self {
        SemanticsMode::DOMINANT_ZERO
    }
}

/// Outcome of classifying a conditional profile under a semantics mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementReport<T: Scalar> {
    pub mode: SemanticsMode,
    /// All fixed points, ascending profile index.
    pub fixed_points: Vec<ActionProfile>,
    pub is_agreement: bool,
    /// The agreement point when `is_agreement` (lowest-index dominating
    /// fixed point; the payoff at any such point is the same).
    pub dominant_point: Option<ActionProfile>,
    /// The disagreement set `D`, populated only for disagreements under
    /// [`DisagreementRule::Average`].
    pub disagreement_set: Option<Vec<ActionProfile>>,
    /// The induced payoff vector `U(s)`.
    pub payoff: PayoffVector<T>,
}

/// All fixed points of `s`, by scanning every action profile.
pub fn fixed_points<T: Scalar>(game: &Game<T>, profile: &ConditionalProfile) -> Vec<ActionProfile> {
    debug_assert!(profile.is_valid_for(game));
    game.profiles()
        .filter(|a| profile.is_fixed_point(game, a))
        .collect()
}

/// The disagreement set `D(s)`: the fixed-point set when nonempty,
/// otherwise every profile reachable as `(s_i(a_-i), a_-i)`, deduplicated.
pub fn disagreement_set<T: Scalar>(
    game: &Game<T>,
    profile: &ConditionalProfile,
    fixed: &[ActionProfile],
) -> Vec<ActionProfile> {
    if !fixed.is_empty() {
        return fixed.to_vec();
    }
    let mut indices = BTreeSet::new();
    for (player, strategy) in profile.strategies.iter().enumerate() {
        for opp_idx in 0..game.opponent_profile_count(player) {
            let opponents = game.opponent_profile_from_index(player, opp_idx);
            let full = game.with_player(&opponents, player, strategy.table[opp_idx]);
            indices.insert(game.profile_index(&full));
        }
    }
    indices
        .into_iter()
        .map(|idx| game.profile_from_index(idx))
        .collect()
}

fn average_payoff<T: Scalar>(game: &Game<T>, set: &[ActionProfile]) -> PayoffVector<T> {
    let n = game.num_players();
    let mut sum = vec![T::zero(); n];
    for profile in set {
        for (slot, value) in sum.iter_mut().zip(game.payoff(profile)) {
            *slot = slot.clone() + value.clone();
        }
    }
    let count = T::from_usize(set.len()).expect("set size fits the scalar");
    sum.into_iter().map(|v| v / count.clone()).collect()
}

/// Classifies `s` and computes the induced payoff `U(s)` under `mode`.
pub fn classify<T: Scalar>(
    game: &Game<T>,
    profile: &ConditionalProfile,
    mode: SemanticsMode,
) -> AgreementReport<T> {
    let fixed = fixed_points(game, profile);
    let dominant = match mode.agreement {
        AgreementRule::Dominant => fixed
            .iter()
            .find(|a| {
                let here = game.payoff(a);
                fixed
                    .iter()
                    .all(|b| pareto_dominates_weakly(here, game.payoff(b)))
            })
            .cloned(),
        AgreementRule::Unique => (fixed.len() == 1).then(|| fixed[0].clone()),
    };
    match dominant {
        Some(point) => {
            let payoff = game.payoff(&point).clone();
            AgreementReport {
                mode,
                fixed_points: fixed,
                is_agreement: true,
                dominant_point: Some(point),
                disagreement_set: None,
                payoff,
            }
        }
        None => {
            let (set, payoff) = match mode.disagreement {
                DisagreementRule::Zero => (None, vec![T::zero(); game.num_players()]),
                DisagreementRule::Average => {
                    let set = disagreement_set(game, profile, &fixed);
                    let payoff = average_payoff(game, &set);
                    (Some(set), payoff)
                }
            };
            AgreementReport {
                mode,
                fixed_points: fixed,
                is_agreement: false,
                dominant_point: None,
                disagreement_set: set,
                payoff,
            }
        }
    }
}

/// `|S_i| = m_i ^ prod_{j != i} m_j`, as an arbitrary-precision integer.
pub fn strategy_space_size<T: Scalar>(game: &Game<T>, player: usize) -> BigUint {
    let base = BigUint::from(game.action_count(player));
    let exponent: BigUint = game
        .opponent_dims(player)
        .iter()
        .map(|&m| BigUint::from(m))
        .product();
    base.pow(&exponent)
}

/// The strategy mapping every opponent profile to `action`.
pub fn constant_strategy<T: Scalar>(
    game: &Game<T>,
    player: usize,
    action: usize,
) -> ConditionalStrategy {
    debug_assert!(action < game.action_count(player));
    ConditionalStrategy::new(player, vec![action; game.opponent_profile_count(player)])
}

/// The profile of constant strategies pinned at `point`.
pub fn constant_profile<T: Scalar>(game: &Game<T>, point: &[usize]) -> ConditionalProfile {
    ConditionalProfile::new(
        (0..game.num_players())
            .map(|i| constant_strategy(game, i, point[i]))
            .collect(),
    )
}
