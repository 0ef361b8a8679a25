//! Constructive equilibrium builders.
//!
//! Each builder assembles a conditional profile with a designated agreement
//! point and states the semantics mode it is valid under. Builders never
//! self-certify: callers verify the output through [`crate::deviation`],
//! and the test suites do so on randomized corpora.
//!
//! All argmax/argmin tie-breaks pick the lowest action index, and anchors
//! are chosen lexicographically, so every construction is reproducible.

use crate::conditional::{
    constant_profile, constant_strategy, fixed_points, ConditionalProfile, ConditionalStrategy,
    SemanticsMode,
};
use crate::deviation::{
    best_unilateral_deviation_value, brute_force_best_deviation, is_cse, Budgets,
    DeviationCertificate, DeviationError,
};
use crate::game::{
    best_responses, pareto_optimal_with_max_player, pure_maximin, pure_nash_profiles,
    ActionProfile, Game, PayoffVector,
};
use crate::scalar::Scalar;
use thiserror::Error;

/// Which construction produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremTag {
    Existence,
    Folk,
    Pareto3,
    Strong,
    General2p,
    SupportN4,
}

/// A built profile, its designated agreement point and construction trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionResult<T: Scalar> {
    pub tag: TheoremTag,
    /// Semantics the construction is stated for.
    pub mode: SemanticsMode,
    pub profile: ConditionalProfile,
    /// The intended agreement point; absent only for the mutual
    /// best-response outcome of [`build_general_2p`], which settles on a
    /// fixed-point-free profile.
    pub intended_point: Option<ActionProfile>,
    /// Induced payoff `U` at the built profile.
    pub payoff: PayoffVector<T>,
    /// Per-step choices and tie-breaks, for reports.
    pub notes: Vec<String>,
    /// Verification certificate, attached by the search-based builder.
    pub certificate: Option<DeviationCertificate<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError<T: Scalar> {
    #[error(
        "player {} gets {target_value} at the target but can guarantee {maximin}",
        player + 1
    )]
    NotIndividuallyRational { player: usize, maximin: T, target_value: T },
    #[error("construction requires exactly 2 players, got {got}")]
    NotTwoPlayers { got: usize },
    #[error("construction requires exactly 3 players, got {got}")]
    NotThreePlayers { got: usize },
    #[error("player {} needs at least 2 actions", player + 1)]
    ActionSetTooSmall { player: usize },
    #[error("no action profile gives two players their maximum payoffs")]
    NoDoubleMaxProfile,
    #[error("construction requires at least 4 players, got {got}")]
    TooFewPlayers { got: usize },
    #[error(
        "search exhausted after {nodes} nodes ({})",
        if *complete { "whole space infeasible" } else { "budget reached" }
    )]
    SearchExhausted { nodes: u64, complete: bool },
    #[error(transparent)]
    Deviation(#[from] DeviationError),
}

/// Builds the sequential best-response chain that witnesses existence of a
/// conditional strategy equilibrium in every game.
///
/// Player 1 commits to a pointwise best response. Player `k > 1` commits to
/// an action depending only on the actions of players `k+1..n`, chosen to
/// maximize `u_k` given that players `1..k-1` react through their own
/// already-built rules; player `n`'s strategy is constant. The chain pins a
/// unique fixed point, recovered by evaluating it at the empty suffix.
pub fn build_existence<T: Scalar>(game: &Game<T>) -> ConstructionResult<T> {
    let n = game.num_players();
    let s1 = ConditionalStrategy::from_fn(game, 0, |opp| best_responses(game, 0, opp)[0]);

    // Suffix spaces: player k's choice depends on actions of players k+1..n.
    let suffix_dims = |k: usize| -> Vec<usize> {
        (k + 1..n).map(|j| game.action_count(j)).collect()
    };
    let suffix_index = |k: usize, suffix: &[usize]| -> usize {
        suffix_dims(k)
            .iter()
            .zip(suffix)
            .fold(0, |acc, (&m, &a)| acc * m + a)
    };

    // chain[k][suffix_index] for k >= 1, filled in ascending k.
    let mut chain: Vec<Vec<usize>> = vec![Vec::new(); n];

    // Resolves the full profile reached when player k tries `action` with
    // the given suffix: players below k respond through the chain, player 1
    // through the best-response table.
    let resolve = |chain: &[Vec<usize>], k: usize, action: usize, suffix: &[usize]| {
        let mut acts = vec![0usize; n];
        acts[k] = action;
        acts[k + 1..n].copy_from_slice(suffix);
        for j in (1..k).rev() {
            acts[j] = chain[j][suffix_index(j, &acts[j + 1..n])];
        }
        acts[0] = s1.table[game.opponent_index(0, &acts[1..n])];
        acts
    };

    for k in 1..n {
        let count: usize = suffix_dims(k).iter().product();
        let mut table = Vec::with_capacity(count);
        for idx in 0..count {
            let suffix = decode_mixed_radix(&suffix_dims(k), idx);
            let mut best: Option<(T, usize)> = None;
            for action in 0..game.action_count(k) {
                let acts = resolve(&chain, k, action, &suffix);
                let value = game.payoff_of(&acts, k).clone();
                if best.as_ref().is_none_or(|(v, _)| &value > v) {
                    best = Some((value, action));
                }
            }
            table.push(best.expect("action set is nonempty").1);
        }
        chain[k] = table;
    }

    // The agreement point: evaluate the chain from the top.
    let mut point = vec![0usize; n];
    for k in (1..n).rev() {
        point[k] = chain[k][suffix_index(k, &point[k + 1..n])];
    }
    point[0] = s1.table[game.opponent_index(0, &point[1..n])];

    let mut strategies = vec![s1];
    for k in 1..n {
        strategies.push(ConditionalStrategy::from_fn(game, k, |opp| {
            // opp lists players 0..k-1 then k+1..n-1; only the suffix matters.
            chain[k][suffix_index(k, &opp[k..])]
        }));
    }

    let mut notes = vec!["player 1 commits to a pointwise best response".to_string()];
    for (k, &action) in point.iter().enumerate().skip(1) {
        notes.push(format!(
            "player {} chain action at the agreement suffix: {}",
            k + 1,
            game.action_name(k, action)
        ));
    }
    notes.push(format!("agreement point {}", game.format_profile(&point)));

    let payoff = game.payoff(&point).clone();
    ConstructionResult {
        tag: TheoremTag::Existence,
        mode: SemanticsMode::DOMINANT_ZERO,
        profile: ConditionalProfile::new(strategies),
        intended_point: Some(point),
        payoff,
        notes,
        certificate: None,
    }
}

fn decode_mixed_radix(dims: &[usize], mut index: usize) -> Vec<usize> {
    let mut digits = vec![0usize; dims.len()];
    for slot in (0..dims.len()).rev() {
        digits[slot] = index % dims[slot];
        index /= dims[slot];
    }
    digits
}

/// Supports `target` as the agreement point of a two-player equilibrium,
/// provided both players get at least their maximin payoff there.
///
/// On the agreement path each player confirms the target; everywhere else
/// they punish by minimizing the opponent's payoff.
pub fn build_folk<T: Scalar>(
    game: &Game<T>,
    target: &[usize],
) -> Result<ConstructionResult<T>, ConstructError<T>> {
    if game.num_players() != 2 {
        return Err(ConstructError::NotTwoPlayers { got: game.num_players() });
    }
    for player in 0..2 {
        let (maximin, _) = pure_maximin(game, player);
        let value = game.payoff_of(target, player);
        if *value < maximin {
            return Err(ConstructError::NotIndividuallyRational {
                player,
                maximin,
                target_value: value.clone(),
            });
        }
    }

    let strategies = (0..2)
        .map(|player| {
            let other = 1 - player;
            let target_key = game.without_player(target, player);
            ConditionalStrategy::from_fn(game, player, |opp| {
                if opp == target_key.as_slice() {
                    return target[player];
                }
                // Punish: minimize the opponent's payoff, lowest index first.
                let mut best: Option<(T, usize)> = None;
                for action in 0..game.action_count(player) {
                    let profile = game.with_player(opp, player, action);
                    let value = game.payoff_of(&profile, other).clone();
                    if best.as_ref().is_none_or(|(v, _)| &value < v) {
                        best = Some((value, action));
                    }
                }
                best.expect("action set is nonempty").1
            })
        })
        .collect();

    let payoff = game.payoff(target).clone();
    Ok(ConstructionResult {
        tag: TheoremTag::Folk,
        mode: SemanticsMode::DOMINANT_ZERO,
        profile: ConditionalProfile::new(strategies),
        intended_point: Some(target.to_vec()),
        payoff,
        notes: vec![
            format!("target {}", game.format_profile(target)),
            "off-path entries minimize the opponent's payoff".to_string(),
        ],
        certificate: None,
    })
}

/// Builds a Pareto optimal equilibrium in a three-player game.
///
/// The anchor is a Pareto optimal profile maximizing some player's payoff;
/// the off-path entries follow a fixed case table over a second profile
/// that differs from the anchor in every coordinate, making the anchor the
/// unique fixed point.
pub fn build_pareto3<T: Scalar>(
    game: &Game<T>,
) -> Result<ConstructionResult<T>, ConstructError<T>> {
    if game.num_players() != 3 {
        return Err(ConstructError::NotThreePlayers { got: game.num_players() });
    }
    for player in 0..3 {
        if game.action_count(player) < 2 {
            return Err(ConstructError::ActionSetTooSmall { player });
        }
    }

    let (anchor, max_player) = pareto_optimal_with_max_player(game);
    let i = max_player;
    let others: Vec<usize> = (0..3).filter(|&p| p != i).collect();
    let (j, k) = (others[0], others[1]);
    // Lexicographically smallest profile differing from the anchor
    // everywhere: per coordinate, the lowest non-anchor action.
    let off: ActionProfile = (0..3)
        .map(|p| if anchor[p] == 0 { 1 } else { 0 })
        .collect();

    let strategies: Vec<ConditionalStrategy> = (0..3)
        .map(|player| {
            ConditionalStrategy::from_fn(game, player, |opp| {
                let full = game.with_player(opp, player, 0);
                let at = |p: usize| full[p];
                let on_anchor = |p: usize| at(p) == anchor[p];
                if player == i {
                    match (on_anchor(j), on_anchor(k)) {
                        (true, true) => anchor[i],
                        (true, false) => off[i],  // a_k off, a_j on anchor
                        (false, true) => off[i],  // a_j off, a_k on anchor
                        (false, false) => anchor[i],
                    }
                } else if player == k {
                    match (on_anchor(i), on_anchor(j)) {
                        (true, true) => anchor[k],
                        (true, false) => anchor[k],
                        (false, true) => anchor[k],
                        (false, false) => off[k],
                    }
                } else {
                    match (on_anchor(i), on_anchor(k)) {
                        (true, true) => anchor[j],
                        (true, false) => anchor[j],
                        (false, true) => anchor[j],
                        (false, false) => off[j],
                    }
                }
            })
        })
        .collect();

    let payoff = game.payoff(&anchor).clone();
    let notes = vec![
        format!(
            "anchor {} is Pareto optimal and maximal for player {}",
            game.format_profile(&anchor),
            i + 1
        ),
        format!("off-anchor profile {}", game.format_profile(&off)),
    ];
    Ok(ConstructionResult {
        tag: TheoremTag::Pareto3,
        mode: SemanticsMode::DOMINANT_ZERO,
        profile: ConditionalProfile::new(strategies),
        intended_point: Some(anchor),
        payoff,
        notes,
        certificate: None,
    })
}

/// Builds a strong (coalition-proof) equilibrium whenever some profile
/// gives two players their maximum payoffs in the game.
///
/// Both distinguished players confirm the anchor; elsewhere their entries
/// satisfy a pairwise guard: whenever one of them answers a profile that is
/// not the anchor, the other must refuse to confirm it. The guard leaves
/// the anchor as the unique fixed point and makes it impossible for any
/// coalition avoiding the pair to create a fixed point.
pub fn build_strong<T: Scalar>(game: &Game<T>) -> Result<ConstructionResult<T>, ConstructError<T>> {
    let n = game.num_players();
    let maxima: Vec<T> = (0..n)
        .map(|p| {
            (0..game.profile_count())
                .map(|idx| game.payoff_by_index(idx)[p].clone())
                .max()
                .expect("games have at least one profile")
        })
        .collect();

    let mut found: Option<(ActionProfile, usize, usize)> = None;
    for idx in 0..game.profile_count() {
        let profile = game.profile_from_index(idx);
        let payoff = game.payoff_by_index(idx);
        let qualified: Vec<usize> = (0..n)
            .filter(|&p| payoff[p] == maxima[p] && game.action_count(p) >= 2)
            .collect();
        if qualified.len() >= 2 {
            found = Some((profile, qualified[0], qualified[1]));
            break;
        }
    }
    let Some((anchor, i, j)) = found else {
        return Err(ConstructError::NoDoubleMaxProfile);
    };

    let tables = solve_strong_guard(game, &anchor, i, j).ok_or(
        // The pairwise guard is always satisfiable with two actions per
        // player; an exhausted search means the inputs violated that.
        ConstructError::SearchExhausted { nodes: 0, complete: true },
    )?;

    let mut strategies = Vec::with_capacity(n);
    for player in 0..n {
        if player == i {
            strategies.push(ConditionalStrategy::new(player, tables.0.clone()));
        } else if player == j {
            strategies.push(ConditionalStrategy::new(player, tables.1.clone()));
        } else {
            // Unconstrained players confirm the anchor and otherwise play
            // their lowest action.
            let anchor_key = game.opponent_index(player, &game.without_player(&anchor, player));
            let mut table = vec![0usize; game.opponent_profile_count(player)];
            table[anchor_key] = anchor[player];
            strategies.push(ConditionalStrategy::new(player, table));
        }
    }

    let payoff = game.payoff(&anchor).clone();
    let notes = vec![format!(
        "players {} and {} reach their maxima at {}",
        i + 1,
        j + 1,
        game.format_profile(&anchor)
    )];
    Ok(ConstructionResult {
        tag: TheoremTag::Strong,
        // The anchor is the unique fixed point, so both agreement rules
        // accept it; zero disagreement is what the guard argument needs.
        mode: SemanticsMode::DOMINANT_ZERO,
        profile: ConditionalProfile::new(strategies),
        intended_point: Some(anchor),
        payoff,
        notes,
        certificate: None,
    })
}

/// Backtracking assignment of the two guarded tables.
///
/// Guard: for `l` in `{i, j}` with entry `v` at key `a_{-l}`, unless the
/// combined profile is the anchor, the partner `k` must not confirm it:
/// `s_k(v, a_{-kl}) != a_k`.
fn solve_strong_guard<T: Scalar>(
    game: &Game<T>,
    anchor: &[usize],
    i: usize,
    j: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let keys_i = game.opponent_profile_count(i);
    let keys_j = game.opponent_profile_count(j);
    let anchor_key_i = game.opponent_index(i, &game.without_player(anchor, i));
    let anchor_key_j = game.opponent_index(j, &game.without_player(anchor, j));

    // Variable layout: player i's keys then player j's keys.
    let total = keys_i + keys_j;
    let mut assignment: Vec<Option<usize>> = vec![None; total];
    assignment[anchor_key_i] = Some(anchor[i]);
    assignment[keys_i + anchor_key_j] = Some(anchor[j]);

    // Checks every guard instance whose two entries are both assigned.
    let consistent = |assignment: &[Option<usize>]| -> bool {
        for (l, k, base, partner_base) in [(i, j, 0usize, keys_i), (j, i, keys_i, 0usize)] {
            for key in 0..game.opponent_profile_count(l) {
                let Some(value) = assignment[base + key] else { continue };
                let opp = game.opponent_profile_from_index(l, key);
                let full = game.with_player(&opp, l, value);
                if full == anchor {
                    continue;
                }
                let partner_key = game.opponent_index(k, &game.without_player(&full, k));
                if assignment[partner_base + partner_key] == Some(full[k]) {
                    return false;
                }
            }
        }
        true
    };

    fn search(
        var: usize,
        total: usize,
        domain_of: &impl Fn(usize) -> usize,
        assignment: &mut Vec<Option<usize>>,
        consistent: &impl Fn(&[Option<usize>]) -> bool,
    ) -> bool {
        if var == total {
            return true;
        }
        if assignment[var].is_some() {
            return search(var + 1, total, domain_of, assignment, consistent);
        }
        for action in 0..domain_of(var) {
            assignment[var] = Some(action);
            if consistent(assignment)
                && search(var + 1, total, domain_of, assignment, consistent)
            {
                return true;
            }
        }
        assignment[var] = None;
        false
    }

    let domain_of = |var: usize| {
        if var < keys_i {
            game.action_count(i)
        } else {
            game.action_count(j)
        }
    };
    if !search(0, total, &domain_of, &mut assignment, &consistent) {
        return None;
    }

    let table_i = assignment[..keys_i]
        .iter()
        .map(|v| v.expect("assigned"))
        .collect();
    let table_j = assignment[keys_i..]
        .iter()
        .map(|v| v.expect("assigned"))
        .collect();
    Some((table_i, table_j))
}

/// Builds an equilibrium of any two-player game under averaging
/// disagreement semantics.
///
/// Case (a): a pure Nash profile exists — constants there. Case (b): the
/// mutual best-response profile is already immune to deviations — return
/// it (no agreement point; the payoff is the disagreement average).
/// Case (c): a player's best deviation creates fixed points — the player
/// commits to a constant at the best of them.
pub fn build_general_2p<T: Scalar>(
    game: &Game<T>,
    budgets: &Budgets,
) -> Result<ConstructionResult<T>, ConstructError<T>> {
    if game.num_players() != 2 {
        return Err(ConstructError::NotTwoPlayers { got: game.num_players() });
    }
    let mode = SemanticsMode::DOMINANT_AVERAGE;

    if let Some(nash) = pure_nash_profiles(game).into_iter().next() {
        let payoff = game.payoff(&nash).clone();
        return Ok(ConstructionResult {
            tag: TheoremTag::General2p,
            mode,
            profile: constant_profile(game, &nash),
            intended_point: Some(nash.clone()),
            payoff,
            notes: vec![format!(
                "pure Nash profile {}: constants",
                game.format_profile(&nash)
            )],
            certificate: None,
        });
    }

    let mutual = ConditionalProfile::new(
        (0..2)
            .map(|p| ConditionalStrategy::from_fn(game, p, |opp| best_responses(game, p, opp)[0]))
            .collect(),
    );
    let base = crate::conditional::classify(game, &mutual, mode);

    let mut improving: Option<(usize, ConditionalStrategy)> = None;
    for player in 0..2 {
        let (value, table) = brute_force_best_deviation(game, &mutual, player, mode, budgets)?;
        if value > base.payoff[player] {
            improving = Some((player, table));
            break;
        }
    }

    let Some((player, deviation)) = improving else {
        return Ok(ConstructionResult {
            tag: TheoremTag::General2p,
            mode,
            profile: mutual,
            intended_point: None,
            payoff: base.payoff,
            notes: vec![
                "no pure Nash profile; mutual best responses are immune to deviations"
                    .to_string(),
            ],
            certificate: None,
        });
    };

    // The best deviation has fixed points: against best responses, a
    // fixed-point-free table never beats the mutual-response average.
    let deviated = mutual.with_strategy(deviation);
    let fixed = fixed_points(game, &deviated);
    debug_assert!(!fixed.is_empty());
    let mut best_point: Option<&ActionProfile> = None;
    for point in &fixed {
        // Strict improvement only: ties keep the lexicographically first.
        if best_point.is_none_or(|b| game.payoff_of(point, player) > game.payoff_of(b, player)) {
            best_point = Some(point);
        }
    }
    let best_point = best_point.expect("nonempty fixed-point set").clone();
    let constant = constant_strategy(game, player, best_point[player]);
    let profile = mutual.with_strategy(constant);
    let point = {
        let fixed = fixed_points(game, &profile);
        debug_assert_eq!(fixed.len(), 1);
        fixed.into_iter().next().expect("constant against a table has one fixed point")
    };
    let payoff = game.payoff(&point).clone();
    Ok(ConstructionResult {
        tag: TheoremTag::General2p,
        mode,
        profile,
        intended_point: Some(point.clone()),
        payoff,
        notes: vec![format!(
            "player {} commits to the constant {} taken from their best deviation",
            player + 1,
            game.action_name(player, point[player])
        )],
        certificate: None,
    })
}

/// Searches for a profile supporting `target` in a game of four or more
/// players, so that no unilateral deviation pays.
///
/// Stage one looks for a table in which every profile other than the target
/// misses at least two confirmations — then no deviator can create any new
/// fixed point, and the support is payoff-independent. If that search
/// exhausts, stage two relaxes to unique-fixed-point tables whose deviation
/// values are capped by the target payoff, checked through the deviation
/// oracle.
pub fn build_support_n4<T: Scalar>(
    game: &Game<T>,
    target: &[usize],
    budgets: &Budgets,
) -> Result<ConstructionResult<T>, ConstructError<T>> {
    let n = game.num_players();
    if n < 4 {
        return Err(ConstructError::TooFewPlayers { got: n });
    }
    for player in 0..n {
        if game.action_count(player) < 2 {
            return Err(ConstructError::ActionSetTooSmall { player });
        }
    }

    let mut nodes_spent = 0u64;
    let strict = support_search(game, target, n - 2, budgets.search_nodes, &mut nodes_spent, None);
    match strict {
        SupportOutcome::Found(profile) => {
            let certificate = is_cse(game, &profile, SemanticsMode::DOMINANT_ZERO, budgets)?;
            debug_assert!(certificate.is_equilibrium());
            let payoff = game.payoff(target).clone();
            Ok(ConstructionResult {
                tag: TheoremTag::SupportN4,
                mode: SemanticsMode::DOMINANT_ZERO,
                profile,
                intended_point: Some(target.to_vec()),
                payoff,
                notes: vec![
                    "strict support: no deviator can create any new fixed point".to_string(),
                ],
                certificate: Some(certificate),
            })
        }
        SupportOutcome::Exhausted { complete } => {
            let strict_complete = complete;
            let remaining = budgets.search_nodes.saturating_sub(nodes_spent);
            let relaxed = support_search(
                game,
                target,
                n - 1,
                remaining,
                &mut nodes_spent,
                Some(budgets),
            );
            match relaxed {
                SupportOutcome::Found(profile) => {
                    let certificate =
                        is_cse(game, &profile, SemanticsMode::DOMINANT_ZERO, budgets)?;
                    debug_assert!(certificate.is_equilibrium());
                    let payoff = game.payoff(target).clone();
                    Ok(ConstructionResult {
                        tag: TheoremTag::SupportN4,
                        mode: SemanticsMode::DOMINANT_ZERO,
                        profile,
                        intended_point: Some(target.to_vec()),
                        payoff,
                        notes: vec![
                            "relaxed support: deviations exist but none is profitable"
                                .to_string(),
                        ],
                        certificate: Some(certificate),
                    })
                }
                SupportOutcome::Exhausted { complete } => Err(ConstructError::SearchExhausted {
                    nodes: nodes_spent,
                    complete: strict_complete && complete,
                }),
            }
        }
    }
}

enum SupportOutcome {
    Found(ConditionalProfile),
    Exhausted { complete: bool },
}

/// Depth-first search over all table entries. Every entry `(player, key)`
/// set to `v` confirms exactly one profile, `(v, key)`; the target keys are
/// pinned and every other profile may collect at most `max_confirms`
/// confirmations. When `verify` is set, full assignments must additionally
/// pass the per-player deviation-value cap at the target.
fn support_search<T: Scalar>(
    game: &Game<T>,
    target: &[usize],
    max_confirms: usize,
    node_budget: u64,
    nodes_spent: &mut u64,
    verify: Option<&Budgets>,
) -> SupportOutcome {
    let n = game.num_players();
    // Variable layout: (player, key) in ascending order, pinned target keys
    // assigned up front.
    let mut layout = Vec::new();
    for player in 0..n {
        for key in 0..game.opponent_profile_count(player) {
            layout.push((player, key));
        }
    }
    let target_keys: Vec<usize> = (0..n)
        .map(|p| game.opponent_index(p, &game.without_player(target, p)))
        .collect();
    let target_index = game.profile_index(target);

    let mut confirms = vec![0usize; game.profile_count()];
    let mut tables: Vec<Vec<Option<usize>>> = (0..n)
        .map(|p| vec![None; game.opponent_profile_count(p)])
        .collect();

    // Confirmed profile of entry (player, key) = value.
    let confirmed_profile = |player: usize, key: usize, value: usize| {
        let opp = game.opponent_profile_from_index(player, key);
        game.profile_index(&game.with_player(&opp, player, value))
    };

    for player in 0..n {
        tables[player][target_keys[player]] = Some(target[player]);
        confirms[target_index] += 1;
    }

    let free_vars: Vec<(usize, usize)> = layout
        .iter()
        .copied()
        .filter(|&(p, k)| k != target_keys[p])
        .collect();

    enum Dfs {
        Found(ConditionalProfile),
        NotFound,
        BudgetHit,
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs<T: Scalar>(
        game: &Game<T>,
        target: &[usize],
        free_vars: &[(usize, usize)],
        assigned: &mut Vec<bool>,
        remaining: usize,
        max_confirms: usize,
        target_index: usize,
        node_budget: u64,
        nodes_spent: &mut u64,
        verify: Option<&Budgets>,
        tables: &mut Vec<Vec<Option<usize>>>,
        confirms: &mut Vec<usize>,
        confirmed_profile: &impl Fn(usize, usize, usize) -> usize,
    ) -> Dfs {
        let n = game.num_players();
        if remaining == 0 {
            let profile = ConditionalProfile::new(
                tables
                    .iter()
                    .enumerate()
                    .map(|(p, t)| {
                        ConditionalStrategy::new(p, t.iter().map(|v| v.expect("assigned")).collect())
                    })
                    .collect(),
            );
            let accept = match verify {
                None => true,
                Some(_) => (0..n).all(|player| {
                    best_unilateral_deviation_value(
                        game,
                        &profile,
                        player,
                        SemanticsMode::DOMINANT_ZERO,
                    )
                    .map(|(value, _)| &value <= game.payoff_of(target, player))
                    .unwrap_or(false)
                }),
            };
            return if accept { Dfs::Found(profile) } else { Dfs::NotFound };
        }
        // Fail-first: pick the unassigned entry with the fewest feasible
        // values (ties resolve to the lowest variable index).
        let mut chosen = None;
        let mut best_count = usize::MAX;
        for (var, &(player, key)) in free_vars.iter().enumerate() {
            if assigned[var] {
                continue;
            }
            let feasible = (0..game.action_count(player))
                .filter(|&value| {
                    let idx = confirmed_profile(player, key, value);
                    let limit = if idx == target_index { n } else { max_confirms };
                    confirms[idx] < limit
                })
                .count();
            if feasible < best_count {
                best_count = feasible;
                chosen = Some(var);
                if feasible == 0 {
                    return Dfs::NotFound;
                }
            }
        }
        let var = chosen.expect("remaining > 0 implies an unassigned entry");
        let (player, key) = free_vars[var];
        assigned[var] = true;
        for value in 0..game.action_count(player) {
            if *nodes_spent >= node_budget {
                assigned[var] = false;
                return Dfs::BudgetHit;
            }
            *nodes_spent += 1;
            let idx = confirmed_profile(player, key, value);
            let limit = if idx == target_index { n } else { max_confirms };
            if confirms[idx] + 1 > limit {
                continue;
            }
            tables[player][key] = Some(value);
            confirms[idx] += 1;
            let result = dfs(
                game,
                target,
                free_vars,
                assigned,
                remaining - 1,
                max_confirms,
                target_index,
                node_budget,
                nodes_spent,
                verify,
                tables,
                confirms,
                confirmed_profile,
            );
            tables[player][key] = None;
            confirms[idx] -= 1;
            match result {
                Dfs::NotFound => {}
                done => {
                    assigned[var] = false;
                    return done;
                }
            }
        }
        assigned[var] = false;
        Dfs::NotFound
    }

    match dfs(
        game,
        target,
        &free_vars,
        &mut vec![false; free_vars.len()],
        free_vars.len(),
        max_confirms,
        target_index,
        node_budget,
        nodes_spent,
        verify,
        &mut tables,
        &mut confirms,
        &confirmed_profile,
    ) {
        Dfs::Found(profile) => SupportOutcome::Found(profile),
        Dfs::NotFound => SupportOutcome::Exhausted { complete: true },
        Dfs::BudgetHit => SupportOutcome::Exhausted { complete: false },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::conditional::classify;
    use crate::deviation::{is_strong_ce, Verdict};
    use crate::scalar::{int, ratio, Rational};

    fn budgets() -> Budgets {
        Budgets::default()
    }

    #[test]
    fn existence_in_prisoners_dilemma_reaches_mutual_defection() {
        let g = catalog::prisoners_dilemma();
        let result = build_existence(&g);
        assert_eq!(result.intended_point.as_deref(), Some(&[1usize, 1][..]));
        assert_eq!(result.payoff, vec![int::<Rational>(1), int(1)]);
        let report = classify(&g, &result.profile, result.mode);
        assert!(report.is_agreement);
        assert_eq!(report.fixed_points, vec![vec![1, 1]]);
    }

    #[test]
    fn existence_follows_sequential_dominance() {
        // Dominance-solvable 2x2: row 1 and column 1 strictly dominant.
        let g = crate::game::Game::<Rational>::from_payoffs(
            &[2, 2],
            vec![
                vec![int(3), int(3)],
                vec![int(1), int(2)],
                vec![int(2), int(1)],
                vec![int(0), int(0)],
            ],
        )
        .unwrap();
        let result = build_existence(&g);
        assert_eq!(result.intended_point.as_deref(), Some(&[0usize, 0][..]));
    }

    #[test]
    fn existence_with_single_action_players() {
        let g = catalog::constant_game(&[1, 1, 1], 2);
        let result = build_existence(&g);
        assert_eq!(result.intended_point.as_deref(), Some(&[0usize, 0, 0][..]));
    }

    #[test]
    fn existence_chain_is_constant_in_prefix() {
        let g = catalog::three_player_no_strong_ce();
        let result = build_existence(&g);
        let s2 = result.profile.strategy(1);
        // Player 2's table may depend on player 3's action only: entries at
        // (a1, a3) and (a1', a3) coincide.
        for a3 in 0..2 {
            let low = s2.table[g.opponent_index(1, &[0, a3])];
            let high = s2.table[g.opponent_index(1, &[1, a3])];
            assert_eq!(low, high);
        }
        // Player 3's strategy is constant.
        let s3 = result.profile.strategy(2);
        assert!(s3.table.iter().all(|&v| v == s3.table[0]));
    }

    #[test]
    fn folk_supports_cooperation_in_pd() {
        let g = catalog::prisoners_dilemma();
        let result = build_folk(&g, &[0, 0]).unwrap();
        let s1 = result.profile.strategy(0);
        let s2 = result.profile.strategy(1);
        // On-path C, off-path D (property of punishment argmins in the PD).
        assert_eq!(s1.table, vec![0, 1]);
        assert_eq!(s2.table, vec![0, 1]);
        assert_eq!(result.payoff, vec![int::<Rational>(3), int(3)]);
        let report = classify(&g, &result.profile, result.mode);
        assert!(report.is_agreement);
        assert_eq!(report.dominant_point.as_deref(), Some(&[0usize, 0][..]));
    }

    #[test]
    fn folk_rejects_targets_below_maximin() {
        let g = catalog::prisoners_dilemma();
        let err = build_folk(&g, &[0, 1]).unwrap_err();
        assert_eq!(
            err,
            ConstructError::NotIndividuallyRational {
                player: 0,
                maximin: int(1),
                target_value: int(0),
            }
        );
    }

    #[test]
    fn folk_accepts_any_pure_nash_profile() {
        let g = catalog::pure_coordination();
        for nash in pure_nash_profiles(&g) {
            let result = build_folk(&g, &nash).unwrap();
            assert_eq!(result.intended_point.as_deref(), Some(nash.as_slice()));
        }
    }

    #[test]
    fn pareto3_on_the_catalog_trio() {
        let g = catalog::three_player_no_strong_ce();
        let result = build_pareto3(&g).unwrap();
        assert_eq!(result.intended_point.as_deref(), Some(&[0usize, 0, 0][..]));
        assert_eq!(result.payoff, vec![int::<Rational>(2), int(1), int(0)]);
        let fixed = fixed_points(&g, &result.profile);
        assert_eq!(fixed, vec![vec![0, 0, 0]]);
        // The case table: player 1 plays the off-profile action y exactly
        // when one of the others leaves the anchor.
        let s1 = result.profile.strategy(0);
        assert_eq!(s1.table, vec![0, 1, 1, 0]);
    }

    #[test]
    fn pareto3_handles_all_equal_payoffs() {
        let g = catalog::constant_game(&[2, 2, 2], 1);
        let result = build_pareto3(&g).unwrap();
        let fixed = fixed_points(&g, &result.profile);
        assert_eq!(fixed.len(), 1);
        assert_eq!(fixed[0], result.intended_point.unwrap());
    }

    #[test]
    fn pareto3_rejects_small_action_sets_and_wrong_arity() {
        let g = catalog::constant_game(&[2, 1, 2], 0);
        assert_eq!(
            build_pareto3(&g).unwrap_err(),
            ConstructError::<Rational>::ActionSetTooSmall { player: 1 }
        );
        let g = catalog::prisoners_dilemma();
        assert_eq!(
            build_pareto3(&g).unwrap_err(),
            ConstructError::<Rational>::NotThreePlayers { got: 2 }
        );
    }

    #[test]
    fn strong_builder_on_coordination() {
        let g = catalog::pure_coordination();
        let result = build_strong(&g).unwrap();
        assert_eq!(result.intended_point.as_deref(), Some(&[0usize, 0][..]));
        let fixed = fixed_points(&g, &result.profile);
        assert_eq!(fixed, vec![vec![0, 0]]);
        let cert = is_strong_ce(&g, &result.profile, SemanticsMode::DOMINANT_ZERO).unwrap();
        assert!(cert.is_equilibrium());
    }

    #[test]
    fn strong_builder_rejects_the_catalog_trio() {
        let g = catalog::three_player_no_strong_ce();
        assert_eq!(
            build_strong(&g).unwrap_err(),
            ConstructError::<Rational>::NoDoubleMaxProfile
        );
    }

    #[test]
    fn strong_builder_on_common_payoff_game() {
        let g = crate::game::Game::<Rational>::from_payoffs(
            &[2, 2],
            vec![
                vec![int(1), int(1)],
                vec![int(0), int(0)],
                vec![int(0), int(0)],
                vec![int(4), int(4)],
            ],
        )
        .unwrap();
        let result = build_strong(&g).unwrap();
        assert_eq!(result.intended_point.as_deref(), Some(&[1usize, 1][..]));
        let cert = is_strong_ce(&g, &result.profile, SemanticsMode::UNIQUE_ZERO).unwrap();
        assert!(cert.is_equilibrium());
    }

    #[test]
    fn general_2p_uses_pure_nash_when_present() {
        let g = catalog::prisoners_dilemma();
        let result = build_general_2p(&g, &budgets()).unwrap();
        assert_eq!(result.intended_point.as_deref(), Some(&[1usize, 1][..]));
        assert_eq!(result.payoff, vec![int::<Rational>(1), int(1)]);
    }

    #[test]
    fn general_2p_keeps_mutual_best_responses_in_pennies() {
        let g = catalog::matching_pennies();
        let result = build_general_2p(&g, &budgets()).unwrap();
        assert_eq!(result.intended_point, None);
        assert_eq!(result.payoff, vec![ratio::<Rational>(1, 2), ratio(1, 2)]);
        let cert = is_cse(&g, &result.profile, result.mode, &budgets()).unwrap();
        assert!(cert.is_equilibrium());
    }

    #[test]
    fn general_2p_with_singleton_opponent_uses_pure_nash() {
        // m_2 = 1: player 1 maximizes a one-column game, a pure Nash exists.
        let g = crate::game::Game::<Rational>::from_payoffs(
            &[2, 1],
            vec![vec![int(1), int(0)], vec![int(4), int(0)]],
        )
        .unwrap();
        let result = build_general_2p(&g, &budgets()).unwrap();
        assert_eq!(result.intended_point.as_deref(), Some(&[1usize, 0][..]));
        assert_eq!(result.payoff, vec![int::<Rational>(4), int(0)]);
    }

    #[test]
    fn general_2p_rejects_other_arities() {
        let g = catalog::three_player_no_strong_ce();
        assert!(matches!(
            build_general_2p(&g, &budgets()).unwrap_err(),
            ConstructError::NotTwoPlayers { got: 3 }
        ));
    }

    #[test]
    fn support_n4_strict_search_succeeds_on_flat_payoffs() {
        let g = catalog::constant_game(&[2, 2, 2, 2], 1);
        let target = vec![1, 0, 1, 0];
        let result = build_support_n4(&g, &target, &budgets()).unwrap();
        assert_eq!(result.intended_point.as_deref(), Some(target.as_slice()));
        let fixed = fixed_points(&g, &result.profile);
        assert_eq!(fixed, vec![target.clone()]);
        let cert = result.certificate.unwrap();
        assert_eq!(cert.verdict, Verdict::NoProfitableDeviation);
        // Strict support: no player can create a second fixed point.
        for player in 0..4 {
            let residual =
                crate::deviation::ResidualFixedSet::compute(&g, &result.profile, &[player]);
            assert_eq!(residual.profiles, vec![target.clone()]);
        }
    }

    #[test]
    fn support_n4_rejects_three_players() {
        let g = catalog::three_player_no_strong_ce();
        assert!(matches!(
            build_support_n4(&g, &[0, 0, 0], &budgets()).unwrap_err(),
            ConstructError::TooFewPlayers { got: 3 }
        ));
    }

    #[test]
    fn support_n4_reports_budget_exhaustion_honestly() {
        let g = catalog::constant_game(&[2, 2, 2, 2], 1);
        let starved = Budgets { search_nodes: 3, ..budgets() };
        match build_support_n4(&g, &[0, 0, 0, 0], &starved).unwrap_err() {
            ConstructError::SearchExhausted { nodes, complete } => {
                assert!(nodes <= 6);
                assert!(!complete);
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }
}
