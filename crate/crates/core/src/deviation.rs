//! Deviation analysis: is a conditional profile an equilibrium?
//!
//! The strategy space of one player has size `m_i ^ prod_{j != i} m_j`, so
//! checking deviations by enumeration is doubly exponential in the game
//! size. Under zero disagreement payoffs a profitable deviation must turn
//! the profile into an agreement, and the fixed points a deviator can
//! arrange are fully described by the residual fixed set of the others:
//!
//! * `F_{-i} = {a : s_j(a_{-j}) = a_j for all j != i}`;
//! * grouping `F_{-i}` by the opponent part `a_{-i}` yields classes; the
//!   deviator picks exactly one action per class key, so each class
//!   contributes one fixed point (a member is selected) or none (an action
//!   outside the class is selected, possible iff the class is not all of
//!   `A_i`).
//!
//! This reduces the best deviation to a polynomial scan over candidate
//! agreement points. [`brute_force_deviation_value`] keeps the naive
//! enumeration as an independent oracle; the two must agree exactly, which
//! the test suite checks on randomized corpora.
//!
//! Averaging disagreement payoffs breaks the agreement-only argument (a
//! deviation may profit without creating any fixed point), so average-mode
//! queries are answered by brute force only.

use num_bigint::BigUint;
use thiserror::Error;

use crate::conditional::{
    classify, strategy_space_size, AgreementReport, AgreementRule, ConditionalProfile,
    ConditionalStrategy, DisagreementRule, SemanticsMode,
};
use crate::game::{pareto_dominates_weakly, ActionProfile, Game, PayoffVector};
use crate::scalar::Scalar;

/// Enumeration limits. Budgets are explicit configuration; nothing is
/// silently truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Max strategy-space size for one player's brute-force deviation scan.
    pub deviation: u64,
    /// Max number of conditional profiles for exhaustive enumeration.
    pub enumeration: u64,
    /// Max support size for mixed-strategy decomposition.
    pub decompose: u64,
    /// Max backtracking nodes for the n-player support search.
    pub search_nodes: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            deviation: 1_000_000,
            enumeration: 10_000_000,
            decompose: 1_000_000,
            search_nodes: 50_000_000,
        }
    }
}

impl Budgets {
    /// Sets every limit to `n`, the CLI's single budget knob.
    pub fn uniform(n: u64) -> Self {
        Budgets { deviation: n, enumeration: n, decompose: n, search_nodes: n }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeviationError {
    #[error("{operation} does not support average disagreement semantics; use brute force")]
    UnsupportedSemantics { operation: &'static str },
    #[error("enumeration of size {required} exceeds budget {budget}")]
    BudgetExceeded { required: BigUint, budget: u64 },
}

/// The profiles every player outside `coalition` confirms:
/// `F_{-C} = {a : s_j(a_{-j}) = a_j for all j not in C}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualFixedSet {
    pub coalition: Vec<usize>,
    /// Members in ascending profile-index order.
    pub profiles: Vec<ActionProfile>,
}

impl ResidualFixedSet {
    pub fn compute<T: Scalar>(
        game: &Game<T>,
        profile: &ConditionalProfile,
        coalition: &[usize],
    ) -> Self {
        let members = game
            .profiles()
            .filter(|a| {
                profile
                    .strategies
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !coalition.contains(j))
                    .all(|(j, s)| s.respond(game, a) == a[j])
            })
            .collect();
        ResidualFixedSet { coalition: coalition.to_vec(), profiles: members }
    }

    /// For a singleton coalition `{i}`: classes of `F_{-i}` keyed by the
    /// opponent-profile index, each holding the selectable actions of `i`
    /// in ascending order. Only nonempty classes appear; they partition
    /// the set.
    pub fn singleton_classes<T: Scalar>(&self, game: &Game<T>) -> Vec<(usize, Vec<usize>)> {
        assert_eq!(self.coalition.len(), 1, "classes are defined for singletons");
        let player = self.coalition[0];
        let mut classes: Vec<(usize, Vec<usize>)> = Vec::new();
        for a in &self.profiles {
            let key = game.opponent_index(player, &game.without_player(a, player));
            match classes.iter_mut().find(|(k, _)| *k == key) {
                Some((_, members)) => members.push(a[player]),
                None => classes.push((key, vec![a[player]])),
            }
        }
        classes.sort_by_key(|(k, _)| *k);
        for (_, members) in &mut classes {
            members.sort_unstable();
        }
        classes
    }
}

/// The best payoff player `i` can reach by unilaterally deviating from
/// `profile`, with a witnessing table when some agreement is reachable.
///
/// Zero-disagreement modes only; the maximum ranges over the player's whole
/// strategy space, including their current strategy.
pub fn best_unilateral_deviation_value<T: Scalar>(
    game: &Game<T>,
    profile: &ConditionalProfile,
    player: usize,
    mode: SemanticsMode,
) -> Result<(T, Option<ConditionalStrategy>), DeviationError> {
    if mode.disagreement != DisagreementRule::Zero {
        return Err(DeviationError::UnsupportedSemantics {
            operation: "best_unilateral_deviation_value",
        });
    }
    let residual = ResidualFixedSet::compute(game, profile, &[player]);
    let classes = residual.singleton_classes(game);
    let m = game.action_count(player);

    let mut best: Option<(T, &ActionProfile)> = None;
    for candidate in &residual.profiles {
        let here = game.payoff(candidate);
        let own_key = game.opponent_index(player, &game.without_player(candidate, player));
        let qualifies = classes.iter().filter(|(key, _)| *key != own_key).all(
            |(key, members)| {
                let excludable = members.len() < m;
                match mode.agreement {
                    AgreementRule::Unique => excludable,
                    AgreementRule::Dominant => {
                        excludable
                            || members.iter().any(|&b| {
                                let other = game.with_player(
                                    &game.opponent_profile_from_index(player, *key),
                                    player,
                                    b,
                                );
                                pareto_dominates_weakly(here, game.payoff(&other))
                            })
                    }
                }
            },
        );
        if qualifies && best.as_ref().is_none_or(|(v, _)| &here[player] > v) {
            best = Some((here[player].clone(), candidate));
        }
    }

    match best {
        None => Ok((T::zero(), None)),
        Some((value, candidate)) => {
            let witness = reconstruct_witness(game, player, &classes, candidate, mode, m);
            Ok((value, Some(witness)))
        }
    }
}

/// Builds the deviation table that realizes a qualified candidate: select
/// the candidate in its own class, exclude every excludable class with the
/// lowest outside action, otherwise select the lowest dominated member.
fn reconstruct_witness<T: Scalar>(
    game: &Game<T>,
    player: usize,
    classes: &[(usize, Vec<usize>)],
    candidate: &ActionProfile,
    mode: SemanticsMode,
    m: usize,
) -> ConditionalStrategy {
    let own_key = game.opponent_index(player, &game.without_player(candidate, player));
    let here = game.payoff(candidate);
    let mut table = vec![0usize; game.opponent_profile_count(player)];
    for (key, members) in classes {
        if *key == own_key {
            table[*key] = candidate[player];
            continue;
        }
        if members.len() < m {
            table[*key] = (0..m).find(|a| !members.contains(a)).expect("class is excludable");
        } else {
            debug_assert_eq!(mode.agreement, AgreementRule::Dominant);
            table[*key] = members
                .iter()
                .copied()
                .find(|&b| {
                    let other = game.with_player(
                        &game.opponent_profile_from_index(player, *key),
                        player,
                        b,
                    );
                    pareto_dominates_weakly(here, game.payoff(&other))
                })
                .expect("candidate qualified, so a dominated member exists");
        }
    }
    ConditionalStrategy::new(player, table)
}

/// Iterates all tables of `player` in ascending odometer order (last entry
/// fastest), yielding `(value, first argmax table)`.
pub(crate) fn brute_force_best_deviation<T: Scalar>(
    game: &Game<T>,
    profile: &ConditionalProfile,
    player: usize,
    mode: SemanticsMode,
    budgets: &Budgets,
) -> Result<(T, ConditionalStrategy), DeviationError> {
    let size = strategy_space_size(game, player);
    if size > BigUint::from(budgets.deviation) {
        return Err(DeviationError::BudgetExceeded {
            required: size,
            budget: budgets.deviation,
        });
    }
    let m = game.action_count(player);
    let keys = game.opponent_profile_count(player);
    let mut table = vec![0usize; keys];
    let mut best: Option<(T, Vec<usize>)> = None;
    loop {
        let deviated = profile.with_strategy(ConditionalStrategy::new(player, table.clone()));
        let value = classify(game, &deviated, mode).payoff[player].clone();
        if best.as_ref().is_none_or(|(v, _)| &value > v) {
            best = Some((value, table.clone()));
        }
        // Odometer increment.
        let mut slot = keys;
        loop {
            if slot == 0 {
                let (value, argmax) = best.expect("at least one table enumerated");
                return Ok((value, ConditionalStrategy::new(player, argmax)));
            }
            slot -= 1;
            table[slot] += 1;
            if table[slot] < m {
                break;
            }
            table[slot] = 0;
        }
    }
}

/// Exact maximum of `U_i(s'_i, s_{-i})` over the player's whole strategy
/// space, by enumerating every table. Works for all semantics modes.
pub fn brute_force_deviation_value<T: Scalar>(
    game: &Game<T>,
    profile: &ConditionalProfile,
    player: usize,
    mode: SemanticsMode,
    budgets: &Budgets,
) -> Result<T, DeviationError> {
    brute_force_best_deviation(game, profile, player, mode, budgets).map(|(value, _)| value)
}

/// Verdict of an equilibrium check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NoProfitableDeviation,
    DeviationFound,
}

/// Payoff improvement of one deviator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviatorGain<T: Scalar> {
    pub player: usize,
    pub before: T,
    pub after: T,
}

/// Witness that a profile is or is not a (strong) conditional strategy
/// equilibrium. When a deviation is found, `outcome` holds the
/// re-classified deviated profile, so the claimed payoffs are reproducible
/// by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationCertificate<T: Scalar> {
    pub verdict: Verdict,
    pub mode: SemanticsMode,
    /// Classification of the profile under test.
    pub base: AgreementReport<T>,
    pub deviators: Vec<usize>,
    pub deviations: Vec<ConditionalStrategy>,
    /// Classification of the deviated profile, when a deviation was found.
    pub outcome: Option<AgreementReport<T>>,
    pub gains: Vec<DeviatorGain<T>>,
}

impl<T: Scalar> DeviationCertificate<T> {
    pub fn is_equilibrium(&self) -> bool {
        self.verdict == Verdict::NoProfitableDeviation
    }

    fn no_deviation(mode: SemanticsMode, base: AgreementReport<T>) -> Self {
        DeviationCertificate {
            verdict: Verdict::NoProfitableDeviation,
            mode,
            base,
            deviators: Vec::new(),
            deviations: Vec::new(),
            outcome: None,
            gains: Vec::new(),
        }
    }
}

/// Checks the conditional strategy equilibrium property: no single player
/// can increase their induced payoff by switching tables.
///
/// Zero-disagreement modes use the polynomial oracle; average modes fall
/// back to budgeted brute force.
pub fn is_cse<T: Scalar>(
    game: &Game<T>,
    profile: &ConditionalProfile,
    mode: SemanticsMode,
    budgets: &Budgets,
) -> Result<DeviationCertificate<T>, DeviationError> {
    let base = classify(game, profile, mode);
    for player in 0..game.num_players() {
        let (value, witness) = match mode.disagreement {
            DisagreementRule::Zero => best_unilateral_deviation_value(game, profile, player, mode)?,
            DisagreementRule::Average => {
                let (value, table) =
                    brute_force_best_deviation(game, profile, player, mode, budgets)?;
                (value, Some(table))
            }
        };
        if value > base.payoff[player] {
            let witness = witness.expect("an improving deviation has a witness table");
            let outcome = classify(game, &profile.with_strategy(witness.clone()), mode);
            debug_assert_eq!(outcome.payoff[player], value);
            let gain = DeviatorGain {
                player,
                before: base.payoff[player].clone(),
                after: value,
            };
            return Ok(DeviationCertificate {
                verdict: Verdict::DeviationFound,
                mode,
                base,
                deviators: vec![player],
                deviations: vec![witness],
                outcome: Some(outcome),
                gains: vec![gain],
            });
        }
    }
    Ok(DeviationCertificate::no_deviation(mode, base))
}

/// A feasible joint deviation of a coalition, with the agreement point it
/// establishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDeviation<T: Scalar> {
    pub coalition: Vec<usize>,
    pub tables: Vec<ConditionalStrategy>,
    pub target: ActionProfile,
    pub outcome: AgreementReport<T>,
    pub gains: Vec<DeviatorGain<T>>,
}

/// Searches for a joint deviation of `coalition` making every member
/// strictly better off. Zero-disagreement modes only: a profitable
/// coalition deviation must establish an agreement, whose point lies in
/// the residual fixed set of the non-deviators.
///
/// For each candidate target the coalition's table entries form a small
/// constraint problem: the target must be confirmed by every member, and
/// every other residual profile must either lose a confirmation or (under
/// the dominant rule) be weakly dominated by the target. Solved by
/// backtracking; don't-care entries are filled with the lowest action.
pub fn coalition_deviation_exists<T: Scalar>(
    game: &Game<T>,
    profile: &ConditionalProfile,
    coalition: &[usize],
    mode: SemanticsMode,
) -> Result<Option<JointDeviation<T>>, DeviationError> {
    if mode.disagreement != DisagreementRule::Zero {
        return Err(DeviationError::UnsupportedSemantics {
            operation: "coalition_deviation_exists",
        });
    }
    assert!(!coalition.is_empty(), "coalition must be nonempty");
    let mut coalition = coalition.to_vec();
    coalition.sort_unstable();
    coalition.dedup();

    let base = classify(game, profile, mode);
    let residual = ResidualFixedSet::compute(game, profile, &coalition);

    for target in &residual.profiles {
        let here = game.payoff(target);
        let improves_all = coalition.iter().all(|&j| here[j] > base.payoff[j]);
        if !improves_all {
            continue;
        }
        if let Some(tables) = solve_coalition_csp(game, &coalition, &residual, target, mode) {
            let mut deviated = profile.clone();
            for table in &tables {
                deviated = deviated.with_strategy(table.clone());
            }
            let outcome = classify(game, &deviated, mode);
            debug_assert!(outcome.is_agreement);
            debug_assert_eq!(&outcome.payoff, here);
            let gains = coalition
                .iter()
                .map(|&j| DeviatorGain {
                    player: j,
                    before: base.payoff[j].clone(),
                    after: here[j].clone(),
                })
                .collect();
            return Ok(Some(JointDeviation {
                coalition,
                tables,
                target: target.clone(),
                outcome,
                gains,
            }));
        }
    }
    Ok(None)
}

/// Feasibility of making `target` the agreement point: returns full tables
/// for each coalition member, or `None`.
fn solve_coalition_csp<T: Scalar>(
    game: &Game<T>,
    coalition: &[usize],
    residual: &ResidualFixedSet,
    target: &ActionProfile,
    mode: SemanticsMode,
) -> Option<Vec<ConditionalStrategy>> {
    let target_payoff = game.payoff(target);

    // Variables: coalition entries at keys that occur in the residual set.
    // Every fixed point of the deviated profile lies in the residual set,
    // so entries at other keys are don't-cares.
    let mut entries: Vec<(usize, usize)> = Vec::new();
    for &member in coalition {
        let mut keys: Vec<usize> = residual
            .profiles
            .iter()
            .map(|a| game.opponent_index(member, &game.without_player(a, member)))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        entries.extend(keys.into_iter().map(|k| (member, k)));
    }
    let var_of = |member: usize, key: usize| {
        entries
            .iter()
            .position(|&(m, k)| m == member && k == key)
            .expect("residual keys are variables")
    };

    // Pinned values: every member confirms the target.
    let mut assignment: Vec<Option<usize>> = vec![None; entries.len()];
    let mut pinned = vec![false; entries.len()];
    for &member in coalition {
        let key = game.opponent_index(member, &game.without_player(target, member));
        let var = var_of(member, key);
        assignment[var] = Some(target[member]);
        pinned[var] = true;
    }

    // Kill clauses: residual profiles that may not stay fixed. A clause is
    // satisfied as soon as some member entry differs from the profile.
    let mut clauses: Vec<Vec<(usize, usize)>> = Vec::new();
    for a in &residual.profiles {
        if a == target {
            continue;
        }
        if mode.agreement == AgreementRule::Dominant
            && pareto_dominates_weakly(target_payoff, game.payoff(a))
        {
            continue; // may stay fixed; the target still dominates it
        }
        let literals = coalition
            .iter()
            .map(|&member| {
                let key = game.opponent_index(member, &game.without_player(a, member));
                (var_of(member, key), a[member])
            })
            .collect();
        clauses.push(literals);
    }

    let violated = |assignment: &[Option<usize>]| {
        clauses.iter().any(|clause| {
            clause
                .iter()
                .all(|&(var, action)| assignment[var] == Some(action))
        })
    };

    if violated(&assignment) {
        return None;
    }

    let order: Vec<usize> = (0..entries.len()).filter(|&v| !pinned[v]).collect();
    let domains: Vec<usize> = entries
        .iter()
        .map(|&(member, _)| game.action_count(member))
        .collect();
    if !backtrack(&order, &domains, 0, &mut assignment, &violated) {
        return None;
    }

    let mut tables = Vec::new();
    for &member in coalition {
        let mut table = vec![0usize; game.opponent_profile_count(member)];
        for (var, &(m, key)) in entries.iter().enumerate() {
            if m == member {
                table[key] = assignment[var].expect("search assigned every variable");
            }
        }
        tables.push(ConditionalStrategy::new(member, table));
    }
    Some(tables)
}

/// Depth-first assignment over `order`, lowest action first.
fn backtrack(
    order: &[usize],
    domains: &[usize],
    depth: usize,
    assignment: &mut Vec<Option<usize>>,
    violated: &impl Fn(&[Option<usize>]) -> bool,
) -> bool {
    let Some(&var) = order.get(depth) else {
        return true;
    };
    for action in 0..domains[var] {
        assignment[var] = Some(action);
        if !violated(assignment) && backtrack(order, domains, depth + 1, assignment, violated) {
            return true;
        }
    }
    assignment[var] = None;
    false
}

/// Checks the strong conditional equilibrium property by iterating every
/// nonempty coalition, in bitmask order with player 1 as the lowest bit.
pub fn is_strong_ce<T: Scalar>(
    game: &Game<T>,
    profile: &ConditionalProfile,
    mode: SemanticsMode,
) -> Result<DeviationCertificate<T>, DeviationError> {
    let n = game.num_players();
    let base = classify(game, profile, mode);
    for mask in 1u64..(1u64 << n) {
        let coalition: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if let Some(joint) = coalition_deviation_exists(game, profile, &coalition, mode)? {
            return Ok(DeviationCertificate {
                verdict: Verdict::DeviationFound,
                mode,
                base,
                deviators: joint.coalition,
                deviations: joint.tables,
                outcome: Some(joint.outcome),
                gains: joint.gains,
            });
        }
    }
    Ok(DeviationCertificate::no_deviation(mode, base))
}

/// Exhaustively enumerates all conditional profiles of `game` and returns
/// the equilibria with their induced payoffs, in ascending odometer order
/// (player 1's table most significant, last table entry fastest).
pub fn enumerate_cse<T: Scalar>(
    game: &Game<T>,
    mode: SemanticsMode,
    budgets: &Budgets,
) -> Result<Vec<(ConditionalProfile, PayoffVector<T>)>, DeviationError> {
    let total: BigUint = (0..game.num_players())
        .map(|i| strategy_space_size(game, i))
        .product();
    if total > BigUint::from(budgets.enumeration) {
        return Err(DeviationError::BudgetExceeded {
            required: total,
            budget: budgets.enumeration,
        });
    }

    let n = game.num_players();
    let mut tables: Vec<Vec<usize>> = (0..n)
        .map(|i| vec![0usize; game.opponent_profile_count(i)])
        .collect();
    let mut found = Vec::new();
    loop {
        let profile = ConditionalProfile::new(
            tables
                .iter()
                .enumerate()
                .map(|(i, t)| ConditionalStrategy::new(i, t.clone()))
                .collect(),
        );
        let certificate = is_cse(game, &profile, mode, budgets)?;
        if certificate.is_equilibrium() {
            found.push((profile, certificate.base.payoff));
        }
        if !increment_tables(game, &mut tables) {
            return Ok(found);
        }
    }
}

/// Result of an exhaustive coalition-proofness sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongSweepResult<T: Scalar> {
    pub profiles_checked: u64,
    pub strong_equilibria: Vec<(ConditionalProfile, PayoffVector<T>)>,
}

/// Runs [`is_strong_ce`] on every conditional profile of the game.
pub fn enumerate_strong_ce<T: Scalar>(
    game: &Game<T>,
    mode: SemanticsMode,
    budgets: &Budgets,
) -> Result<StrongSweepResult<T>, DeviationError> {
    let total: BigUint = (0..game.num_players())
        .map(|i| strategy_space_size(game, i))
        .product();
    if total > BigUint::from(budgets.enumeration) {
        return Err(DeviationError::BudgetExceeded {
            required: total,
            budget: budgets.enumeration,
        });
    }
    let n = game.num_players();
    let mut tables: Vec<Vec<usize>> = (0..n)
        .map(|i| vec![0usize; game.opponent_profile_count(i)])
        .collect();
    let mut checked = 0u64;
    let mut strong = Vec::new();
    loop {
        let profile = ConditionalProfile::new(
            tables
                .iter()
                .enumerate()
                .map(|(i, t)| ConditionalStrategy::new(i, t.clone()))
                .collect(),
        );
        let certificate = is_strong_ce(game, &profile, mode)?;
        checked += 1;
        if certificate.is_equilibrium() {
            strong.push((profile, certificate.base.payoff));
        }
        if !increment_tables(game, &mut tables) {
            return Ok(StrongSweepResult { profiles_checked: checked, strong_equilibria: strong });
        }
    }
}

/// Odometer step over per-player tables; `false` on wrap-around.
fn increment_tables<T: Scalar>(game: &Game<T>, tables: &mut [Vec<usize>]) -> bool {
    for player in (0..tables.len()).rev() {
        let m = game.action_count(player);
        let table = &mut tables[player];
        for slot in (0..table.len()).rev() {
            table[slot] += 1;
            if table[slot] < m {
                return true;
            }
            table[slot] = 0;
        }
    }
    false
}
