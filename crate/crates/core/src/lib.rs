//! Solvers and verifiers for conditional strategy equilibrium (CSE) in
//! finite normal-form games.
//!
//! A conditional strategy commits a player to an action as a function of
//! everyone else's actions. This crate builds equilibria in that strategy
//! space (existence chains, folk-theorem support, Pareto-optimal
//! three-player constructions, coalition-proof profiles), and verifies them
//! with two independent routes: a polynomial deviation oracle and plain
//! brute-force enumeration. All arithmetic is exact — payoffs are rationals
//! and every argmax, domination tie and average is computed without
//! rounding.
//!
//! The core is generic over the payoff scalar (see [`scalar::Scalar`]);
//! the crate-root aliases fix it to arbitrary-precision rationals.
//!
//! ```
//! use cse_core::{build_existence, is_cse, catalog, Budgets, SemanticsMode};
//!
//! let game = catalog::prisoners_dilemma();
//! let built = build_existence(&game);
//! assert_eq!(built.intended_point.as_deref(), Some(&[1usize, 1][..])); // (D, D)
//!
//! let certificate = is_cse(&game, &built.profile, SemanticsMode::DOMINANT_ZERO,
//!     &Budgets::default()).unwrap();
//! assert!(certificate.is_equilibrium());
//! ```

pub mod catalog;
pub mod conditional;
pub mod constructors;
pub mod deviation;
pub mod game;
pub mod mixed;
pub mod scalar;

pub use conditional::{
    classify, constant_profile, constant_strategy, fixed_points, strategy_space_size,
    AgreementReport, AgreementRule, ConditionalProfile, ConditionalStrategy, DisagreementRule,
    SemanticsMode,
};
pub use constructors::{
    build_existence, build_folk, build_general_2p, build_pareto3, build_strong, build_support_n4,
    ConstructError, ConstructionResult, TheoremTag,
};
pub use deviation::{
    best_unilateral_deviation_value, brute_force_deviation_value, coalition_deviation_exists,
    enumerate_cse, enumerate_strong_ce, is_cse, is_strong_ce, Budgets, DeviationCertificate,
    DeviationError, DeviatorGain, JointDeviation, ResidualFixedSet, StrongSweepResult, Verdict,
};
pub use game::{
    best_responses, is_pareto_optimal, pareto_dominates_strictly, pareto_dominates_weakly,
    pareto_optimal_with_max_player, pure_maximin, pure_nash_profiles, ActionProfile, GameError,
};
pub use mixed::{
    decompose, phi_evaluate, verify_roundtrip, FiniteSupportMeasure, MixedError, MixedProfile,
    PartitionSpec, SimpleConditionalMixedStrategy,
};
pub use scalar::{Rational, Rational64, Scalar};

/// The default game type: exact arbitrary-precision rational payoffs.
pub type Game = game::Game<Rational>;

/// The default payoff vector type.
pub type PayoffVector = game::PayoffVector<Rational>;
