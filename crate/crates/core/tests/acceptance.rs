//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured detail. Every check is exact; there are no
//! tolerances anywhere.

use cse_core::scalar::{int, ratio};
use cse_core::{
    build_existence, build_folk, build_general_2p, build_pareto3, build_strong,
    best_unilateral_deviation_value, brute_force_deviation_value, catalog, classify,
    decompose, enumerate_cse, fixed_points, is_cse, is_pareto_optimal, is_strong_ce,
    mixed::verify_roundtrip, pareto_dominates_weakly, pure_maximin, pure_nash_profiles,
    strategy_space_size, Budgets, ConditionalProfile, ConditionalStrategy, Game, Rational,
    SemanticsMode,
};
use num_bigint::BigUint;
use rand::Rng;

mod common;

const ZERO_MODES: [SemanticsMode; 2] = [SemanticsMode::DOMINANT_ZERO, SemanticsMode::UNIQUE_ZERO];

fn budgets() -> Budgets {
    Budgets::default()
}

/// Criterion 1: the three-player catalog game has exactly zero strong
/// conditional equilibria among all 16^3 = 4096 conditional profiles,
/// under both agreement rules with zero disagreement.
#[test]
fn criterion_1_exhaustive_strong_ce_certificate() {
    let g = catalog::three_player_no_strong_ce();
    for mode in ZERO_MODES {
        let mut total = 0u32;
        let mut strong = 0u32;
        let mut tables: Vec<Vec<usize>> = (0..3).map(|_| vec![0usize; 4]).collect();
        'profiles: loop {
            let profile = ConditionalProfile::new(
                tables
                    .iter()
                    .enumerate()
                    .map(|(i, t)| ConditionalStrategy::new(i, t.clone()))
                    .collect(),
            );
            total += 1;
            if is_strong_ce(&g, &profile, mode).unwrap().is_equilibrium() {
                strong += 1;
            }
            // Odometer over the three 4-entry binary tables.
            for player in (0..3).rev() {
                for slot in (0..4).rev() {
                    tables[player][slot] += 1;
                    if tables[player][slot] < 2 {
                        continue 'profiles;
                    }
                    tables[player][slot] = 0;
                }
            }
            break;
        }
        assert_eq!(total, 4096);
        assert_eq!(strong, 0, "profiles unexpectedly coalition-proof under {mode:?}");
        println!(
            "acceptance criterion 1 ({mode:?}): PASS - 0 strong CE among {total} profiles"
        );
    }
}

/// Criterion 2: the existence construction verifies as an equilibrium on
/// 200 random games with 2-3 players and up to 3 actions each.
#[test]
fn criterion_2_existence_construction_always_verifies() {
    let mut rng = common::rng(2001);
    let shapes: [&[usize]; 6] = [&[2, 2], &[2, 3], &[3, 3], &[2, 2, 2], &[3, 2, 2], &[3, 3, 3]];
    let mut checked = 0;
    for case in 0..200 {
        let g = common::random_game(&mut rng, shapes[case % shapes.len()], 10);
        let result = build_existence(&g);
        let point = result.intended_point.clone().unwrap();
        let report = classify(&g, &result.profile, SemanticsMode::DOMINANT_ZERO);
        assert!(report.is_agreement);
        assert_eq!(report.payoff, *g.payoff(&point));
        let cert = is_cse(&g, &result.profile, SemanticsMode::DOMINANT_ZERO, &budgets()).unwrap();
        assert!(cert.is_equilibrium(), "existence output failed on game {case}");
        checked += 1;
    }
    println!("acceptance criterion 2: PASS - {checked}/200 existence constructions verified");
}

/// Criterion 3: the polynomial deviation oracle equals brute force on 520
/// random (game, profile, player) triples with strategy spaces up to 10^5,
/// under both agreement rules.
#[test]
fn criterion_3_oracle_equivalence() {
    let mut rng = common::rng(3001);
    // Shape mix keeps every strategy space within 10^5 (largest: 3^9).
    let mut shapes: Vec<&[usize]> = Vec::new();
    for _ in 0..150 {
        shapes.push(&[2, 2]);
    }
    for _ in 0..100 {
        shapes.push(&[2, 3]);
    }
    for _ in 0..100 {
        shapes.push(&[3, 3]);
    }
    for _ in 0..100 {
        shapes.push(&[2, 2, 2]);
    }
    for _ in 0..40 {
        shapes.push(&[2, 2, 3]);
    }
    for _ in 0..30 {
        shapes.push(&[3, 3, 3]);
    }
    let limit = BigUint::from(100_000u32);
    let mut checked = 0;
    for (case, dims) in shapes.iter().enumerate() {
        let g = common::random_game(&mut rng, dims, 10);
        let s = common::random_profile(&mut rng, &g);
        let player = rng.random_range(0..g.num_players());
        assert!(strategy_space_size(&g, player) <= limit);
        for mode in ZERO_MODES {
            let (fast, _) = best_unilateral_deviation_value(&g, &s, player, mode).unwrap();
            let slow = brute_force_deviation_value(&g, &s, player, mode, &budgets()).unwrap();
            assert_eq!(fast, slow, "oracle mismatch on triple {case} under {mode:?}");
        }
        checked += 1;
    }
    println!("acceptance criterion 3: PASS - oracle = brute force on {checked} triples x 2 rules");
}

/// Criterion 4: the two-player folk characterization, exhaustively over
/// all 2x2 games with payoffs in {0,1,2}: (a) every target weakly above
/// the maximin vector is supported by the folk construction; (b) no
/// enumerated equilibrium agreement point falls below it.
#[test]
fn criterion_4_folk_theorem_exhaustive() {
    let mode = SemanticsMode::DOMINANT_ZERO;
    let mut games = 0u32;
    let mut supported = 0u32;
    let mut enumerated = 0u32;
    for code in 0..6561u32 {
        // Base-3 digits of `code` fill the 4 payoff vectors.
        let mut digits = Vec::with_capacity(8);
        let mut rest = code;
        for _ in 0..8 {
            digits.push(int::<Rational>((rest % 3) as i64));
            rest /= 3;
        }
        let payoffs: Vec<Vec<Rational>> =
            digits.chunks(2).map(|pair| pair.to_vec()).collect();
        let g = Game::from_payoffs(&[2, 2], payoffs).unwrap();
        games += 1;

        let maximin: Vec<Rational> =
            (0..2).map(|player| pure_maximin(&g, player).0).collect();

        // (a) Build and verify every individually rational target.
        for target_idx in 0..4 {
            let target = g.profile_from_index(target_idx);
            if !pareto_dominates_weakly(g.payoff(&target), &maximin) {
                assert!(build_folk(&g, &target).is_err());
                continue;
            }
            let result = build_folk(&g, &target).unwrap();
            let report = classify(&g, &result.profile, mode);
            assert!(report.is_agreement);
            assert!(report.fixed_points.contains(&target));
            assert_eq!(report.payoff, *g.payoff(&target));
            for other in &report.fixed_points {
                assert!(pareto_dominates_weakly(g.payoff(&target), g.payoff(other)));
            }
            let cert = is_cse(&g, &result.profile, mode, &budgets()).unwrap();
            assert!(cert.is_equilibrium(), "folk output failed on game {code}");
            supported += 1;
        }

        // (b) No equilibrium agreement point below the maximin vector.
        for (profile, payoff) in enumerate_cse(&g, mode, &budgets()).unwrap() {
            let report = classify(&g, &profile, mode);
            if report.is_agreement {
                assert!(
                    pareto_dominates_weakly(&payoff, &maximin),
                    "game {code}: equilibrium below maximin"
                );
            }
            enumerated += 1;
        }
    }
    assert_eq!(games, 6561);
    println!(
        "acceptance criterion 4: PASS - {games} games, {supported} supported targets, \
         {enumerated} enumerated equilibria"
    );
}

/// Criterion 5: the three-player Pareto construction yields a unique fixed
/// point that is Pareto optimal (full scan) and an equilibrium, on 100
/// random games.
#[test]
fn criterion_5_pareto3_construction() {
    let mut rng = common::rng(5001);
    let shapes: [&[usize]; 2] = [&[2, 2, 2], &[3, 2, 2]];
    let mut checked = 0;
    for case in 0..100 {
        let g = common::random_game(&mut rng, shapes[case % 2], 10);
        let result = build_pareto3(&g).unwrap();
        let anchor = result.intended_point.clone().unwrap();
        let fixed = fixed_points(&g, &result.profile);
        assert_eq!(fixed, vec![anchor.clone()], "fixed point not unique on game {case}");
        assert!(is_pareto_optimal(&g, &anchor), "anchor not Pareto optimal on game {case}");
        let cert = is_cse(&g, &result.profile, SemanticsMode::DOMINANT_ZERO, &budgets()).unwrap();
        assert!(cert.is_equilibrium(), "pareto3 output failed on game {case}");
        checked += 1;
    }
    println!("acceptance criterion 5: PASS - {checked}/100 Pareto constructions verified");
}

/// Criterion 6: games with a planted double-max profile admit the
/// coalition-proof construction, verified by the full coalition sweep.
#[test]
fn criterion_6_strong_construction_on_planted_games() {
    let mut rng = common::rng(6001);
    let shapes: [&[usize]; 4] = [&[2, 2], &[2, 3], &[2, 2, 2], &[2, 2, 2, 2]];
    let mut checked = 0;
    for case in 0..50 {
        let dims = shapes[case % shapes.len()];
        let mut g = common::random_game(&mut rng, dims, 10);
        // Plant a profile where two players strictly exceed every other
        // payoff in the game.
        let n = dims.len();
        let spot = rng.random_range(0..g.profile_count());
        let planted = g.profile_from_index(spot);
        let first = rng.random_range(0..n);
        let second = (first + 1 + rng.random_range(0..n - 1)) % n;
        let mut payoffs: Vec<Vec<Rational>> = (0..g.profile_count())
            .map(|idx| g.payoff_by_index(idx).clone())
            .collect();
        payoffs[spot][first] = int(11);
        payoffs[spot][second] = int(11);
        g = Game::from_payoffs(dims, payoffs).unwrap();

        let result = build_strong(&g).unwrap();
        assert_eq!(result.intended_point.as_deref(), Some(planted.as_slice()));
        for mode in ZERO_MODES {
            let cert = is_strong_ce(&g, &result.profile, mode).unwrap();
            assert!(
                cert.is_equilibrium(),
                "strong output failed on game {case} under {mode:?}"
            );
        }
        checked += 1;
    }
    println!("acceptance criterion 6: PASS - {checked}/50 coalition-proof constructions verified");
}

/// Criterion 7: every two-player game without a pure Nash equilibrium gets
/// an equilibrium under averaging semantics, verified by brute force; the
/// mutual best-response spot value is exact.
#[test]
fn criterion_7_general_two_player_without_pure_nash() {
    let mut rng = common::rng(7001);
    let shapes: [&[usize]; 3] = [&[2, 2], &[2, 3], &[3, 3]];
    let mode = SemanticsMode::DOMINANT_AVERAGE;
    let mut checked = 0;
    let mut by_case = [0u32; 2];
    while checked < 100 {
        let g = common::random_game(&mut rng, shapes[checked % shapes.len()], 10);
        if !pure_nash_profiles(&g).is_empty() {
            continue; // rejection sampling: no pure Nash wanted
        }
        let result = build_general_2p(&g, &budgets()).unwrap();
        let cert = is_cse(&g, &result.profile, mode, &budgets()).unwrap();
        assert!(cert.is_equilibrium(), "general2p output failed (game {checked})");
        by_case[usize::from(result.intended_point.is_some())] += 1;
        checked += 1;
    }

    // Spot value: matching pennies settles on the mutual best-response
    // profile with the exact average payoff (1/2, 1/2).
    let pennies = catalog::matching_pennies();
    let result = build_general_2p(&pennies, &budgets()).unwrap();
    assert_eq!(result.intended_point, None);
    assert_eq!(result.payoff, vec![ratio::<Rational>(1, 2), ratio(1, 2)]);

    println!(
        "acceptance criterion 7: PASS - {checked}/100 games verified \
         ({} fixed-point-free, {} constant-commitment), pennies value 1/2 exact",
        by_case[0], by_case[1]
    );
}

/// Criterion 8: the product-measure decomposition reproduces 200 random
/// simple strategies exactly, with unit total weight and full support
/// before pruning.
#[test]
fn criterion_8_mixed_decomposition_roundtrip() {
    let mut rng = common::rng(8001);
    let mut checked = 0;
    for _ in 0..200 {
        let sigma = common::random_sigma(&mut rng, 3, 3, 12);
        assert!(verify_roundtrip(&sigma, &budgets()).unwrap());
        let measure = decompose(&sigma, &budgets(), false).unwrap();
        assert_eq!(measure.total_weight(), int::<Rational>(1));
        let cells = sigma.partition().cell_count();
        assert_eq!(measure.support_size(), sigma.action_count().pow(cells as u32));
        checked += 1;
    }
    println!("acceptance criterion 8: PASS - {checked}/200 exact decomposition roundtrips");
}

/// The construction invariant shared by all builders: the intended point is
/// a fixed point and the profile classifies as an agreement paying exactly
/// the payoff there. Checked here across builders on a mixed corpus.
#[test]
fn construction_results_are_internally_consistent() {
    let mut rng = common::rng(9001);
    for case in 0..60 {
        let g2 = common::random_game(&mut rng, &[2, 2], 10);
        let existence = build_existence(&g2);
        for result in [Some(existence), build_general_2p(&g2, &budgets()).ok()]
            .into_iter()
            .flatten()
        {
            if let Some(point) = &result.intended_point {
                assert!(fixed_points(&g2, &result.profile).contains(point), "case {case}");
                let report = classify(&g2, &result.profile, result.mode);
                assert!(report.is_agreement);
                assert_eq!(&report.payoff, g2.payoff(point));
                assert_eq!(report.payoff, result.payoff);
            }
        }
    }
    println!("construction invariant: PASS");
}
