//! Acceptance suite for the I/O layer: golden-file round-trips and the
//! legacy-format cross-parse.

use std::path::{Path, PathBuf};

use cse_cli::formats::{canonical_game_json, parse_game};
use cse_cli::nfg::import_nfg;

fn games_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../games")
}

/// Criterion 9: parsing and re-serializing each golden game file is the
/// byte-level identity, and the legacy import of the prisoner's dilemma
/// equals the native encoding.
#[test]
fn criterion_9_golden_roundtrip_and_legacy_cross_parse() {
    let goldens = [
        "prisoners_dilemma.json",
        "matching_pennies.json",
        "coordination.json",
        "three_player_no_strong_ce.json",
    ];
    for name in goldens {
        let path = games_dir().join(name);
        let original = std::fs::read_to_string(&path).unwrap();
        let game = parse_game(&original).unwrap();
        let reserialized = canonical_game_json(&game);
        assert_eq!(reserialized, original, "{name} is not canonical");
        // Idempotence: a second pass changes nothing.
        assert_eq!(canonical_game_json(&parse_game(&reserialized).unwrap()), reserialized);
    }

    // Spot-check the three-player encoding: row y, column A, right matrix.
    let trio = parse_game(
        &std::fs::read_to_string(games_dir().join("three_player_no_strong_ce.json")).unwrap(),
    )
    .unwrap();
    let expected: Vec<cse_core::Rational> =
        vec![cse_core::scalar::int(1), cse_core::scalar::int(0), cse_core::scalar::int(2)];
    assert_eq!(trio.payoff(&[1, 0, 1]), &expected);

    let native =
        parse_game(&std::fs::read_to_string(games_dir().join("prisoners_dilemma.json")).unwrap())
            .unwrap();
    let imported =
        import_nfg(&std::fs::read_to_string(games_dir().join("prisoners_dilemma.nfg")).unwrap())
            .unwrap();
    assert_eq!(imported, native, "legacy import must match the native encoding");

    println!(
        "acceptance criterion 9: PASS - {} golden files canonical, legacy cross-parse equal",
        goldens.len()
    );
}
