//! Writes the catalog games as canonical JSON files.
//!
//! Usage: `cargo run -p cse-cli --example export_catalog -- <directory>`

use cse_cli::formats::canonical_game_json;
use cse_core::catalog;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "games".to_string());
    std::fs::create_dir_all(&dir).expect("create output directory");
    let games = [
        ("prisoners_dilemma.json", catalog::prisoners_dilemma()),
        ("matching_pennies.json", catalog::matching_pennies()),
        ("coordination.json", catalog::pure_coordination()),
        ("three_player_no_strong_ce.json", catalog::three_player_no_strong_ce()),
    ];
    for (name, game) in games {
        let path = format!("{dir}/{name}");
        std::fs::write(&path, canonical_game_json(&game)).expect("write game file");
        println!("wrote {path}");
    }
}
