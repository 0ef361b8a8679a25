//! JSON file formats: games, conditional profiles and simple mixed
//! strategies.
//!
//! Payoff values are JSON integers or `"p/q"` strings and always parse to
//! exact nonnegative rationals. The payoff list is ordered by ascending
//! profile index with the *last* player's action varying fastest
//! (equivalently, the mixed-radix encoding with player 1 most significant),
//! matching the natural row/column/matrix reading of small games.

use cse_core::game::Game as GenericGame;
use cse_core::mixed::{PartitionSpec, SimpleConditionalMixedStrategy};
use cse_core::{ConditionalProfile, ConditionalStrategy, Game, GameError, Rational};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error: {detail}")]
    Parse { detail: String },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("unknown player {name:?}")]
    UnknownPlayer { name: String },
    #[error("unknown action {name:?} for player {player:?}")]
    UnknownAction { player: String, name: String },
    #[error("profile table for player {player:?}: {detail}")]
    BadProfileTable { player: String, detail: String },
    #[error("sigma specification: {detail}")]
    BadSigma { detail: String },
}

impl FormatError {
    /// Stable machine-readable code for reports and exit-code dispatch.
    pub fn code(&self) -> &'static str {
        match self {
            FormatError::Parse { .. } => "ParseError",
            FormatError::Game(GameError::NegativePayoff { .. }) => "NegativePayoff",
            FormatError::Game(GameError::ArityMismatch { .. }) => "ArityMismatch",
            FormatError::UnknownPlayer { .. } => "UnknownPlayer",
            FormatError::UnknownAction { .. } => "UnknownAction",
            FormatError::BadProfileTable { .. } => "BadProfileTable",
            FormatError::BadSigma { .. } => "BadSigma",
        }
    }
}

/// An exact payoff: integer or `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PayoffValue {
    Int(i64),
    Text(String),
}

impl PayoffValue {
    pub fn to_rational(&self) -> Result<Rational, FormatError> {
        match self {
            PayoffValue::Int(v) => Ok(Rational::from(BigInt::from(*v))),
            PayoffValue::Text(text) => parse_rational(text),
        }
    }

    pub fn from_rational(value: &Rational) -> PayoffValue {
        if value.denom().is_one() {
            if let Some(int) = value.numer().to_i64() {
                return PayoffValue::Int(int);
            }
        }
        PayoffValue::Text(value.to_string())
    }
}


/// Parses `"p"` or `"p/q"` with exact arithmetic; rejects a zero
/// denominator before any construction.
pub fn parse_rational(text: &str) -> Result<Rational, FormatError> {
    let bad = |detail: String| FormatError::Parse { detail };
    let mut parts = text.splitn(2, '/');
    let numer: BigInt = parts
        .next()
        .unwrap_or("")
        .trim()
        .parse()
        .map_err(|_| bad(format!("cannot parse rational {text:?}")))?;
    let denom: BigInt = match parts.next() {
        None => BigInt::from(1),
        Some(d) => d
            .trim()
            .parse()
            .map_err(|_| bad(format!("cannot parse rational {text:?}")))?,
    };
    if denom.is_zero() {
        return Err(bad(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(numer, denom))
}

/// On-disk game description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub players: Vec<String>,
    pub actions: Vec<Vec<String>>,
    /// One payoff vector per profile, last player's action fastest.
    pub payoffs: Vec<Vec<PayoffValue>>,
}

impl GameFile {
    pub fn to_game(&self) -> Result<Game, FormatError> {
        let payoffs = self
            .payoffs
            .iter()
            .map(|vector| vector.iter().map(PayoffValue::to_rational).collect())
            .collect::<Result<Vec<Vec<Rational>>, _>>()?;
        let mut game =
            GenericGame::new(self.players.clone(), self.actions.clone(), payoffs)?;
        game.set_title(self.title.clone());
        Ok(game)
    }

    pub fn from_game(game: &Game) -> GameFile {
        GameFile {
            title: game.title().map(str::to_string),
            players: game.player_names().to_vec(),
            actions: (0..game.num_players())
                .map(|p| game.action_names(p).to_vec())
                .collect(),
            payoffs: (0..game.profile_count())
                .map(|idx| {
                    game.payoff_by_index(idx)
                        .iter()
                        .map(PayoffValue::from_rational)
                        .collect()
                })
                .collect(),
        }
    }
}

/// Parses a JSON game file.
pub fn parse_game(text: &str) -> Result<Game, FormatError> {
    let file: GameFile = serde_json::from_str(text)
        .map_err(|e| FormatError::Parse { detail: e.to_string() })?;
    file.to_game()
}

/// Canonical serialization: pretty JSON plus a trailing newline. Parsing
/// and re-serializing a canonical file is the identity.
pub fn canonical_game_json(game: &Game) -> String {
    let file = GameFile::from_game(game);
    let mut text = serde_json::to_string_pretty(&file).expect("game files serialize");
    text.push('\n');
    text
}

/// On-disk conditional profile: per player, one entry per opponent profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub strategies: Vec<StrategyFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyFile {
    pub player: String,
    pub entries: Vec<EntryFile>,
}

/// `given` lists the opponents' action names in ascending player order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryFile {
    pub given: Vec<String>,
    pub play: String,
}

impl ProfileFile {
    pub fn to_profile(&self, game: &Game) -> Result<ConditionalProfile, FormatError> {
        if self.strategies.len() != game.num_players() {
            return Err(FormatError::Parse {
                detail: format!(
                    "{} strategies for {} players",
                    self.strategies.len(),
                    game.num_players()
                ),
            });
        }
        let mut strategies = Vec::with_capacity(game.num_players());
        for (player, strategy) in self.strategies.iter().enumerate() {
            if strategy.player != game.player_name(player) {
                return Err(FormatError::UnknownPlayer { name: strategy.player.clone() });
            }
            let keys = game.opponent_profile_count(player);
            let mut table: Vec<Option<usize>> = vec![None; keys];
            for entry in &strategy.entries {
                let opponents: Vec<usize> = {
                    let opponent_players: Vec<usize> =
                        (0..game.num_players()).filter(|&j| j != player).collect();
                    if entry.given.len() != opponent_players.len() {
                        return Err(FormatError::BadProfileTable {
                            player: strategy.player.clone(),
                            detail: format!(
                                "entry lists {} opponents, expected {}",
                                entry.given.len(),
                                opponent_players.len()
                            ),
                        });
                    }
                    opponent_players
                        .iter()
                        .zip(&entry.given)
                        .map(|(&j, name)| action_index(game, j, name))
                        .collect::<Result<_, _>>()?
                };
                let key = game.opponent_index(player, &opponents);
                if table[key].is_some() {
                    return Err(FormatError::BadProfileTable {
                        player: strategy.player.clone(),
                        detail: format!("duplicate entry for {:?}", entry.given),
                    });
                }
                table[key] = Some(action_index(game, player, &entry.play)?);
            }
            let table = table
                .into_iter()
                .enumerate()
                .map(|(key, slot)| {
                    slot.ok_or_else(|| FormatError::BadProfileTable {
                        player: strategy.player.clone(),
                        detail: format!(
                            "missing entry for opponent profile #{key}"
                        ),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            strategies.push(ConditionalStrategy::new(player, table));
        }
        Ok(ConditionalProfile::new(strategies))
    }

    pub fn from_profile(game: &Game, profile: &ConditionalProfile) -> ProfileFile {
        ProfileFile {
            strategies: (0..game.num_players())
                .map(|player| StrategyFile {
                    player: game.player_name(player).to_string(),
                    entries: (0..game.opponent_profile_count(player))
                        .map(|key| {
                            let opponents = game.opponent_profile_from_index(player, key);
                            let opponent_players: Vec<usize> =
                                (0..game.num_players()).filter(|&j| j != player).collect();
                            EntryFile {
                                given: opponent_players
                                    .iter()
                                    .zip(&opponents)
                                    .map(|(&j, &a)| game.action_name(j, a).to_string())
                                    .collect(),
                                play: game
                                    .action_name(player, profile.strategy(player).table[key])
                                    .to_string(),
                            }
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_profile(text: &str, game: &Game) -> Result<ConditionalProfile, FormatError> {
    let file: ProfileFile = serde_json::from_str(text)
        .map_err(|e| FormatError::Parse { detail: e.to_string() })?;
    file.to_profile(game)
}

pub fn action_index(game: &Game, player: usize, name: &str) -> Result<usize, FormatError> {
    game.action_names(player)
        .iter()
        .position(|a| a == name)
        .ok_or_else(|| FormatError::UnknownAction {
            player: game.player_name(player).to_string(),
            name: name.to_string(),
        })
}

/// On-disk simple conditional mixed strategy: per partition cell, one
/// distribution over the owner's actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaFile {
    pub player: String,
    pub actions: Vec<String>,
    pub cells: Vec<String>,
    pub distributions: Vec<Vec<PayoffValue>>,
}

impl SigmaFile {
    pub fn to_sigma(&self) -> Result<SimpleConditionalMixedStrategy<Rational>, FormatError> {
        let partition = PartitionSpec::from_labels(self.cells.clone())
            .map_err(|e| FormatError::BadSigma { detail: e.to_string() })?;
        let distributions = self
            .distributions
            .iter()
            .map(|row| row.iter().map(PayoffValue::to_rational).collect())
            .collect::<Result<Vec<Vec<Rational>>, _>>()?;
        SimpleConditionalMixedStrategy::new(0, self.actions.len(), partition, distributions)
            .map_err(|e| FormatError::BadSigma { detail: e.to_string() })
    }
}

pub fn parse_sigma(text: &str) -> Result<(SigmaFile, SimpleConditionalMixedStrategy<Rational>), FormatError> {
    let file: SigmaFile = serde_json::from_str(text)
        .map_err(|e| FormatError::Parse { detail: e.to_string() })?;
    let sigma = file.to_sigma()?;
    Ok((file, sigma))
}

/// Formats a rational for reports: `"p"` or `"p/q"`.
pub fn rational_string(value: &Rational) -> String {
    value.to_string()
}
