//! Importer for the legacy `.nfg` normal-form format (payoff-list
//! variant).
//!
//! The legacy layout lists payoffs with the *first* player's action varying
//! fastest; the importer reindexes into this crate's ordering (last player
//! fastest). Only the payoff-list variant is supported: the outcome-based
//! variant is rejected as unsupported.

use cse_core::game::Game as GenericGame;
use cse_core::{Game, GameError, Rational};
use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NfgError {
    #[error("unsupported nfg feature: {detail}")]
    Unsupported { detail: String },
    #[error("nfg parse error: {detail}")]
    Parse { detail: String },
    #[error(transparent)]
    Game(#[from] GameError),
}

impl NfgError {
    pub fn code(&self) -> &'static str {
        match self {
            NfgError::Unsupported { .. } => "UnsupportedNfgFeature",
            NfgError::Parse { .. } => "ParseError",
            NfgError::Game(GameError::NegativePayoff { .. }) => "NegativePayoff",
            NfgError::Game(GameError::ArityMismatch { .. }) => "ArityMismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Quoted(String),
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Result<Vec<Token>, NfgError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                        None => {
                            return Err(NfgError::Parse { detail: "unterminated string".into() })
                        }
                    }
                }
                tokens.push(Token::Quoted(s));
            }
            '{' => {
                chars.next();
                tokens.push(Token::Open);
            }
            '}' => {
                chars.next();
                tokens.push(Token::Close);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || ch == '{' || ch == '}' || ch == '"' {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                }
                tokens.push(Token::Atom(s));
            }
        }
    }
    Ok(tokens)
}

/// Parses an atom as an exact rational: integer, `p/q` or decimal.
fn parse_number(atom: &str) -> Result<Rational, NfgError> {
    let bad = || NfgError::Parse { detail: format!("cannot parse payoff {atom:?}") };
    if let Some((p, q)) = atom.split_once('/') {
        let numer: BigInt = p.parse().map_err(|_| bad())?;
        let denom: BigInt = q.parse().map_err(|_| bad())?;
        if denom.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(numer, denom));
    }
    if let Some((whole, frac)) = atom.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_part: BigInt = if whole == "-" || whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = BigInt::from(10).pow(frac.len() as u64);
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let magnitude = Rational::new(
            whole_part.magnitude().clone().into(),
            BigInt::from(1),
        ) + Rational::new(frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let int: BigInt = atom.parse().map_err(|_| bad())?;
    Ok(Rational::from(int))
}

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn next(&mut self, expected: &str) -> Result<Token, NfgError> {
        let token = self.tokens.get(self.pos).cloned().ok_or_else(|| NfgError::Parse {
            detail: format!("unexpected end of file, expected {expected}"),
        })?;
        self.pos += 1;
        Ok(token)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }
}

/// Imports the payoff-list variant of the legacy format.
pub fn import_nfg(text: &str) -> Result<Game, NfgError> {
    let mut cursor = Cursor { tokens: tokenize(text)?, pos: 0 };

    match cursor.next("NFG header")? {
        Token::Atom(a) if a == "NFG" => {}
        other => {
            return Err(NfgError::Parse { detail: format!("expected NFG header, got {other:?}") })
        }
    }
    match cursor.next("format version")? {
        Token::Atom(a) if a == "1" => {}
        other => {
            return Err(NfgError::Unsupported {
                detail: format!("format version {other:?}, only version 1 is supported"),
            })
        }
    }
    match cursor.next("payoff type")? {
        Token::Atom(a) if a == "R" || a == "D" => {}
        other => {
            return Err(NfgError::Unsupported { detail: format!("payoff type {other:?}") })
        }
    }
    let title = match cursor.next("title")? {
        Token::Quoted(s) => s,
        other => return Err(NfgError::Parse { detail: format!("expected title, got {other:?}") }),
    };

    // Player names.
    if cursor.next("player list")? != Token::Open {
        return Err(NfgError::Parse { detail: "expected '{' before player names".into() });
    }
    let mut players = Vec::new();
    loop {
        match cursor.next("player name or '}'")? {
            Token::Quoted(s) => players.push(s),
            Token::Close => break,
            other => {
                return Err(NfgError::Parse {
                    detail: format!("expected player name, got {other:?}"),
                })
            }
        }
    }

    // Action sets: either a list of counts or per-player name lists.
    if cursor.next("action sets")? != Token::Open {
        return Err(NfgError::Parse { detail: "expected '{' before action sets".into() });
    }
    let mut actions: Vec<Vec<String>> = Vec::new();
    if matches!(cursor.peek(), Some(Token::Open)) {
        // Named variant: { { "C" "D" } { "C" "D" } }
        loop {
            match cursor.next("action name list or '}'")? {
                Token::Open => {
                    let mut names = Vec::new();
                    loop {
                        match cursor.next("action name or '}'")? {
                            Token::Quoted(s) => names.push(s),
                            Token::Close => break,
                            other => {
                                return Err(NfgError::Parse {
                                    detail: format!("expected action name, got {other:?}"),
                                })
                            }
                        }
                    }
                    actions.push(names);
                }
                Token::Close => break,
                other => {
                    return Err(NfgError::Parse {
                        detail: format!("expected action names, got {other:?}"),
                    })
                }
            }
        }
    } else {
        // Count variant: { 2 2 }; synthesize names s1..sm.
        loop {
            match cursor.next("action count or '}'")? {
                Token::Atom(a) => {
                    let m: usize = a.parse().map_err(|_| NfgError::Parse {
                        detail: format!("bad action count {a:?}"),
                    })?;
                    actions.push((1..=m).map(|k| format!("s{k}")).collect());
                }
                Token::Close => break,
                other => {
                    return Err(NfgError::Parse {
                        detail: format!("expected action count, got {other:?}"),
                    })
                }
            }
        }
    }

    // Optional comment string.
    if matches!(cursor.peek(), Some(Token::Quoted(_))) {
        cursor.pos += 1;
    }

    // The outcome-based variant starts its body with '{'.
    if matches!(cursor.peek(), Some(Token::Open)) {
        return Err(NfgError::Unsupported {
            detail: "outcome-based payoff section".into(),
        });
    }

    let n = players.len();
    if actions.len() != n {
        return Err(NfgError::Parse {
            detail: format!("{} players but {} action sets", n, actions.len()),
        });
    }
    let profile_count: usize = actions.iter().map(Vec::len).product();
    let mut flat = Vec::with_capacity(profile_count * n);
    while cursor.pos < cursor.tokens.len() {
        match cursor.next("payoff number")? {
            Token::Atom(a) => flat.push(parse_number(&a)?),
            other => {
                return Err(NfgError::Parse {
                    detail: format!("expected payoff number, got {other:?}"),
                })
            }
        }
    }
    if flat.len() != profile_count * n {
        return Err(NfgError::Parse {
            detail: format!(
                "expected {} payoff numbers, got {}",
                profile_count * n,
                flat.len()
            ),
        });
    }

    // Reindex: legacy position g encodes the profile with player 1 fastest.
    let dims: Vec<usize> = actions.iter().map(Vec::len).collect();
    let mut payoffs: Vec<Vec<Rational>> = vec![Vec::new(); profile_count];
    for g in 0..profile_count {
        let mut rest = g;
        let mut profile = vec![0usize; n];
        for (player, &m) in dims.iter().enumerate() {
            profile[player] = rest % m;
            rest /= m;
        }
        // Native index: player 1 most significant.
        let native = profile
            .iter()
            .enumerate()
            .fold(0usize, |acc, (player, &a)| acc * dims[player] + a);
        payoffs[native] = flat[g * n..(g + 1) * n].to_vec();
    }

    let mut game = GenericGame::new(players, actions, payoffs)?;
    if !title.is_empty() {
        game.set_title(Some(title));
    }
    Ok(game)
}
