//! Machine-readable run reports.
//!
//! Every run produces a [`Report`]: the command echo, the semantics mode in
//! force (never implicit), the input game, and a result payload. Rational
//! values are rendered as exact `"p/q"` strings, so re-parsing a report and
//! re-verifying reproduces the verdict bit for bit.

use cse_core::game::PayoffVector;
use cse_core::{
    AgreementRule, ConstructionResult, DeviationCertificate, DisagreementRule, Game, Rational,
    SemanticsMode, TheoremTag, Verdict,
};
use serde::{Deserialize, Serialize};

use crate::formats::{rational_string, GameFile, ProfileFile, StrategyFile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub semantics: SemanticsEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub game: Option<GameFile>,
    pub result: ResultPayload,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticsEcho {
    pub agreement: String,
    pub disagreement: String,
}

impl SemanticsEcho {
    pub fn from_mode(mode: SemanticsMode) -> Self {
        SemanticsEcho {
            agreement: match mode.agreement {
                AgreementRule::Dominant => "dominant".into(),
                AgreementRule::Unique => "unique".into(),
            },
            disagreement: match mode.disagreement {
                DisagreementRule::Zero => "zero".into(),
                DisagreementRule::Average => "average".into(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultPayload {
    Construction {
        theorem: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        intended_point: Option<Vec<String>>,
        payoff: Vec<String>,
        profile: ProfileFile,
        verification: CertificateEcho,
        notes: Vec<String>,
    },
    Verification {
        profile: ProfileFile,
        certificate: CertificateEcho,
    },
    StrongSweep {
        profiles_checked: u64,
        strong_count: u64,
        strong_equilibria: Vec<SweepItem>,
    },
    Enumeration {
        count: u64,
        equilibria: Vec<SweepItem>,
    },
    Decomposition {
        player: String,
        actions: Vec<String>,
        cells: Vec<String>,
        support_size: u64,
        pruned: bool,
        total_weight: String,
        roundtrip: bool,
        atoms: Vec<AtomEcho>,
    },
    Failure {
        code: String,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepItem {
    pub profile: ProfileFile,
    pub payoff: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement_point: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomEcho {
    pub table: Vec<String>,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GainEcho {
    pub player: String,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEcho {
    pub verdict: String,
    pub is_agreement: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement_point: Option<Vec<String>>,
    pub payoff: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub deviators: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<Vec<StrategyFile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome_point: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub gains: Vec<GainEcho>,
}

pub fn point_names(game: &Game, point: &[usize]) -> Vec<String> {
    point
        .iter()
        .enumerate()
        .map(|(player, &action)| game.action_name(player, action).to_string())
        .collect()
}

pub fn payoff_strings(payoff: &PayoffVector<Rational>) -> Vec<String> {
    payoff.iter().map(rational_string).collect()
}

impl CertificateEcho {
    pub fn from_certificate(game: &Game, certificate: &DeviationCertificate<Rational>) -> Self {
        let deviation = if certificate.deviations.is_empty() {
            None
        } else {
            let full = ProfileFile::from_profile(game, &{
                // Render only the deviators' tables, in a full-profile shell.
                let mut shell = cse_core::constant_profile(game, &vec![0; game.num_players()]);
                for table in &certificate.deviations {
                    shell = shell.with_strategy(table.clone());
                }
                shell
            });
            Some(
                full.strategies
                    .into_iter()
                    .enumerate()
                    .filter(|(player, _)| certificate.deviators.contains(player))
                    .map(|(_, s)| s)
                    .collect(),
            )
        };
        CertificateEcho {
            verdict: match certificate.verdict {
                Verdict::NoProfitableDeviation => "no_profitable_deviation".into(),
                Verdict::DeviationFound => "deviation_found".into(),
            },
            is_agreement: certificate.base.is_agreement,
            agreement_point: certificate
                .base
                .dominant_point
                .as_ref()
                .map(|p| point_names(game, p)),
            payoff: payoff_strings(&certificate.base.payoff),
            deviators: certificate
                .deviators
                .iter()
                .map(|&p| game.player_name(p).to_string())
                .collect(),
            deviation,
            outcome_point: certificate
                .outcome
                .as_ref()
                .and_then(|o| o.dominant_point.as_ref())
                .map(|p| point_names(game, p)),
            gains: certificate
                .gains
                .iter()
                .map(|g| GainEcho {
                    player: game.player_name(g.player).to_string(),
                    before: rational_string(&g.before),
                    after: rational_string(&g.after),
                })
                .collect(),
        }
    }
}

pub fn theorem_name(tag: TheoremTag) -> &'static str {
    match tag {
        TheoremTag::Existence => "existence",
        TheoremTag::Folk => "folk",
        TheoremTag::Pareto3 => "pareto3",
        TheoremTag::Strong => "strong",
        TheoremTag::General2p => "general2p",
        TheoremTag::SupportN4 => "support-n4",
    }
}

pub fn construction_payload(
    game: &Game,
    result: &ConstructionResult<Rational>,
    verification: CertificateEcho,
) -> ResultPayload {
    ResultPayload::Construction {
        theorem: theorem_name(result.tag).to_string(),
        intended_point: result.intended_point.as_ref().map(|p| point_names(game, p)),
        payoff: payoff_strings(&result.payoff),
        profile: ProfileFile::from_profile(game, &result.profile),
        verification,
        notes: result.notes.clone(),
    }
}

impl Report {
    pub fn new(command: &[String], mode: SemanticsMode, game: Option<&Game>) -> Report {
        Report {
            tool: "cse".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.to_vec(),
            semantics: SemanticsEcho::from_mode(mode),
            game: game.map(GameFile::from_game),
            result: ResultPayload::Failure { code: "Unset".into(), message: String::new() },
        }
    }

    pub fn with_result(mut self, result: ResultPayload) -> Report {
        self.result = result;
        self
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    /// Plain-text rendering: a short header plus the payload as a table.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, line: &str| {
            out.push_str(line);
            out.push('\n');
        };
        if let Some(game) = &self.game {
            let title = game.title.as_deref().unwrap_or("untitled game");
            push(&mut out, &format!("game: {} ({} players)", title, game.players.len()));
        }
        push(
            &mut out,
            &format!(
                "semantics: {} agreement, {} disagreement",
                self.semantics.agreement, self.semantics.disagreement
            ),
        );
        match &self.result {
            ResultPayload::Construction {
                theorem,
                intended_point,
                payoff,
                profile,
                verification,
                notes,
            } => {
                push(&mut out, &format!("construction: {theorem}"));
                match intended_point {
                    Some(point) => {
                        push(&mut out, &format!("agreement point: ({})", point.join(", ")))
                    }
                    None => push(&mut out, "agreement point: none (fixed-point-free profile)"),
                }
                push(&mut out, &format!("payoff: ({})", payoff.join(", ")));
                render_profile(&mut out, profile);
                render_certificate(&mut out, verification);
                for note in notes {
                    push(&mut out, &format!("note: {note}"));
                }
            }
            ResultPayload::Verification { profile, certificate } => {
                render_profile(&mut out, profile);
                render_certificate(&mut out, certificate);
            }
            ResultPayload::StrongSweep { profiles_checked, strong_count, strong_equilibria } => {
                push(
                    &mut out,
                    &format!(
                        "{strong_count} strong CE among {profiles_checked} conditional profiles"
                    ),
                );
                for item in strong_equilibria {
                    push(&mut out, &format!("  payoff ({})", item.payoff.join(", ")));
                }
            }
            ResultPayload::Enumeration { count, equilibria } => {
                push(&mut out, &format!("{count} conditional strategy equilibria"));
                for item in equilibria {
                    let point = item
                        .agreement_point
                        .as_ref()
                        .map(|p| format!("agreement ({})", p.join(", ")))
                        .unwrap_or_else(|| "disagreement".into());
                    push(
                        &mut out,
                        &format!("  {point} payoff ({})", item.payoff.join(", ")),
                    );
                }
            }
            ResultPayload::Decomposition {
                player,
                actions,
                cells,
                support_size,
                pruned,
                total_weight,
                roundtrip,
                atoms,
            } => {
                push(
                    &mut out,
                    &format!(
                        "decomposition for {player}: {} actions x {} cells, support {support_size}{}",
                        actions.len(),
                        cells.len(),
                        if *pruned { " (pruned)" } else { "" }
                    ),
                );
                push(&mut out, &format!("total weight: {total_weight}"));
                push(
                    &mut out,
                    &format!("roundtrip exact: {}", if *roundtrip { "yes" } else { "NO" }),
                );
                for atom in atoms {
                    push(
                        &mut out,
                        &format!("  ({}) -> {}", atom.table.join(", "), atom.weight),
                    );
                }
            }
            ResultPayload::Failure { code, message } => {
                push(&mut out, &format!("failure [{code}]: {message}"));
            }
        }
        out
    }
}

fn render_profile(out: &mut String, profile: &ProfileFile) {
    out.push_str("profile:\n");
    for strategy in &profile.strategies {
        let entries: Vec<String> = strategy
            .entries
            .iter()
            .map(|e| format!("({}) -> {}", e.given.join(", "), e.play))
            .collect();
        out.push_str(&format!("  {}: {}\n", strategy.player, entries.join("; ")));
    }
}

fn render_certificate(out: &mut String, certificate: &CertificateEcho) {
    match certificate.verdict.as_str() {
        "no_profitable_deviation" => out.push_str("verification: no profitable deviation\n"),
        _ => {
            out.push_str(&format!(
                "verification: deviation found for {}\n",
                certificate.deviators.join(", ")
            ));
            for gain in &certificate.gains {
                out.push_str(&format!(
                    "  {}: {} -> {}\n",
                    gain.player, gain.before, gain.after
                ));
            }
        }
    }
}
