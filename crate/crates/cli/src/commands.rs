//! Command-line surface: argument parsing, dispatch and exit codes.
//!
//! Exit code contract: `0` for success (including verified equilibria and
//! completed sweeps), `2` for correctly computed negative answers (a
//! deviation was found, a theorem precondition fails, a search exhausts),
//! `1` for errors. Shell pipelines can branch on theorem preconditions.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use cse_core::{
    build_existence, build_folk, build_general_2p, build_pareto3, build_strong, build_support_n4,
    classify, enumerate_cse, enumerate_strong_ce, is_cse, is_strong_ce, AgreementRule, Budgets,
    ConstructError, DisagreementRule, Game, Rational, SemanticsMode,
};

use crate::formats::{
    self, parse_game, parse_profile, parse_sigma, rational_string, ProfileFile,
};
use crate::nfg::import_nfg;
use crate::report::{
    construction_payload, point_names, payoff_strings, AtomEcho, CertificateEcho, Report,
    ResultPayload, SweepItem,
};

#[derive(Debug, Parser)]
#[command(
    name = "cse",
    version,
    about = "Conditional strategy equilibrium toolkit for finite normal-form games"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit the machine-readable JSON report instead of the text table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the output to PATH (atomically) instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Agreement rule for verification and enumeration commands.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Disagreement payoff rule for verification and enumeration commands.
    #[arg(long, global = true, value_enum)]
    pub disagreement: Option<DisagreementArg>,
    /// Budget for enumerations and searches (overrides CSE_BUDGET).
    #[arg(long, global = true, value_name = "N")]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Dominant,
    Unique,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DisagreementArg {
    Zero,
    Average,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the sequential best-response equilibrium (any game).
    Solve {
        #[arg(long, value_name = "PATH")]
        game: PathBuf,
    },
    /// Support a target profile in a two-player game (folk construction).
    Folk {
        #[arg(long, value_name = "PATH")]
        game: PathBuf,
        /// Comma-separated action names, one per player, e.g. `C,C`.
        #[arg(long, value_name = "ACTIONS")]
        target: String,
    },
    /// Build a Pareto optimal equilibrium in a three-player game.
    Pareto3 {
        #[arg(long, value_name = "PATH")]
        game: PathBuf,
    },
    /// Build a coalition-proof equilibrium from a double-max profile.
    Strong {
        #[arg(long, value_name = "PATH")]
        game: PathBuf,
    },
    /// Build a two-player equilibrium under averaging semantics.
    General2p {
        #[arg(long, value_name = "PATH")]
        game: PathBuf,
    },
    /// Search for a profile supporting a target in a game of 4+ players.
    SupportN4 {
        #[arg(long, value_name = "PATH")]
        game: PathBuf,
        #[arg(long, value_name = "ACTIONS")]
        target: String,
    },
    /// Verify that a conditional profile is an equilibrium.
    Verify {
        #[arg(long, value_name = "PATH")]
        game: PathBuf,
        #[arg(long, value_name = "PATH")]
        profile: PathBuf,
    },
    /// Verify coalition-proofness of a profile, or sweep all profiles.
    VerifyStrong {
        #[arg(long, value_name = "PATH")]
        game: PathBuf,
        #[arg(long, value_name = "PATH", conflicts_with = "exhaustive")]
        profile: Option<PathBuf>,
        /// Check every conditional profile of the game.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Enumerate all conditional strategy equilibria of a game.
    Enumerate {
        #[arg(long, value_name = "PATH")]
        game: PathBuf,
    },
    /// Decompose a simple conditional mixed strategy into a product
    /// measure over pure tables and verify the roundtrip.
    MixedDecompose {
        #[arg(long, value_name = "PATH")]
        sigma: PathBuf,
        /// Drop zero-weight atoms from the support.
        #[arg(long)]
        prune: bool,
    },
}

/// Parses `args` (without the program name), runs the command, and returns
/// the report together with the process exit code.
pub fn run_command(args: &[String]) -> (Report, i32) {
    let cli = match Cli::try_parse_from(std::iter::once("cse".to_string()).chain(args.to_vec())) {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests print through clap and exit 0.
            if err.use_stderr() {
                let report = Report::new(args, SemanticsMode::default(), None).with_result(
                    ResultPayload::Failure { code: "UsageError".into(), message: err.to_string() },
                );
                return (report, 1);
            }
            let _ = err.print();
            std::process::exit(0);
        }
    };
    execute(cli, args)
}

fn budgets_from(cli: &Cli) -> Budgets {
    if let Some(n) = cli.budget {
        return Budgets::uniform(n);
    }
    if let Ok(text) = std::env::var("CSE_BUDGET") {
        if let Ok(n) = text.trim().parse::<u64>() {
            return Budgets::uniform(n);
        }
    }
    Budgets::default()
}

fn check_mode(cli: &Cli, default: SemanticsMode) -> SemanticsMode {
    SemanticsMode {
        agreement: match cli.mode {
            Some(ModeArg::Dominant) => AgreementRule::Dominant,
            Some(ModeArg::Unique) => AgreementRule::Unique,
            None => default.agreement,
        },
        disagreement: match cli.disagreement {
            Some(DisagreementArg::Zero) => DisagreementRule::Zero,
            Some(DisagreementArg::Average) => DisagreementRule::Average,
            None => default.disagreement,
        },
    }
}

fn load_game(path: &Path) -> Result<Game, (String, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ("IoError".to_string(), format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("nfg")) {
        import_nfg(&text).map_err(|e| (e.code().to_string(), e.to_string()))
    } else {
        parse_game(&text).map_err(|e| (e.code().to_string(), e.to_string()))
    }
}

fn parse_target(game: &Game, raw: &str) -> Result<Vec<usize>, (String, String)> {
    let names: Vec<&str> = raw.split(',').map(str::trim).collect();
    if names.len() != game.num_players() {
        return Err((
            "BadTarget".into(),
            format!("target lists {} actions for {} players", names.len(), game.num_players()),
        ));
    }
    names
        .iter()
        .enumerate()
        .map(|(player, name)| {
            formats::action_index(game, player, name)
                .map_err(|e| (e.code().to_string(), e.to_string()))
        })
        .collect()
}

fn construct_error_payload(err: &ConstructError<Rational>) -> (ResultPayload, i32) {
    let code = match err {
        ConstructError::NotIndividuallyRational { .. } => "NotIndividuallyRational",
        ConstructError::NotTwoPlayers { .. } => "NotTwoPlayers",
        ConstructError::NotThreePlayers { .. } => "NotThreePlayers",
        ConstructError::ActionSetTooSmall { .. } => "ActionSetTooSmall",
        ConstructError::NoDoubleMaxProfile => "NoDoubleMaxProfile",
        ConstructError::TooFewPlayers { .. } => "TooFewPlayers",
        ConstructError::SearchExhausted { .. } => "SearchExhausted",
        ConstructError::Deviation(e) => {
            return (
                ResultPayload::Failure { code: deviation_code(e).into(), message: e.to_string() },
                1,
            )
        }
    };
    // Negative-but-valid theorem answers exit 2; structural misuse exits 1.
    let exit = match err {
        ConstructError::NotIndividuallyRational { .. }
        | ConstructError::NoDoubleMaxProfile
        | ConstructError::SearchExhausted { .. } => 2,
        _ => 1,
    };
    (ResultPayload::Failure { code: code.into(), message: err.to_string() }, exit)
}

fn deviation_code(err: &cse_core::DeviationError) -> &'static str {
    match err {
        cse_core::DeviationError::UnsupportedSemantics { .. } => "UnsupportedSemantics",
        cse_core::DeviationError::BudgetExceeded { .. } => "BudgetExceeded",
    }
}

fn execute(cli: Cli, raw_args: &[String]) -> (Report, i32) {
    let budgets = budgets_from(&cli);

    macro_rules! fail {
        ($mode:expr, $game:expr, $code:expr, $message:expr, $exit:expr) => {{
            let report = Report::new(raw_args, $mode, $game).with_result(ResultPayload::Failure {
                code: $code.into(),
                message: $message,
            });
            return (report, $exit);
        }};
    }

    macro_rules! try_game {
        ($path:expr, $mode:expr) => {
            match load_game($path) {
                Ok(game) => game,
                Err((code, message)) => fail!($mode, None, code, message, 1),
            }
        };
    }

    match &cli.command {
        Command::Solve { game } => {
            let mode = check_mode(&cli, SemanticsMode::DOMINANT_ZERO);
            let game = try_game!(game, mode);
            let result = build_existence(&game);
            finish_construction(raw_args, mode, game, result, &budgets)
        }
        Command::Folk { game, target } => {
            let mode = check_mode(&cli, SemanticsMode::DOMINANT_ZERO);
            let game = try_game!(game, mode);
            let target = match parse_target(&game, target) {
                Ok(t) => t,
                Err((code, message)) => fail!(mode, Some(&game), code, message, 1),
            };
            match build_folk(&game, &target) {
                Ok(result) => finish_construction(raw_args, mode, game, result, &budgets),
                Err(err) => {
                    let (payload, exit) = construct_error_payload(&err);
                    let report =
                        Report::new(raw_args, mode, Some(&game)).with_result(payload);
                    (report, exit)
                }
            }
        }
        Command::Pareto3 { game } => {
            let mode = check_mode(&cli, SemanticsMode::DOMINANT_ZERO);
            let game = try_game!(game, mode);
            match build_pareto3(&game) {
                Ok(result) => finish_construction(raw_args, mode, game, result, &budgets),
                Err(err) => {
                    let (payload, exit) = construct_error_payload(&err);
                    let report =
                        Report::new(raw_args, mode, Some(&game)).with_result(payload);
                    (report, exit)
                }
            }
        }
        Command::Strong { game } => {
            let mode = check_mode(&cli, SemanticsMode::DOMINANT_ZERO);
            let game = try_game!(game, mode);
            match build_strong(&game) {
                Ok(result) => {
                    // Coalition-proof outputs get the full coalition sweep.
                    let certificate = match is_strong_ce(&game, &result.profile, mode) {
                        Ok(c) => c,
                        Err(e) => fail!(mode, Some(&game), deviation_code(&e), e.to_string(), 1),
                    };
                    let exit = if certificate.is_equilibrium() { 0 } else { 2 };
                    let echo = CertificateEcho::from_certificate(&game, &certificate);
                    let payload = construction_payload(&game, &result, echo);
                    let report = Report::new(raw_args, mode, Some(&game)).with_result(payload);
                    (report, exit)
                }
                Err(err) => {
                    let (payload, exit) = construct_error_payload(&err);
                    let report =
                        Report::new(raw_args, mode, Some(&game)).with_result(payload);
                    (report, exit)
                }
            }
        }
        Command::General2p { game } => {
            let mode = check_mode(&cli, SemanticsMode::DOMINANT_AVERAGE);
            let game = try_game!(game, mode);
            match build_general_2p(&game, &budgets) {
                Ok(result) => finish_construction(raw_args, mode, game, result, &budgets),
                Err(err) => {
                    let (payload, exit) = construct_error_payload(&err);
                    let report =
                        Report::new(raw_args, mode, Some(&game)).with_result(payload);
                    (report, exit)
                }
            }
        }
        Command::SupportN4 { game, target } => {
            let mode = check_mode(&cli, SemanticsMode::DOMINANT_ZERO);
            let game = try_game!(game, mode);
            let target = match parse_target(&game, target) {
                Ok(t) => t,
                Err((code, message)) => fail!(mode, Some(&game), code, message, 1),
            };
            match build_support_n4(&game, &target, &budgets) {
                Ok(result) => {
                    let certificate = result
                        .certificate
                        .clone()
                        .expect("support builder attaches its certificate");
                    let exit = if certificate.is_equilibrium() { 0 } else { 2 };
                    let echo = CertificateEcho::from_certificate(&game, &certificate);
                    let payload = construction_payload(&game, &result, echo);
                    let report = Report::new(raw_args, mode, Some(&game)).with_result(payload);
                    (report, exit)
                }
                Err(err) => {
                    let (payload, exit) = construct_error_payload(&err);
                    let report =
                        Report::new(raw_args, mode, Some(&game)).with_result(payload);
                    (report, exit)
                }
            }
        }
        Command::Verify { game, profile } => {
            let mode = check_mode(&cli, SemanticsMode::DOMINANT_ZERO);
            let game = try_game!(game, mode);
            let text = match std::fs::read_to_string(profile) {
                Ok(t) => t,
                Err(e) => fail!(
                    mode,
                    Some(&game),
                    "IoError",
                    format!("{}: {e}", profile.display()),
                    1
                ),
            };
            let parsed = match parse_profile(&text, &game) {
                Ok(p) => p,
                Err(e) => fail!(mode, Some(&game), e.code(), e.to_string(), 1),
            };
            let certificate = match is_cse(&game, &parsed, mode, &budgets) {
                Ok(c) => c,
                Err(e) => fail!(mode, Some(&game), deviation_code(&e), e.to_string(), 1),
            };
            let exit = if certificate.is_equilibrium() { 0 } else { 2 };
            let payload = ResultPayload::Verification {
                profile: ProfileFile::from_profile(&game, &parsed),
                certificate: CertificateEcho::from_certificate(&game, &certificate),
            };
            let report = Report::new(raw_args, mode, Some(&game)).with_result(payload);
            (report, exit)
        }
        Command::VerifyStrong { game, profile, exhaustive } => {
            let mode = check_mode(&cli, SemanticsMode::DOMINANT_ZERO);
            let game = try_game!(game, mode);
            if *exhaustive {
                let sweep = match enumerate_strong_ce(&game, mode, &budgets) {
                    Ok(s) => s,
                    Err(e) => fail!(mode, Some(&game), deviation_code(&e), e.to_string(), 1),
                };
                let items = sweep
                    .strong_equilibria
                    .iter()
                    .map(|(profile, payoff)| SweepItem {
                        profile: ProfileFile::from_profile(&game, profile),
                        payoff: payoff_strings(payoff),
                        agreement_point: classify(&game, profile, mode)
                            .dominant_point
                            .map(|p| point_names(&game, &p)),
                    })
                    .collect();
                let payload = ResultPayload::StrongSweep {
                    profiles_checked: sweep.profiles_checked,
                    strong_count: sweep.strong_equilibria.len() as u64,
                    strong_equilibria: items,
                };
                let report = Report::new(raw_args, mode, Some(&game)).with_result(payload);
                return (report, 0);
            }
            let Some(profile) = profile else {
                fail!(
                    mode,
                    Some(&game),
                    "UsageError",
                    "verify-strong needs --profile or --exhaustive".to_string(),
                    1
                );
            };
            let text = match std::fs::read_to_string(profile) {
                Ok(t) => t,
                Err(e) => fail!(
                    mode,
                    Some(&game),
                    "IoError",
                    format!("{}: {e}", profile.display()),
                    1
                ),
            };
            let parsed = match parse_profile(&text, &game) {
                Ok(p) => p,
                Err(e) => fail!(mode, Some(&game), e.code(), e.to_string(), 1),
            };
            let certificate = match is_strong_ce(&game, &parsed, mode) {
                Ok(c) => c,
                Err(e) => fail!(mode, Some(&game), deviation_code(&e), e.to_string(), 1),
            };
            let exit = if certificate.is_equilibrium() { 0 } else { 2 };
            let payload = ResultPayload::Verification {
                profile: ProfileFile::from_profile(&game, &parsed),
                certificate: CertificateEcho::from_certificate(&game, &certificate),
            };
            let report = Report::new(raw_args, mode, Some(&game)).with_result(payload);
            (report, exit)
        }
        Command::Enumerate { game } => {
            let mode = check_mode(&cli, SemanticsMode::DOMINANT_ZERO);
            let game = try_game!(game, mode);
            let all = match enumerate_cse(&game, mode, &budgets) {
                Ok(a) => a,
                Err(e) => fail!(mode, Some(&game), deviation_code(&e), e.to_string(), 1),
            };
            let items: Vec<SweepItem> = all
                .iter()
                .map(|(profile, payoff)| SweepItem {
                    profile: ProfileFile::from_profile(&game, profile),
                    payoff: payoff_strings(payoff),
                    agreement_point: classify(&game, profile, mode)
                        .dominant_point
                        .map(|p| point_names(&game, &p)),
                })
                .collect();
            let payload =
                ResultPayload::Enumeration { count: items.len() as u64, equilibria: items };
            let report = Report::new(raw_args, mode, Some(&game)).with_result(payload);
            (report, 0)
        }
        Command::MixedDecompose { sigma, prune } => {
            let mode = check_mode(&cli, SemanticsMode::default());
            let text = match std::fs::read_to_string(sigma) {
                Ok(t) => t,
                Err(e) => {
                    fail!(mode, None, "IoError", format!("{}: {e}", sigma.display()), 1)
                }
            };
            let (file, strategy) = match parse_sigma(&text) {
                Ok(pair) => pair,
                Err(e) => fail!(mode, None, e.code(), e.to_string(), 1),
            };
            let measure = match cse_core::decompose(&strategy, &budgets, *prune) {
                Ok(m) => m,
                Err(e) => fail!(mode, None, mixed_code(&e), e.to_string(), 1),
            };
            let roundtrip = match cse_core::mixed::verify_roundtrip(&strategy, &budgets) {
                Ok(r) => r,
                Err(e) => fail!(mode, None, mixed_code(&e), e.to_string(), 1),
            };
            let payload = ResultPayload::Decomposition {
                player: file.player.clone(),
                actions: file.actions.clone(),
                cells: file.cells.clone(),
                support_size: measure.support_size() as u64,
                pruned: *prune,
                total_weight: rational_string(&measure.total_weight()),
                roundtrip,
                atoms: measure
                    .atoms()
                    .iter()
                    .map(|(table, weight)| AtomEcho {
                        table: table.iter().map(|&a| file.actions[a].clone()).collect(),
                        weight: rational_string(weight),
                    })
                    .collect(),
            };
            let report = Report::new(raw_args, mode, None).with_result(payload);
            (report, 0)
        }
    }
}

fn mixed_code(err: &cse_core::MixedError) -> &'static str {
    match err {
        cse_core::MixedError::UnknownCell { .. } => "UnknownCell",
        cse_core::MixedError::InvalidDistribution { .. } => "InvalidDistribution",
        cse_core::MixedError::InvalidPartition { .. } => "InvalidPartition",
        cse_core::MixedError::BudgetExceeded { .. } => "BudgetExceeded",
    }
}

/// Verifies a freshly built profile and assembles the construction report.
fn finish_construction(
    raw_args: &[String],
    mode: SemanticsMode,
    game: Game,
    result: cse_core::ConstructionResult<Rational>,
    budgets: &Budgets,
) -> (Report, i32) {
    let certificate = match is_cse(&game, &result.profile, result.mode, budgets) {
        Ok(c) => c,
        Err(e) => {
            let report = Report::new(raw_args, mode, Some(&game)).with_result(
                ResultPayload::Failure {
                    code: deviation_code(&e).into(),
                    message: e.to_string(),
                },
            );
            return (report, 1);
        }
    };
    let exit = if certificate.is_equilibrium() { 0 } else { 2 };
    let echo = CertificateEcho::from_certificate(&game, &certificate);
    let payload = construction_payload(&game, &result, echo);
    let report = Report::new(raw_args, result.mode, Some(&game)).with_result(payload);
    (report, exit)
}

/// Runs the CLI end to end: parse, execute, print or write, return the
/// exit code.
pub fn run(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("cse".to_string()).chain(args.to_vec())) {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own message; help/version are not errors.
            // Output is best-effort: a closed pipe must not panic.
            let code = i32::from(err.use_stderr());
            let _ = err.print();
            return code;
        }
    };
    let json = cli.json;
    let out = cli.out.clone();
    let (report, code) = execute(cli, args);
    let output = if json { report.to_json() } else { report.render_human() };
    match out {
        Some(path) => {
            if let Err(e) = write_atomically(&path, &output) {
                eprintln!("cannot write {}: {e}", path.display());
                return 1;
            }
            let _ = writeln!(std::io::stdout(), "report written to {}", path.display());
        }
        None => {
            let _ = std::io::stdout().write_all(output.as_bytes());
        }
    }
    code
}

fn write_atomically(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}
