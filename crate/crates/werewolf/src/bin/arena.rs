//! Tournament command line: run seeded batches, replay logs, check them
//! for contradictions, and extract vote/seer analyses.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use werewolf::analysis::AnalysisKind;
use werewolf::arena::{analyze_log, consistency_check, replay, RosterSpec, TournamentConfig};
use werewolf::gateway::{HttpGatewayConfig, MockScript};
use werewolf::protocol::GameLog;

#[derive(Parser)]
#[command(
    name = "arena",
    about = "Five-player werewolf tournaments, replays, and log analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded batch of games and write logs plus stats.json.
    Run {
        /// Roster TOML file (five `[[agents]]` entries, optional `[rules]`).
        #[arg(long)]
        roster: PathBuf,
        /// Number of games.
        #[arg(long, default_value_t = 1)]
        games: u32,
        /// Master seed; per-game seeds derive from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for game logs and stats.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// LLM gateway config (TOML with an `[llm]` table).
        #[arg(long, conflicts_with = "mock")]
        llm_config: Option<PathBuf>,
        /// Mock gateway script (TOML with rules and a default).
        #[arg(long)]
        mock: Option<PathBuf>,
        /// Talk rounds per day.
        #[arg(long, default_value_t = werewolf::protocol::DEFAULT_MAX_ROUNDS)]
        max_rounds: u32,
        /// Per-response deadline for remote agents, in milliseconds.
        #[arg(long, default_value_t = werewolf::protocol::DEFAULT_AGENT_TIMEOUT_MS)]
        agent_timeout_ms: u64,
    },
    /// Print a finished log as a day-by-day transcript.
    Replay { log: PathBuf },
    /// Scan a log file (or every *.jsonl in a directory) for
    /// contradictions.
    Check { path: PathBuf },
    /// Extract vote intents and divination claims from a log.
    Analyze {
        log: PathBuf,
        /// Restrict the output to one analysis.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Vote,
    Seer,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run {
            roster,
            games,
            seed,
            out,
            parallel,
            llm_config,
            mock,
            max_rounds,
            agent_timeout_ms,
        } => {
            let roster = RosterSpec::from_file(&roster)?;
            let mut config = TournamentConfig::new(games, seed, out).with_parallel(parallel);
            config.game.max_rounds = max_rounds;
            config.game.agent_timeout_ms = agent_timeout_ms;
            if let Some(path) = mock {
                config.mock = Some(MockScript::from_file(&path)?);
            }
            if let Some(path) = llm_config {
                config.llm = Some(HttpGatewayConfig::from_file(&path)?);
            }
            let stats = werewolf::arena::run_tournament(&roster, &config)?;
            print!("{}", stats.render_table());
            Ok(())
        }
        Command::Replay { log } => {
            let log = GameLog::read_file(&log)?;
            print!("{}", replay(&log)?);
            Ok(())
        }
        Command::Check { path } => {
            let files: Vec<PathBuf> = if path.is_dir() {
                let mut files: Vec<PathBuf> = std::fs::read_dir(&path)?
                    .filter_map(|entry| entry.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
                    .collect();
                files.sort();
                files
            } else {
                vec![path]
            };
            let mut total = 0usize;
            for file in &files {
                let log = GameLog::read_file(file)?;
                let contradictions = consistency_check(&log)?;
                for c in &contradictions {
                    println!("{}: {c}", file.display());
                }
                total += contradictions.len();
            }
            println!("{} contradiction(s) across {} log(s)", total, files.len());
            Ok(())
        }
        Command::Analyze { log, kind } => {
            let kind = kind.map(|k| match k {
                Kind::Vote => AnalysisKind::Vote,
                Kind::Seer => AnalysisKind::Seer,
            });
            let rendered = analyze_log(&log, kind)?;
            if !rendered.is_empty() {
                println!("{rendered}");
            }
            Ok(())
        }
    }
}
