//! Replays the bundled scripted conversation and analyzes it.
//!
//! Five scripted seats reproduce a fixed day-one exchange in which the
//! seer exposes a suspect and two players announce their votes. The
//! analyzer recovers exactly those facts from the log.
//!
//! ```bash
//! cargo run --example scripted_game
//! ```

use std::path::Path;

use werewolf::analysis::AnalysisKind;
use werewolf::arena::{analyze_log, RosterSpec, TournamentConfig};

fn main() {
    let roster_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_scripts/roster.toml");
    let roster = RosterSpec::from_file(&roster_path).expect("bundled roster loads");

    let out = std::env::temp_dir().join("werewolf_scripted_example");
    let config = TournamentConfig::new(1, 1, &out);
    werewolf::arena::run_tournament(&roster, &config).expect("game runs");

    let log = out.join("game_00000.jsonl");
    println!("Seer analysis:");
    println!("{}", analyze_log(&log, Some(AnalysisKind::Seer)).unwrap());
    println!("\nVote analysis:");
    println!("{}", analyze_log(&log, Some(AnalysisKind::Vote)).unwrap());
}
