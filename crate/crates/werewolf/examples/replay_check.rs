//! Write a log, read it back, replay it, and check it for
//! contradictions.
//!
//! ```bash
//! cargo run --example replay_check
//! ```

use werewolf::agents::template_roster;
use werewolf::arena::{consistency_check, replay};
use werewolf::protocol::{run_game, GameConfig, GameLog};
use werewolf::rules::RuleConfig;

fn main() {
    let seed = 23u64;
    let mut agents = template_roster(seed, RuleConfig::default());
    let outcome = run_game(seed, None, &mut agents, &GameConfig::default()).unwrap();

    let path = std::env::temp_dir().join("werewolf_replay_check.jsonl");
    outcome.log.write_file(&path).unwrap();
    println!("Log written to {}\n", path.display());

    let log = GameLog::read_file(&path).unwrap();
    print!("{}", replay(&log).unwrap());

    let contradictions = consistency_check(&log).unwrap();
    println!("\nContradictions found: {}", contradictions.len());
    for c in contradictions {
        println!("  {c}");
    }
}
