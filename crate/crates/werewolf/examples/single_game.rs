//! Plays one complete five-player game with template-only agents and
//! prints the transcript.
//!
//! ```bash
//! cargo run --example single_game -- 42
//! ```

use werewolf::agents::template_roster;
use werewolf::arena::replay;
use werewolf::protocol::{run_game, GameConfig};
use werewolf::rules::RuleConfig;

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(42u64);
    let mut agents = template_roster(seed, RuleConfig::default());
    let outcome = run_game(seed, None, &mut agents, &GameConfig::default())
        .expect("five agents make a valid roster");
    print!(
        "{}",
        replay(&outcome.log).expect("fresh logs are well formed")
    );
}
