//! Runs a seeded batch of games and prints the aggregate statistics.
//!
//! The roster mixes hybrid agents (backed by a bland mock gateway) with
//! template-only agents. Same seed, same stats, every time.
//!
//! ```bash
//! cargo run --release --example tournament -- 200 7
//! ```

use werewolf::agents::PolicyKind;
use werewolf::arena::{run_tournament, RosterEntry, RosterSpec, TournamentConfig};
use werewolf::gateway::MockScript;
use werewolf::rules::RuleConfig;

fn main() {
    let mut args = std::env::args().skip(1);
    let games = args.next().and_then(|a| a.parse().ok()).unwrap_or(200u32);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(7u64);

    let roster = RosterSpec::new(
        vec![
            RosterEntry::policy(PolicyKind::Hybrid),
            RosterEntry::policy(PolicyKind::Hybrid),
            RosterEntry::policy(PolicyKind::TemplateOnly),
            RosterEntry::policy(PolicyKind::TemplateOnly),
            RosterEntry::policy(PolicyKind::TemplateOnly),
        ],
        RuleConfig::default(),
    )
    .expect("five entries");

    let out = std::env::temp_dir().join("werewolf_tournament_example");
    let config = TournamentConfig::new(games, seed, &out)
        .with_parallel(4)
        .with_mock(MockScript::with_default(
            "Someone here is not telling the truth.",
        ));

    let stats = run_tournament(&roster, &config).expect("tournament runs");
    print!("{}", stats.render_table());
    println!("Logs and stats.json written to {}", out.display());
}
