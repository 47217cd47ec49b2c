//! Measures what the counter-CO lie is worth to the wolf side.
//!
//! Runs two seeded batches of template-only games that differ only in the
//! counter-CO switch, then reports both wolf-side win rates with a 95%
//! confidence interval on the difference. The fake-CO knob is off so the
//! comparison isolates one rule.
//!
//! ```bash
//! cargo run --release --example counter_co_ablation
//! ```

use werewolf::agents::PolicyKind;
use werewolf::arena::{run_tournament, RosterSpec, TournamentConfig};
use werewolf::rules::RuleConfig;

fn wolf_rate(counter_co: bool, games: u32, seed: u64, out: &std::path::Path) -> f64 {
    let rules = RuleConfig {
        counter_co,
        fake_co_probability: 0.0,
    };
    let roster = RosterSpec::uniform(PolicyKind::TemplateOnly, rules);
    let config = TournamentConfig::new(games, seed, out).with_parallel(4);
    let stats = run_tournament(&roster, &config).expect("tournament runs");
    stats.wolf_rate()
}

fn main() {
    let games = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(2000u32);
    let seed = 2024;
    let tmp = std::env::temp_dir().join("werewolf_counter_co_ablation");

    let enabled = wolf_rate(true, games, seed, &tmp.join("enabled"));
    let disabled = wolf_rate(false, games, seed, &tmp.join("disabled"));

    let n = games as f64;
    let delta = enabled - disabled;
    let half_width = 1.96 * ((enabled * (1.0 - enabled) + disabled * (1.0 - disabled)) / n).sqrt();

    println!("Games per configuration: {games}");
    println!("Wolf-side win rate, counter-CO enabled:  {enabled:.4}");
    println!("Wolf-side win rate, counter-CO disabled: {disabled:.4}");
    println!("Difference: {delta:+.4} (95% half-width {half_width:.4})");
    if delta > half_width {
        println!("The counter-CO lie helps the werewolf side survive.");
    } else {
        println!("No significant effect at this sample size.");
    }
}
