//! Hybrid agents over a scripted mock gateway.
//!
//! The mock answers generation prompts with a canned line and everything
//! else with a default, so whole games run without any network and replay
//! identically. The same script mechanism drives the acceptance suite.
//!
//! ```bash
//! cargo run --example mock_llm
//! ```

use std::sync::Arc;

use werewolf::agents::PolicyAgent;
use werewolf::game::AgentId;
use werewolf::gateway::{Gateway, MockGateway, MockScript};
use werewolf::protocol::{run_game, Agent, GameConfig};
use werewolf::rules::RuleConfig;
use werewolf::utterance::UtteranceEngine;

fn main() {
    let seed = 31u64;
    let script = MockScript::with_default("I am still weighing everyone's words.").rule(
        "## Rules",
        "My gut says the quiet ones deserve a closer look.",
    );

    let utterances = Arc::new(UtteranceEngine::builtin());
    let mut agents: Vec<Box<dyn Agent>> = AgentId::all()
        .into_iter()
        .map(|id| {
            let gateway: Arc<dyn Gateway> = Arc::new(MockGateway::new(script.clone()));
            Box::new(PolicyAgent::hybrid(
                id,
                seed ^ id.index() as u64,
                Arc::clone(&utterances),
                utterances.personas().plain().clone(),
                RuleConfig::default(),
                Some(gateway),
            )) as Box<dyn Agent>
        })
        .collect();

    let outcome = run_game(seed, None, &mut agents, &GameConfig::default()).unwrap();
    println!("Winner: {} after {} day(s)\n", outcome.winner, outcome.days);
    println!("Day 1 talk:");
    for entry in outcome
        .log
        .talks()
        .iter()
        .filter(|t| t.day == 1 && !t.is_pass())
    {
        println!("  {}", entry.render_line());
    }
}
