//! Extracting structured facts from conversation.
//!
//! Feeds a five-line day of talk through the pattern analyzer and prints
//! the vote intents, the divination claim, and the prompt the LLM backend
//! would send for the same job.
//!
//! ```bash
//! cargo run --example talk_analysis
//! ```

use werewolf::analysis::{
    analyze, build_analysis_prompt, render_claims, render_votes, AnalysisKind, Backend,
};
use werewolf::game::AgentId;
use werewolf::protocol::{parse_talk, TalkEntry};

const CONVERSATION: [&str; 5] = [
    "Agent[02]: Good morning. It seems we have to look for werewolf. First of all, I would like to know the results of the seer.",
    "Agent[01]: Good morning. So our task is to find the werewolf. Indeed, I am looking forward to getting the results of the seer.",
    "Agent[05]: I am a seer. As a result of the divination, Agent[02] was a werewolf.",
    "Agent[04]: Agent[05], thanks for presenting your divination results. Let me also be suspicious of Agent[02]. Then, I will vote for Agent[02] tonight.",
    "Agent[03]: According to Agent[05]'s result, it looks like Agent[02] is a werewolf. I will also vote for Agent[02] tonight.",
];

fn main() {
    let history: Vec<TalkEntry> = CONVERSATION
        .iter()
        .enumerate()
        .map(|(i, line)| {
            let parsed = parse_talk(line).expect("well-formed line");
            TalkEntry::new(1, i as u32 + 1, parsed.speaker, parsed.text, None)
        })
        .collect();

    let alive = AgentId::all().into_iter().collect();
    let result = analyze(&history, &alive, Backend::Pattern).unwrap();

    println!("Vote analysis:");
    println!("{}", render_votes(&result.votes));
    println!("\nSeer analysis:");
    println!("{}", render_claims(&result.claims));

    println!("\n--- Prompt the LLM backend would send for the vote analysis ---");
    println!("{}", build_analysis_prompt(&history, AnalysisKind::Vote));
}
