//! The counter-CO situation, step by step.
//!
//! A lone seer claim has just named the werewolf correctly. Watch the
//! rule engine override the LLM candidate with the scripted lie, and note
//! that it only ever fires once.
//!
//! ```bash
//! cargo run --example counter_co
//! ```

use werewolf::analysis::{analyze, Backend};
use werewolf::game::{AgentId, PhaseKind, Role};
use werewolf::protocol::{StatusMessage, TalkEntry};
use werewolf::rules::{AgentView, Choice, RuleConfig, RuleEngine};
use werewolf::utterance::UtteranceEngine;

fn main() {
    let me = AgentId::new(3).unwrap();
    let seer = AgentId::new(5).unwrap();

    // The conversation so far: the real seer exposed me.
    let history = vec![
        TalkEntry::new(
            1,
            1,
            AgentId::new(1).unwrap(),
            "Good morning. Let us work out who the werewolf is among us.",
            None,
        ),
        TalkEntry::new(
            1,
            2,
            seer,
            "I am a seer. As a result of the divination, Agent[03] was a werewolf.",
            None,
        ),
    ];
    let alive = AgentId::all().into_iter().collect();
    let analysis = analyze(&history, &alive, Backend::Pattern).unwrap();

    let view = AgentView {
        me,
        my_role: Role::Werewolf,
        status: StatusMessage {
            id: me,
            role: Role::Werewolf,
            alive: AgentId::all().to_vec(),
            dead: vec![],
            day: 1,
            phase: PhaseKind::DayTalk,
        },
        history,
        analysis,
        my_divinations: vec![],
        round: 1,
        seed: 11,
    };

    let mut engine = RuleEngine::new(RuleConfig::default());
    println!(
        "Detected situations: {:?}\n",
        engine.detect_situations(&view)
    );

    let candidate = "I am not a werewolf, please believe me.";
    let decision = engine.decide_utterance(&view, Some(candidate));
    println!("LLM candidate: {candidate:?}");
    match &decision.choice {
        Choice::UseTemplate { id, bindings } => {
            let rendered = UtteranceEngine::builtin()
                .render_template(*id, bindings)
                .unwrap();
            println!("Rule engine says: use template `{id:?}`");
            println!("Utterance: {}", rendered.text);
        }
        other => println!("Rule engine says: {other:?}"),
    }

    // A second accusation cannot trigger a second lie.
    let again = engine.decide_utterance(&view, Some(candidate));
    println!("\nNext turn under the same accusation: {:?}", again.choice);
}
