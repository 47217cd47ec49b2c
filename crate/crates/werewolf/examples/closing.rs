//! When to stop talking.
//!
//! The closing rule fires once every other player has named a vote
//! target, been asked for one, or gone quiet. Until then the agent keeps
//! the discussion converging: it declares its own target, then chases the
//! straggler with a directed question.
//!
//! ```bash
//! cargo run --example closing
//! ```

use werewolf::analysis::{analyze, Backend};
use werewolf::game::{AgentId, PhaseKind, Role};
use werewolf::protocol::{StatusMessage, TalkEntry};
use werewolf::rules::{AgentView, Choice, RuleConfig, RuleEngine};
use werewolf::utterance::UtteranceEngine;

fn agent(i: u8) -> AgentId {
    AgentId::new(i).unwrap()
}

fn view_for(history: &[TalkEntry]) -> AgentView {
    let me = agent(1);
    let alive = AgentId::all().into_iter().collect();
    let analysis = analyze(history, &alive, Backend::Pattern).unwrap();
    AgentView {
        me,
        my_role: Role::Villager,
        status: StatusMessage {
            id: me,
            role: Role::Villager,
            alive: AgentId::all().to_vec(),
            dead: vec![],
            day: 1,
            phase: PhaseKind::DayTalk,
        },
        history: history.to_vec(),
        analysis,
        my_divinations: vec![],
        round: 2,
        seed: 3,
    }
}

fn main() {
    let texts = UtteranceEngine::builtin();
    let mut engine = RuleEngine::new(RuleConfig::default());

    // Agents 2 and 3 declared; agent 4 declared; agent 5 keeps chatting
    // without naming anyone.
    let mut history = vec![
        TalkEntry::new(1, 1, agent(2), "I will vote for Agent[04].", None),
        TalkEntry::new(1, 2, agent(3), "I will vote for Agent[04].", None),
        TalkEntry::new(1, 3, agent(4), "I will vote for Agent[02].", None),
        TalkEntry::new(1, 4, agent(5), "Hard to say anything yet.", None),
    ];

    let say = |engine: &mut RuleEngine, history: &mut Vec<TalkEntry>| {
        let view = view_for(history);
        println!("closing_trigger: {}", engine.closing_trigger(&view));
        let decision = engine.decide_utterance(&view, None);
        let (text, tag) = match &decision.choice {
            Choice::Close => {
                let rendered = texts
                    .render_template(
                        werewolf::utterance::TemplateId::Closing,
                        &Default::default(),
                    )
                    .unwrap();
                println!("Decision: close the conversation.");
                (rendered.text, rendered.tag)
            }
            Choice::UseTemplate { id, bindings } => {
                let rendered = texts.render_template(*id, bindings).unwrap();
                println!("Decision: template `{id:?}`.");
                (rendered.text, rendered.tag)
            }
            Choice::UseLlm => unreachable!("no candidate supplied"),
        };
        println!("Agent[01]: {text}\n");
        let turn = history.len() as u32 + 1;
        let mut entry = TalkEntry::new(1, turn, agent(1), text, None);
        entry.tag = Some(tag);
        history.push(entry);
    };

    // Turn 1: three declarations are evidence enough to state a target.
    say(&mut engine, &mut history);
    // Turn 2: agent 5 still has not decided, so ask directly.
    say(&mut engine, &mut history);

    // Agent 5 goes quiet; silence counts as a decision, so close.
    history.push(TalkEntry::new(
        1,
        history.len() as u32 + 1,
        agent(5),
        "Skip",
        None,
    ));
    say(&mut engine, &mut history);
}
