//! Prompt construction for utterance generation and style transformation.

use crate::protocol::render_history;
use crate::rules::AgentView;

use super::persona::Persona;
use super::UtteranceEngine;

/// General rules handed to the LLM ahead of every generation request.
pub const DEFAULT_RULES_TEXT: &str = "\
Werewolf is a hidden-role game of five players: two villagers, one seer, \
one possessed, and one werewolf. Each day all living players talk, then \
everyone votes to exile one player. Each night the werewolf removes one \
player, and the seer learns whether one player is a human or a werewolf. \
The village side wins when the werewolf is exiled; the wolf side wins when \
the werewolf survives to parity. The possessed counts as human to \
divination but wins with the werewolf. Day 0 has no talk; only the seer \
acts that night.";

/// Builds the utterance-generation prompt: rules, tips, conversation
/// history (oldest first, `Agent[{number}]: {say}` lines), then the
/// current game status, then the instruction. Deterministic.
pub fn build_generation_prompt(engine: &UtteranceEngine, view: &AgentView) -> String {
    format!(
        "## Rules\n{rules}\n\n## Tips\n{tips}\n\n## Conversation History\n{history}\n\n\
         ## Game Status\n{status}\n\nYou are {me}. Output your next single-line utterance, \
         no more than 100 characters.",
        rules = DEFAULT_RULES_TEXT,
        tips = engine.tips(),
        history = render_history(&view.history),
        status = view.status.render(),
        me = view.me,
    )
}

/// Builds the style-transformation prompt for a persona, embedding its
/// profile fields and example lines as conversion examples. `None` for
/// the plain persona, which is the identity path.
pub fn build_style_prompt(persona: &Persona, text: &str) -> Option<String> {
    if persona.is_plain() {
        return None;
    }
    let mut examples = String::new();
    for line in &persona.example_lines {
        examples.push_str("- ");
        examples.push_str(line);
        examples.push('\n');
    }
    Some(format!(
        "You rewrite one utterance from a werewolf game into a character's \
         speaking style.\nCharacter name: {name}\nGender: {gender}\nAge: {age}\n\
         First person: {first_person}\nTypical sentence ending: {sentence_end}\n\
         How this character speaks:\n{examples}\
         Rewrite the following sentence in this character's style. Keep its \
         meaning, keep every Agent[0k] token unchanged, and keep any leading \
         >>Agent[0k] prefix. Output only the rewritten sentence.\n\
         Sentence: {text}",
        name = persona.name,
        gender = persona.gender,
        age = persona.age,
        first_person = persona.first_person,
        sentence_end = if persona.sentence_end.is_empty() {
            "(none)"
        } else {
            &persona.sentence_end
        },
        examples = examples,
        text = text,
    ))
}
