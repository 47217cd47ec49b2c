//! Persona style transformation.
//!
//! Renders one template utterance through every persona's deterministic
//! fallback, then shows the style prompt the LLM path would use instead.
//!
//! ```bash
//! cargo run --example personas
//! ```

use werewolf::game::AgentId;
use werewolf::utterance::{build_style_prompt, Bindings, TemplateId, UtteranceEngine};

fn main() {
    let engine = UtteranceEngine::builtin();
    let target = AgentId::new(4).unwrap();
    let utterance = engine
        .render_template(
            TemplateId::VoteDeclaration,
            &Bindings::default().target(target),
        )
        .unwrap();

    println!("Plain utterance: {}\n", utterance.text);
    println!("Fallback stylization (token substitution only):");
    for name in [
        "Plain",
        "Princess",
        "Kansai",
        "Hiroshima",
        "Anya",
        "Zundamon",
    ] {
        let persona = engine.personas().get(name).unwrap();
        println!(
            "  {name:<10} {}",
            engine.stylize(persona, &utterance.text, None)
        );
    }

    let princess = engine.personas().get("Princess").unwrap();
    println!("\n--- Style prompt the LLM path would send for Princess ---");
    println!("{}", build_style_prompt(princess, &utterance.text).unwrap());
}
